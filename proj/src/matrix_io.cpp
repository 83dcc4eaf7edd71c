// Copyright 2026 The uvox Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "uvox/matrix_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace uvox {

namespace {
constexpr const char* kMagic = "SWTM v1";
}

void save_matrix(const TransferMatrix& m, const std::string& path) {
  m.validate();
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError("cannot write matrix file: " + path);

  out << kMagic << "\n";
  char header[160];
  std::snprintf(header, sizeof(header), "%d,%d,%.8e,%.8e,%d,%d",
                m.num_tones(), m.probe.fft_size, m.probe.delta_f_hz,
                m.probe.f_e_hz, m.sample_rate_hz, m.recordings_averaged);
  out << header << "\n";

  char buf[64];
  for (int i = 0; i < m.num_tones(); ++i) {
    for (int j = 0; j < m.num_bins(); ++j) {
      const cplx v = m.row_valid[i] ? m.entries(i, j) : cplx(0.0, 0.0);
      std::snprintf(buf, sizeof(buf), "%.8e:%.8e", v.real(), v.imag());
      if (j) out << ',';
      out << buf;
    }
    out << "\n";
  }
  if (!out) throw FormatError("failed writing matrix file: " + path);
}

TransferMatrix load_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open matrix file: " + path);

  std::string line;
  if (!std::getline(in, line) || line != kMagic)
    throw FormatError("bad matrix file magic (want 'SWTM v1')");
  if (!std::getline(in, line)) throw FormatError("missing matrix header");

  int num_tones = 0, fft_size = 0, sample_rate = 0, averaged = 0;
  double delta_f = 0.0, f_e = 0.0;
  if (std::sscanf(line.c_str(), "%d,%d,%lf,%lf,%d,%d", &num_tones, &fft_size,
                  &delta_f, &f_e, &sample_rate, &averaged) != 6)
    throw FormatError("malformed matrix header: " + line);
  if (num_tones < 1 || fft_size < 2 || sample_rate < 1 || averaged < 1)
    throw FormatError("matrix header values out of range");

  TransferMatrix m;
  m.probe.fft_size = fft_size;
  m.probe.delta_f_hz = delta_f;
  m.probe.f_e_hz = f_e;
  m.sample_rate_hz = sample_rate;
  m.recordings_averaged = averaged;
  const int bins = fft_size / 2 + 1;
  m.entries = Eigen::MatrixXcd::Zero(num_tones, bins);
  m.row_valid.assign(num_tones, false);

  for (int i = 0; i < num_tones; ++i) {
    if (!std::getline(in, line))
      throw FormatError("matrix file truncated at row " + std::to_string(i));
    std::istringstream row(line);
    std::string cell;
    bool any_nonzero = false;
    for (int j = 0; j < bins; ++j) {
      if (!std::getline(row, cell, ','))
        throw FormatError("matrix row " + std::to_string(i) + " too short");
      double re = 0.0, im = 0.0;
      if (std::sscanf(cell.c_str(), "%lf:%lf", &re, &im) != 2)
        throw FormatError("malformed matrix entry: " + cell);
      m.entries(i, j) = cplx(re, im);
      any_nonzero |= re != 0.0 || im != 0.0;
    }
    if (std::getline(row, cell, ','))
      throw FormatError("matrix row " + std::to_string(i) + " too long");
    m.row_valid[i] = any_nonzero;
  }

  if (num_tones != m.probe.num_tones())
    throw FormatError("matrix row count disagrees with f_e/delta_f");
  m.validate();
  return m;
}

}  // namespace uvox
