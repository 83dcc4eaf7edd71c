// Copyright 2026 The uvox Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <string>

#include "uvox/probe.hpp"

namespace uvox {

// Versioned text serialization of a transfer matrix:
//   line 1: SWTM v1
//   line 2: num_tones,N,delta_f_hz,f_e_hz,sample_rate,recordings_averaged
//   then num_tones rows of (N/2+1) comma-separated re:im pairs, 9
//   significant digits each.
// Invalid rows are stored as zeros and flagged invalid again on load.
void save_matrix(const TransferMatrix& m, const std::string& path);
TransferMatrix load_matrix(const std::string& path);

}  // namespace uvox
