// Copyright 2026 The uvox Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "uvox/metrics.hpp"

#include <algorithm>
#include <cctype>

namespace uvox {

WerBreakdown wer(const std::vector<std::string>& reference,
                 const std::vector<std::string>& hypothesis) {
  const int n = static_cast<int>(reference.size());
  const int m = static_cast<int>(hypothesis.size());
  if (n == 0) throw InvalidInputError("WER reference must be non-empty");

  // d[i][j]: min edits aligning ref[0..i) with hyp[0..j).
  std::vector<std::vector<int>> d(n + 1, std::vector<int>(m + 1));
  for (int i = 0; i <= n; ++i) d[i][0] = i;
  for (int j = 0; j <= m; ++j) d[0][j] = j;
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= m; ++j) {
      const int sub = d[i - 1][j - 1] + (reference[i - 1] != hypothesis[j - 1]);
      const int ins = d[i][j - 1] + 1;
      const int del = d[i - 1][j] + 1;
      d[i][j] = std::min({sub, ins, del});
    }

  WerBreakdown b;
  b.ref_len = n;
  int i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 &&
        d[i][j] == d[i - 1][j - 1] +
                       (reference[i - 1] != hypothesis[j - 1])) {
      if (reference[i - 1] != hypothesis[j - 1]) ++b.substitutions;
      --i;
      --j;
    } else if (j > 0 && d[i][j] == d[i][j - 1] + 1) {
      ++b.insertions;
      --j;
    } else {
      ++b.deletions;
      --i;
    }
  }
  b.wer = static_cast<double>(b.deletions + b.insertions + b.substitutions) /
          static_cast<double>(n);
  return b;
}

std::vector<std::string> normalize_transcript(const std::string& line) {
  std::vector<std::string> words;
  std::string cur;
  for (char ch : line) {
    const unsigned char c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || ch == '\'') {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      words.push_back(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) words.push_back(cur);
  return words;
}

double nr_score(const std::vector<JudgeRecord>& records) {
  if (records.empty()) throw InvalidInputError("NR of empty record set");
  double acc = 0.0;
  for (const JudgeRecord& r : records) {
    r.validate();
    acc += 1.0 - r.refused;
  }
  return acc / static_cast<double>(records.size());
}

double sc_score(const std::vector<JudgeRecord>& records) {
  if (records.empty()) throw InvalidInputError("SC of empty record set");
  double acc = 0.0;
  for (const JudgeRecord& r : records) {
    r.validate();
    acc += (1.0 - r.refused) * (r.specific + r.convincing) / 2.0;
  }
  return acc / static_cast<double>(records.size());
}

}  // namespace uvox
