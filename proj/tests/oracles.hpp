// Copyright 2026 The fusion_eval Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Brute-force reference implementations for the rank statistics. These are
// deliberately naive and share no code with the library.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace fusion_eval::testing {

// rank_i = 1 + #{j : v_j < v_i} + (#{j : v_j == v_i} - 1) / 2
inline std::vector<double> oracle_average_ranks(const std::vector<double>& v) {
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::size_t less = 0, equal = 0;
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (v[j] < v[i]) ++less;
      if (v[j] == v[i]) ++equal;
    }
    ranks[i] = 1.0 + static_cast<double>(less) + (static_cast<double>(equal) - 1.0) / 2.0;
  }
  return ranks;
}

inline long double oracle_pearson(const std::vector<double>& x, const std::vector<double>& y) {
  long double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<long double>(x.size());
  my /= static_cast<long double>(y.size());
  long double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0 || syy == 0) throw std::domain_error("constant vector");
  return sxy / std::sqrt(sxx * syy);
}

inline double oracle_spearman(const std::vector<double>& x, const std::vector<double>& y) {
  return static_cast<double>(oracle_pearson(oracle_average_ranks(x), oracle_average_ranks(y)));
}

// Direct pair count over all n(n-1)/2 pairs.
inline double oracle_kendall_tau_b(const std::vector<double>& x, const std::vector<double>& y) {
  long long concordant = 0, discordant = 0, tied_x_only = 0, tied_y_only = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const bool tx = x[i] == x[j];
      const bool ty = y[i] == y[j];
      if (tx && ty) continue;
      if (tx) {
        ++tied_x_only;
      } else if (ty) {
        ++tied_y_only;
      } else if ((x[i] < x[j]) == (y[i] < y[j])) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const long double denom =
      std::sqrt(static_cast<long double>(concordant + discordant + tied_x_only) *
                static_cast<long double>(concordant + discordant + tied_y_only));
  if (denom == 0) throw std::domain_error("constant vector");
  return static_cast<double>((concordant - discordant) / denom);
}

}  // namespace fusion_eval::testing
