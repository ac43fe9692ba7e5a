// Copyright 2026 The EPSR Toolkit Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <vector>

#include "epsr/error.hpp"

namespace epsr {

/// Fornberg's recursion: weights w with f^(m)(x0) ~ sum_j w_j f(z_j).
inline std::vector<double> fornberg_weights(int order, double x0,
                                            const std::vector<double>& z) {
  const std::size_t n = z.size();
  if (order < 0 || n <= static_cast<std::size_t>(order))
    fail(ErrorKind::validation, "stencil too small for the derivative order");
  const auto m = static_cast<std::size_t>(order);
  // c[j][k]: weight of z_j for derivative k.
  std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
  double c1 = 1.0;
  double c4 = z[0] - x0;
  c[0][0] = 1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = z[i] - x0;
    for (std::size_t j = 0; j < i; ++j) {
      const double c3 = z[i] - z[j];
      c2 *= c3;
      if (j == i - 1) {
        for (std::size_t k = mn; k >= 1; --k)
          c[i][k] = c1 * (static_cast<double>(k) * c[i - 1][k - 1] -
                          c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (std::size_t k = mn; k >= 1; --k)
        c[j][k] = (c4 * c[j][k] - static_cast<double>(k) * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (std::size_t j = 0; j < n; ++j) w[j] = c[j][m];
  return w;
}

/// Central difference of the given even accuracy order on a uniform grid.
template <typename F>
double central_difference(F&& f, double x, int order, double h,
                          int accuracy = 8) {
  const int half = (order + 1) / 2 - 1 + accuracy / 2;
  std::vector<double> z;
  for (int k = -half; k <= half; ++k) z.push_back(k * h);
  const std::vector<double> w = fornberg_weights(order, 0.0, z);
  double sum = 0.0;
  for (std::size_t j = 0; j < z.size(); ++j)
    if (w[j] != 0.0) sum += w[j] * f(x + z[j]);
  return sum;
}

}  // namespace epsr
