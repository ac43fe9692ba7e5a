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

#include <cmath>
#include <cstdint>
#include <span>

#include <Eigen/Dense>

#include "epsr/interpolation.hpp"
#include "epsr/spectra.hpp"

namespace epsr {

/// Finite Fourier series a0 + sum_k a_k cos(W_k x) + b_k sin(W_k x).
///
/// This is the exact cost model of a single-parameter circuit slice and the
/// ground truth every shift rule is checked against. The scalar type is a
/// template parameter so tests can evaluate the same polynomial in extended
/// precision.
template <typename Scalar>
struct TrigPoly {
  Scalar a0{0};
  Vec<Scalar> cos_coeffs;
  Vec<Scalar> sin_coeffs;
  Vec<Scalar> frequencies;

  Eigen::Index size() const { return frequencies.size(); }

  template <typename Other>
  TrigPoly<Other> cast() const {
    return {static_cast<Other>(a0), cos_coeffs.template cast<Other>(),
            sin_coeffs.template cast<Other>(),
            frequencies.template cast<Other>()};
  }
};

using TrigPolyd = TrigPoly<double>;

template <typename Scalar>
TrigPoly<Scalar> make_trigpoly(const FrequencySet& fs, Scalar a0,
                               Vec<Scalar> cos_coeffs, Vec<Scalar> sin_coeffs) {
  const auto r = static_cast<Eigen::Index>(fs.size());
  if (cos_coeffs.size() != r || sin_coeffs.size() != r)
    fail(ErrorKind::validation,
         "coefficient arrays must match the frequency count");
  return {a0, std::move(cos_coeffs), std::move(sin_coeffs),
          frequency_vector<Scalar>(fs)};
}

template <typename Scalar>
Scalar evaluate(const TrigPoly<Scalar>& p, Scalar x) {
  using std::cos;
  using std::sin;
  Scalar value = p.a0;
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    const Scalar t = p.frequencies[k] * x;
    value += p.cos_coeffs[k] * cos(t) + p.sin_coeffs[k] * sin(t);
  }
  return value;
}

/// d-th derivative, using the four-cycle of trigonometric derivatives.
template <typename Scalar>
Scalar exact_derivative(const TrigPoly<Scalar>& p, int d, Scalar x) {
  using std::cos;
  using std::pow;
  using std::sin;
  if (d < 0) fail(ErrorKind::validation, "derivative order must be >= 0");
  if (d == 0) return evaluate(p, x);
  Scalar value(0);
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    const Scalar w = p.frequencies[k];
    const Scalar c = cos(w * x);
    const Scalar s = sin(w * x);
    Scalar term;
    switch (d % 4) {
      case 0:
        term = p.cos_coeffs[k] * c + p.sin_coeffs[k] * s;
        break;
      case 1:
        term = -p.cos_coeffs[k] * s + p.sin_coeffs[k] * c;
        break;
      case 2:
        term = -p.cos_coeffs[k] * c - p.sin_coeffs[k] * s;
        break;
      default:
        term = p.cos_coeffs[k] * s - p.sin_coeffs[k] * c;
        break;
    }
    value += pow(w, Scalar(d)) * term;
  }
  return value;
}

/// (f(x) - f(-x)) / 2, computed analytically as sum_k b_k sin(W_k x).
template <typename Scalar>
Scalar odd_part(const TrigPoly<Scalar>& p, Scalar x) {
  using std::sin;
  Scalar value(0);
  for (Eigen::Index k = 0; k < p.size(); ++k)
    value += p.sin_coeffs[k] * sin(p.frequencies[k] * x);
  return value;
}

/// (f(x) + f(-x)) / 2 = a0 + sum_k a_k cos(W_k x).
template <typename Scalar>
Scalar even_part(const TrigPoly<Scalar>& p, Scalar x) {
  using std::cos;
  Scalar value = p.a0;
  for (Eigen::Index k = 0; k < p.size(); ++k)
    value += p.cos_coeffs[k] * cos(p.frequencies[k] * x);
  return value;
}

/// Coefficients i.i.d. uniform on [-1, 1] from a seeded mt19937_64.
TrigPolyd random_trigpoly(const FrequencySet& fs, std::uint64_t seed);

/// Unique polynomial over `fs` through 2r+1 samples. Solves the joint
/// [A_e | A_o] system; throws when the sample abscissae make it singular.
TrigPolyd fit_from_samples(const FrequencySet& fs, std::span<const double> xs,
                           std::span<const double> ys);

/// max_i |p(x_i) - y_i|.
double fit_residual(const TrigPolyd& p, std::span<const double> xs,
                    std::span<const double> ys);

}  // namespace epsr
