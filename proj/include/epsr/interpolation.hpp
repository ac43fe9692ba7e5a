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

#include <Eigen/Dense>

#include "epsr/error.hpp"
#include "epsr/spectra.hpp"

namespace epsr {

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Frequencies as an Eigen column in the requested scalar type.
template <typename Scalar>
Vec<Scalar> frequency_vector(const FrequencySet& fs) {
  Vec<Scalar> omega(static_cast<Eigen::Index>(fs.size()));
  for (Eigen::Index k = 0; k < omega.size(); ++k)
    omega[k] = static_cast<Scalar>(fs[static_cast<std::size_t>(k)]);
  return omega;
}

/// Entry (i, k) = sin(W_k x_i). Rows follow the node order, columns the
/// ascending frequency order.
template <typename Derived, typename Scalar = typename Derived::Scalar>
Mat<Scalar> sine_block(const Eigen::MatrixBase<Derived>& nodes,
                       const Vec<Scalar>& omega) {
  using std::sin;
  Mat<Scalar> m(nodes.size(), omega.size());
  for (Eigen::Index i = 0; i < nodes.size(); ++i)
    for (Eigen::Index k = 0; k < omega.size(); ++k)
      m(i, k) = sin(omega[k] * nodes[i]);
  return m;
}

/// Entry (i, 0) = 1 and entry (i, k) = cos(W_k x_i) for k >= 1.
template <typename Derived, typename Scalar = typename Derived::Scalar>
Mat<Scalar> cosine_block(const Eigen::MatrixBase<Derived>& nodes,
                         const Vec<Scalar>& omega) {
  using std::cos;
  Mat<Scalar> m(nodes.size(), omega.size() + 1);
  for (Eigen::Index i = 0; i < nodes.size(); ++i) {
    m(i, 0) = Scalar(1);
    for (Eigen::Index k = 0; k < omega.size(); ++k)
      m(i, k + 1) = cos(omega[k] * nodes[i]);
  }
  return m;
}

/// Odd interpolation matrix A_o (r x r).
template <typename Derived, typename Scalar = typename Derived::Scalar>
Mat<Scalar> build_A_odd(const Eigen::MatrixBase<Derived>& nodes,
                        const FrequencySet& fs) {
  if (static_cast<std::size_t>(nodes.size()) != fs.size())
    fail(ErrorKind::validation, "odd rule needs exactly r nodes");
  return sine_block(nodes, frequency_vector<Scalar>(fs));
}

/// Even interpolation matrix A_e ((r+1) x (r+1)) with the leading ones column.
template <typename Derived, typename Scalar = typename Derived::Scalar>
Mat<Scalar> build_A_even(const Eigen::MatrixBase<Derived>& nodes,
                         const FrequencySet& fs) {
  if (static_cast<std::size_t>(nodes.size()) != fs.size() + 1)
    fail(ErrorKind::validation, "even rule needs exactly r+1 nodes");
  return cosine_block(nodes, frequency_vector<Scalar>(fs));
}

/// Row-wise derivative of A_o: entry (i, k) = W_k cos(W_k x_i).
template <typename Derived, typename Scalar = typename Derived::Scalar>
Mat<Scalar> build_A_odd_derivative(const Eigen::MatrixBase<Derived>& nodes,
                                   const FrequencySet& fs) {
  using std::cos;
  const Vec<Scalar> omega = frequency_vector<Scalar>(fs);
  Mat<Scalar> m(nodes.size(), omega.size());
  for (Eigen::Index i = 0; i < nodes.size(); ++i)
    for (Eigen::Index k = 0; k < omega.size(); ++k)
      m(i, k) = omega[k] * cos(omega[k] * nodes[i]);
  return m;
}

/// Row-wise derivative of A_e: zero first column, then -W_k sin(W_k x_i).
template <typename Derived, typename Scalar = typename Derived::Scalar>
Mat<Scalar> build_A_even_derivative(const Eigen::MatrixBase<Derived>& nodes,
                                    const FrequencySet& fs) {
  using std::sin;
  const Vec<Scalar> omega = frequency_vector<Scalar>(fs);
  Mat<Scalar> m(nodes.size(), omega.size() + 1);
  for (Eigen::Index i = 0; i < nodes.size(); ++i) {
    m(i, 0) = Scalar(0);
    for (Eigen::Index k = 0; k < omega.size(); ++k)
      m(i, k + 1) = -omega[k] * sin(omega[k] * nodes[i]);
  }
  return m;
}

}  // namespace epsr
