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
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace epsr {

/// Default relative tolerance for merging near-equal eigenvalue gaps.
inline constexpr double kDefaultDedupTol = 1e-9;

/// Sorted, strictly increasing positive frequencies of a cost slice. When
/// every frequency is an integer multiple k*step of the first one the step is
/// recorded; downstream code uses it to decide whether the slice is periodic.
class FrequencySet {
 public:
  FrequencySet() = default;

  /// Validates ordering and positivity and probes for equidistance with
  /// `rel_tol`. Throws a validation error on malformed input.
  explicit FrequencySet(std::vector<double> values, double rel_tol = 1e-9);

  static FrequencySet integers(std::size_t r);

  const std::vector<double>& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t k) const { return values_[k]; }
  double max() const { return values_.back(); }

  const std::optional<double>& equidistant_step() const noexcept {
    return step_;
  }

  /// True when the set is {1, 2, ..., r} up to the equidistance tolerance,
  /// i.e. the slice is 2*pi periodic.
  bool is_integer() const noexcept;

 private:
  std::vector<double> values_;
  std::optional<double> step_;
};

/// All distinct positive gaps |l_j - l_i| of a Hermitian generator spectrum.
/// Gaps are merged when closer than dedup_tol * max|l| (or dedup_tol when
/// the spectrum is all zero).
FrequencySet positive_difference_frequencies(
    std::span<const double> eigenvalues, double dedup_tol = kDefaultDedupTol);

/// Returns the step W when |W_k / W_1 - k| <= rel_tol for every k.
std::optional<double> detect_equidistant(const FrequencySet& fs,
                                         double rel_tol = 1e-9);

/// Maps an equidistant set {W, 2W, ..., rW} to {1, ..., r} and returns W.
/// A slice g(y) = f(y / W) then has integer frequencies and
/// f^(d)(x) = W^d g^(d)(W x).
std::pair<FrequencySet, double> rescale_to_integer(const FrequencySet& fs);

/// Rounds entries lying within rel_tol of a positive integer. Generator
/// spectra of Pauli rotations are half-integers, so their gaps come out of the
/// eigensolver as integers up to roundoff.
FrequencySet snap_to_integers(const FrequencySet& fs, double rel_tol = 1e-9);

}  // namespace epsr
