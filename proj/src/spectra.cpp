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

#include "epsr/spectra.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "epsr/error.hpp"

namespace epsr {

FrequencySet::FrequencySet(std::vector<double> values, double rel_tol)
    : values_(std::move(values)) {
  if (values_.empty()) fail(ErrorKind::validation, "empty frequency set");
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (!std::isfinite(values_[k]) || values_[k] <= 0.0)
      fail(ErrorKind::validation,
           fmt::format("frequency {} is not a finite positive value", k + 1));
    if (k > 0 && values_[k] <= values_[k - 1])
      fail(ErrorKind::validation, "frequencies must be strictly increasing");
  }
  step_ = detect_equidistant(*this, rel_tol);
}

FrequencySet FrequencySet::integers(std::size_t r) {
  std::vector<double> values(r);
  for (std::size_t k = 0; k < r; ++k) values[k] = static_cast<double>(k + 1);
  return FrequencySet(std::move(values));
}

bool FrequencySet::is_integer() const noexcept {
  return step_.has_value() && std::abs(*step_ - 1.0) <= 1e-9;
}

FrequencySet positive_difference_frequencies(
    std::span<const double> eigenvalues, double dedup_tol) {
  if (eigenvalues.empty()) fail(ErrorKind::validation, "empty spectrum");
  if (dedup_tol < 0.0)
    fail(ErrorKind::validation, "dedup tolerance must be nonnegative");

  std::vector<double> lambda(eigenvalues.begin(), eigenvalues.end());
  std::sort(lambda.begin(), lambda.end());
  double scale = 0.0;
  for (double l : lambda) {
    if (!std::isfinite(l)) fail(ErrorKind::validation, "non-finite eigenvalue");
    scale = std::max(scale, std::abs(l));
  }
  if (scale == 0.0) scale = 1.0;
  const double tol = dedup_tol * scale;

  std::vector<double> gaps;
  for (std::size_t i = 0; i < lambda.size(); ++i)
    for (std::size_t j = i + 1; j < lambda.size(); ++j)
      if (lambda[j] - lambda[i] > tol) gaps.push_back(lambda[j] - lambda[i]);
  if (gaps.empty())
    fail(ErrorKind::validation, "constant generator, no frequencies");

  std::sort(gaps.begin(), gaps.end());
  // Cluster representatives are the first (smallest) member of each run.
  std::vector<double> distinct{gaps.front()};
  for (double g : gaps)
    if (g - distinct.back() > tol) distinct.push_back(g);
  return FrequencySet(std::move(distinct));
}

std::optional<double> detect_equidistant(const FrequencySet& fs,
                                         double rel_tol) {
  if (fs.size() == 0) return std::nullopt;
  const double step = fs[0];
  for (std::size_t k = 0; k < fs.size(); ++k) {
    if (std::abs(fs[k] / step - static_cast<double>(k + 1)) > rel_tol)
      return std::nullopt;
  }
  return step;
}

std::pair<FrequencySet, double> rescale_to_integer(const FrequencySet& fs) {
  const auto step = fs.equidistant_step();
  if (!step)
    fail(ErrorKind::validation,
         "frequency set is not equidistant; cannot rescale to integers");
  return {FrequencySet::integers(fs.size()), *step};
}

FrequencySet snap_to_integers(const FrequencySet& fs, double rel_tol) {
  std::vector<double> out = fs.values();
  for (double& v : out) {
    const double k = std::round(v);
    if (k >= 1.0 && std::abs(v - k) <= rel_tol * k) v = k;
  }
  return FrequencySet(std::move(out));
}

}  // namespace epsr
