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

#include "epsr/trigpoly.hpp"

#include <algorithm>
#include <random>
#include <vector>

#include <fmt/format.h>

#include "epsr/epsr.hpp"

namespace epsr {

TrigPolyd random_trigpoly(const FrequencySet& fs, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  const auto r = static_cast<Eigen::Index>(fs.size());
  const double a0 = coeff(rng);
  Eigen::VectorXd a(r), b(r);
  for (Eigen::Index k = 0; k < r; ++k) a[k] = coeff(rng);
  for (Eigen::Index k = 0; k < r; ++k) b[k] = coeff(rng);
  return make_trigpoly(fs, a0, std::move(a), std::move(b));
}

TrigPolyd fit_from_samples(const FrequencySet& fs, std::span<const double> xs,
                           std::span<const double> ys) {
  const auto r = static_cast<Eigen::Index>(fs.size());
  const Eigen::Index n = 2 * r + 1;
  if (static_cast<Eigen::Index>(xs.size()) != n ||
      static_cast<Eigen::Index>(ys.size()) != n)
    fail(ErrorKind::validation,
         fmt::format("fitting needs exactly 2r+1 = {} samples", n));

  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i] == sorted[i - 1])
      fail(ErrorKind::numerical,
           fmt::format("duplicate sample abscissa x = {}", sorted[i]));

  const Eigen::Map<const Eigen::VectorXd> x(xs.data(), n);
  const Eigen::Map<const Eigen::VectorXd> y(ys.data(), n);
  const Eigen::VectorXd omega = frequency_vector<double>(fs);

  // Columns [1, cos(W_k x) | sin(W_k x)]: the even block recovers z_e, the
  // odd block z_o.
  Eigen::MatrixXd joint(n, n);
  joint.leftCols(r + 1) = cosine_block(x, omega);
  joint.rightCols(r) = sine_block(x, omega);

  const RuleDiagnostics diag = diagnose(joint);
  if (!diag.nonsingular)
    throw SingularNodesError(
        fmt::format("sample abscissae give a singular interpolation system "
                    "(condition estimate {:.3e}); nodes must not alias "
                    "under the frequency set",
                    diag.condition_estimate),
        diag);

  const Eigen::VectorXd z = joint.fullPivLu().solve(y);
  TrigPolyd p = make_trigpoly(fs, z[0], Eigen::VectorXd(z.segment(1, r)),
                              Eigen::VectorXd(z.tail(r)));
  const double scale = std::max(1.0, y.cwiseAbs().maxCoeff());
  if (fit_residual(p, xs, ys) > 1e-8 * scale)
    throw SingularNodesError("interpolation residual too large", diag);
  return p;
}

double fit_residual(const TrigPolyd& p, std::span<const double> xs,
                    std::span<const double> ys) {
  double worst = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i)
    worst = std::max(worst, std::abs(evaluate(p, xs[i]) - ys[i]));
  return worst;
}

}  // namespace epsr
