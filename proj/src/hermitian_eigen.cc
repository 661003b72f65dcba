// Copyright 2026 The chshauth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hermitian_eigen.h"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace chshauth::internal {

namespace {

constexpr int kMaxSweeps = 100;

double off_diagonal_norm2(const SquareMatrix& a) {
  double off = 0.0;
  for (std::size_t p = 0; p < a.size(); ++p) {
    for (std::size_t q = p + 1; q < a.size(); ++q) off += std::norm(a(p, q));
  }
  return off;
}

}  // namespace

HermitianEigen hermitian_eigen(SquareMatrix a) {
  const std::size_t n = a.size();
  SquareMatrix v(n);
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    v(i, i) = 1.0;
    for (std::size_t j = 0; j < n; ++j) scale += std::norm(a(i, j));
  }

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    if (off_diagonal_norm2(a) <= 1e-34 * scale) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const std::complex<double> apq = a(p, q);
        const double r = std::abs(apq);
        if (r == 0.0) continue;
        const std::complex<double> phase_conj = std::conj(apq / r);
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double tau = (aqq - app) / (2.0 * r);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        // U restricted to (p, q); A <- U^dagger A U, V <- V U.
        const std::complex<double> upp = c;
        const std::complex<double> upq = s;
        const std::complex<double> uqp = -s * phase_conj;
        const std::complex<double> uqq = c * phase_conj;

        for (std::size_t k = 0; k < n; ++k) {
          const auto akp = a(k, p);
          const auto akq = a(k, q);
          a(k, p) = akp * upp + akq * uqp;
          a(k, q) = akp * upq + akq * uqq;
          const auto vkp = v(k, p);
          const auto vkq = v(k, q);
          v(k, p) = vkp * upp + vkq * uqp;
          v(k, q) = vkp * upq + vkq * uqq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const auto apk = a(p, k);
          const auto aqk = a(q, k);
          a(p, k) = std::conj(upp) * apk + std::conj(uqp) * aqk;
          a(q, k) = std::conj(upq) * apk + std::conj(uqq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return a(i, i).real() > a(j, j).real();
  });

  HermitianEigen result;
  result.values.reserve(n);
  result.vectors = SquareMatrix(n);
  for (std::size_t j = 0; j < n; ++j) {
    result.values.push_back(a(order[j], order[j]).real());
    for (std::size_t i = 0; i < n; ++i) result.vectors(i, j) = v(i, order[j]);
  }
  return result;
}

}  // namespace chshauth::internal
