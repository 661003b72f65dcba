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

#ifndef CHSHAUTH_SRC_HERMITIAN_EIGEN_H_
#define CHSHAUTH_SRC_HERMITIAN_EIGEN_H_

#include <complex>
#include <cstddef>
#include <vector>

namespace chshauth::internal {

// Dense row-major square complex matrix, sized for the handful of 4x4 and
// 8x8 problems concurrence needs.
class SquareMatrix {
 public:
  explicit SquareMatrix(std::size_t n) : n_(n), data_(n * n) {}

  std::size_t size() const { return n_; }
  std::complex<double>& operator()(std::size_t r, std::size_t c) {
    return data_[r * n_ + c];
  }
  const std::complex<double>& operator()(std::size_t r, std::size_t c) const {
    return data_[r * n_ + c];
  }

 private:
  std::size_t n_;
  std::vector<std::complex<double>> data_;
};

struct HermitianEigen {
  // Sorted in decreasing order.
  std::vector<double> values;
  // Column j is the unit eigenvector for values[j].
  SquareMatrix vectors{0};
};

// Cyclic complex Jacobi diagonalization. Only the upper triangle is trusted
// to be consistent with the lower one; callers validate Hermiticity.
HermitianEigen hermitian_eigen(SquareMatrix a);

}  // namespace chshauth::internal

#endif  // CHSHAUTH_SRC_HERMITIAN_EIGEN_H_
