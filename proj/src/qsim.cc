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

#include "chshauth/qsim.h"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "chshauth/errors.h"
#include "hermitian_eigen.h"

namespace chshauth {

namespace {

constexpr double kDensityTolerance = 1e-9;
// Eigenvalues of rho below this are rounding noise; keeping them would feed
// sqrt(1e-16)-sized errors into the concurrence.
constexpr double kRankTolerance = 256 * DBL_EPSILON;

// sigma_y (x) sigma_y in the computational basis; it is real.
constexpr double kSpinFlip[4][4] = {
    {0, 0, 0, -1}, {0, 0, 1, 0}, {0, 1, 0, 0}, {-1, 0, 0, 0}};

Complex projected_amplitude(const TwoQubitPureState& state,
                            const std::array<double, 2>& ea,
                            const std::array<double, 2>& eb) {
  const Amplitudes& psi = state.amplitudes();
  return ea[0] * (eb[0] * psi[0] + eb[1] * psi[1]) +
         ea[1] * (eb[0] * psi[2] + eb[1] * psi[3]);
}

}  // namespace

TwoQubitPureState TwoQubitPureState::FromAmplitudes(
    const Amplitudes& amplitudes) {
  TwoQubitPureState state(amplitudes);
  if (!(std::abs(state.norm_squared() - 1.0) <= kNormTolerance)) {
    throw DomainError("two-qubit state is not normalized");
  }
  return state;
}

double TwoQubitPureState::norm_squared() const {
  double total = 0.0;
  for (const Complex& a : amplitudes_) total += std::norm(a);
  return total;
}

TwoQubitPureState make_partially_entangled(double theta) {
  constexpr double kSlack = 1e-12;
  if (!(theta >= -kSlack && theta <= std::numbers::pi / 4 + kSlack)) {
    throw DomainError("theta must lie in [0, pi/4]");
  }
  theta = std::clamp(theta, 0.0, std::numbers::pi / 4);
  return TwoQubitPureState::FromAmplitudes(
      {std::cos(theta), 0.0, 0.0, std::sin(theta)});
}

TwoQubitPureState bell_phi_plus() {
  const double h = std::numbers::sqrt2 / 2;
  return TwoQubitPureState::FromAmplitudes({h, 0.0, 0.0, h});
}

TwoQubitPureState bell_phi_minus() {
  const double h = std::numbers::sqrt2 / 2;
  return TwoQubitPureState::FromAmplitudes({h, 0.0, 0.0, -h});
}

MeasurementSetting::MeasurementSetting(double angle) {
  if (!std::isfinite(angle)) throw DomainError("measurement angle not finite");
  angle_ = std::remainder(angle, 2 * std::numbers::pi);
  if (angle_ <= -std::numbers::pi) angle_ = std::numbers::pi;
  const double c = std::cos(angle_ / 2);
  const double s = std::sin(angle_ / 2);
  plus_ = {c, s};
  minus_ = {-s, c};
}

double JointDistribution::marginal(Party party, int outcome) const {
  if (party == Party::kA) return p[2 * outcome] + p[2 * outcome + 1];
  return p[outcome] + p[2 + outcome];
}

double JointDistribution::correlator() const {
  return p[0] - p[1] - p[2] + p[3];
}

JointDistribution joint_distribution(const TwoQubitPureState& state,
                                     const MeasurementSetting& setting_a,
                                     const MeasurementSetting& setting_b) {
  JointDistribution dist;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      dist.p[2 * a + b] = std::norm(projected_amplitude(
          state, setting_a.eigenvector(a), setting_b.eigenvector(b)));
    }
  }
  return dist;
}

std::pair<int, int> sample_pair_outcomes(const JointDistribution& dist,
                                         double u) {
  double cumulative = 0.0;
  int last_supported = 0;
  for (int k = 0; k < 4; ++k) {
    if (dist.p[k] <= 0.0) continue;
    last_supported = k;
    cumulative += dist.p[k];
    if (u < cumulative) return {k >> 1, k & 1};
  }
  // Only reachable when the entries sum to slightly less than one.
  return {last_supported >> 1, last_supported & 1};
}

int marginal_outcome(const TwoQubitPureState& state, Party party,
                     const MeasurementSetting& setting, double u) {
  const MeasurementSetting z;
  const JointDistribution dist = party == Party::kA
                                     ? joint_distribution(state, setting, z)
                                     : joint_distribution(state, z, setting);
  return u < dist.marginal(party, 0) ? 0 : 1;
}

int conditional_outcome(const TwoQubitPureState& state,
                        const MeasurementSetting& setting_a,
                        const MeasurementSetting& setting_b, Party fixed_party,
                        int fixed_outcome, double u) {
  const JointDistribution dist =
      joint_distribution(state, setting_a, setting_b);
  const double marginal = dist.marginal(fixed_party, fixed_outcome);
  if (!(marginal > 0.0)) {
    throw std::logic_error("conditioning on a zero-probability outcome");
  }
  const double joint_zero = fixed_party == Party::kA ? dist(fixed_outcome, 0)
                                                     : dist(0, fixed_outcome);
  return u < joint_zero / marginal ? 0 : 1;
}

double concurrence_pure(const TwoQubitPureState& state) {
  const Amplitudes& a = state.amplitudes();
  return std::min(1.0, 2.0 * std::abs(a[0] * a[3] - a[1] * a[2]));
}

Matrix4 density_matrix(const TwoQubitPureState& state) {
  Matrix4 rho{};
  const Amplitudes& a = state.amplitudes();
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) rho[i][j] = a[i] * std::conj(a[j]);
  }
  return rho;
}

double concurrence_density(const Matrix4& rho) {
  using internal::SquareMatrix;

  Complex trace = 0.0;
  SquareMatrix hermitian(4);
  for (int i = 0; i < 4; ++i) {
    trace += rho[i][i];
    for (int j = 0; j < 4; ++j) {
      if (std::abs(rho[i][j] - std::conj(rho[j][i])) > kDensityTolerance) {
        throw DomainError("density matrix is not Hermitian");
      }
      hermitian(i, j) = 0.5 * (rho[i][j] + std::conj(rho[j][i]));
    }
  }
  if (std::abs(trace - 1.0) > kDensityTolerance) {
    throw DomainError("density matrix does not have unit trace");
  }

  const internal::HermitianEigen eig = internal::hermitian_eigen(hermitian);
  if (eig.values.back() < -kDensityTolerance) {
    throw DomainError("density matrix is not positive semidefinite");
  }

  // rho = W W^dagger with columns w_j = sqrt(p_j) v_j. The square roots of
  // the eigenvalues of rho rho~ are the singular values of tau = W^T Y W.
  std::size_t rank = 0;
  while (rank < 4 && eig.values[rank] > kRankTolerance) ++rank;
  if (rank == 0) throw DomainError("density matrix is zero");

  std::array<std::array<Complex, 4>, 4> w{};
  for (std::size_t j = 0; j < rank; ++j) {
    const double scale = std::sqrt(eig.values[j]);
    for (std::size_t i = 0; i < 4; ++i) w[i][j] = scale * eig.vectors(i, j);
  }

  // Singular values of tau are the non-negative eigenvalues of the Hermitian
  // dilation [[0, tau], [tau^dagger, 0]]; this avoids squaring tau.
  SquareMatrix dilation(2 * rank);
  for (std::size_t i = 0; i < rank; ++i) {
    for (std::size_t j = 0; j < rank; ++j) {
      Complex tau = 0.0;
      for (int k = 0; k < 4; ++k) {
        for (int l = 0; l < 4; ++l) {
          if (kSpinFlip[k][l] != 0.0) tau += w[k][i] * kSpinFlip[k][l] * w[l][j];
        }
      }
      dilation(i, rank + j) = tau;
      dilation(rank + j, i) = std::conj(tau);
    }
  }
  const internal::HermitianEigen singular = internal::hermitian_eigen(dilation);

  double result = std::max(0.0, singular.values[0]);
  for (std::size_t k = 1; k < rank; ++k) {
    result -= std::max(0.0, singular.values[k]);
  }
  return std::clamp(result, 0.0, 1.0);
}

}  // namespace chshauth
