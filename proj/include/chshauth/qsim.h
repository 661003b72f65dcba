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

// Two-qubit pure-state simulator: the handful of states, measurements and
// Born-rule distributions needed to play CHSH games classically.
//
// Basis order is |00>, |01>, |10>, |11> with the first qubit belonging to
// party A (the Authorizer) and the second to party B (the User).

#ifndef CHSHAUTH_QSIM_H_
#define CHSHAUTH_QSIM_H_

#include <array>
#include <complex>
#include <cstdint>
#include <utility>

namespace chshauth {

using Complex = std::complex<double>;
using Amplitudes = std::array<Complex, 4>;
using Matrix4 = std::array<std::array<Complex, 4>, 4>;

enum class Party : std::uint8_t { kA, kB };

inline constexpr double kNormTolerance = 1e-12;

class TwoQubitPureState {
 public:
  // Throws DomainError unless the amplitudes have unit norm within
  // kNormTolerance.
  static TwoQubitPureState FromAmplitudes(const Amplitudes& amplitudes);

  const Amplitudes& amplitudes() const { return amplitudes_; }
  Complex amplitude(int index) const { return amplitudes_.at(index); }
  double norm_squared() const;

 private:
  explicit TwoQubitPureState(const Amplitudes& amplitudes)
      : amplitudes_(amplitudes) {}

  Amplitudes amplitudes_;
};

// cos(theta)|00> + sin(theta)|11> for theta in [0, pi/4].
TwoQubitPureState make_partially_entangled(double theta);

// (|00> + |11>)/sqrt(2) and (|00> - |11>)/sqrt(2).
TwoQubitPureState bell_phi_plus();
TwoQubitPureState bell_phi_minus();

// Binary projective measurement of n.sigma with n = (sin b, 0, cos b) in the
// x-z plane of the Bloch sphere. Outcome 0 is the +1 eigenvalue.
class MeasurementSetting {
 public:
  MeasurementSetting() : MeasurementSetting(0.0) {}
  explicit MeasurementSetting(double angle);

  // Polar angle from the z axis, normalized to (-pi, pi].
  double angle() const { return angle_; }

  // Real eigenvector of n.sigma for the given outcome bit.
  const std::array<double, 2>& eigenvector(int outcome) const {
    return outcome == 0 ? plus_ : minus_;
  }

  friend bool operator==(const MeasurementSetting& a,
                         const MeasurementSetting& b) {
    return a.angle_ == b.angle_;
  }

 private:
  double angle_;
  std::array<double, 2> plus_;
  std::array<double, 2> minus_;
};

struct JointDistribution {
  // p[2*a + b] = Pr(a, b).
  std::array<double, 4> p{};

  double operator()(int a, int b) const { return p[2 * a + b]; }
  double marginal(Party party, int outcome) const;
  // E = sum_{a,b} (-1)^(a xor b) p(a, b).
  double correlator() const;
};

JointDistribution joint_distribution(const TwoQubitPureState& state,
                                     const MeasurementSetting& setting_a,
                                     const MeasurementSetting& setting_b);

// Inverse-CDF sampling over (0,0), (0,1), (1,0), (1,1); `u` in [0, 1).
std::pair<int, int> sample_pair_outcomes(const JointDistribution& dist,
                                         double u);

// Samples the outcome of the party that is *not* `fixed_party`, conditioned
// on the fixed party having observed `fixed_outcome`. Throws
// std::logic_error when that observation has probability zero.
int conditional_outcome(const TwoQubitPureState& state,
                        const MeasurementSetting& setting_a,
                        const MeasurementSetting& setting_b, Party fixed_party,
                        int fixed_outcome, double u);

// Samples a single party's outcome from its marginal, which does not depend
// on the other party's setting.
int marginal_outcome(const TwoQubitPureState& state, Party party,
                     const MeasurementSetting& setting, double u);

// 2|a00 a11 - a01 a10|.
double concurrence_pure(const TwoQubitPureState& state);

// Wootters concurrence max{0, l1 - l2 - l3 - l4} of a two-qubit density
// matrix, where the l_i are the decreasing square roots of the eigenvalues
// of rho (Y x Y) rho* (Y x Y). Throws DomainError unless rho is Hermitian,
// positive semidefinite and of unit trace (each within 1e-9).
double concurrence_density(const Matrix4& rho);

Matrix4 density_matrix(const TwoQubitPureState& state);

}  // namespace chshauth

#endif  // CHSHAUTH_QSIM_H_
