// SPDX-License-Identifier: Apache-2.0
//
// rismc - near-field RIS-assisted localization under element mutual coupling
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <cstdint>
#include <vector>

#include "rismc/coupling.hpp"
#include "rismc/geometry.hpp"
#include "rismc/radio.hpp"

namespace rismc {

// Controlled RIS phase profiles, one column per pilot transmission.
struct RisProfileSet {
    Eigen::MatrixXd phases;   // M_r x N_t, radians in [-pi, pi]
    Eigen::MatrixXcd coeffs;  // W with [W]_{n,t} = exp(j phases(n,t))

    static RisProfileSet from_phases(const Eigen::MatrixXd& phases);
    // Phases i.i.d. uniform on [-pi, pi], element-major per transmission.
    static RisProfileSet random(int num_elements, int num_pilots, std::uint64_t seed);

    int num_elements() const { return static_cast<int>(coeffs.rows()); }
    int num_pilots() const { return static_cast<int>(coeffs.cols()); }
};

// Near-field steering vector, [a(p)]_n = exp(-jk(|p - p_n| - |p - center|)).
// Throws if p coincides with the center or any element.
Eigen::VectorXcd nf_steering(const Position3& p, const RisGeometry& geom,
                             double wavenumber);
// Variant over precomputed global element positions (hot paths).
Eigen::VectorXcd nf_steering(const Position3& p,
                             const std::vector<Position3>& elements,
                             const Position3& center, double wavenumber);

// d a(p) / d p as an M_r x 3 matrix:
// [da]_n = [a]_n * (-jk) * ((p - p_n)/|p - p_n| - (p - center)/|p - center|).
Eigen::MatrixXcd nf_steering_position_jacobian(const Position3& p,
                                               const RisGeometry& geom,
                                               double wavenumber);

// Far-field approximation, [a(psi)]_n = exp(jk p_local_n . u(psi));
// depends on the angle only.
Eigen::VectorXcd ff_steering(const Aod2D& aod, const RisGeometry& geom,
                             double wavenumber);

// Everything the receiver knows a priori: radio parameters, geometry, the BS
// anchor, the commanded profiles, and the MC support structure (coefficient
// values are unknown).
struct SystemSetup {
    RadioConfig radio;
    RisGeometry ris;
    Position3 bs_position = Position3::Zero();
    RisProfileSet profiles;
    std::vector<SupportMatrix> supports;

    int num_mc_coeffs() const { return static_cast<int>(supports.size()); }
    Eigen::VectorXcd bs_steering() const;
};

// Effective RIS response columns V[:,t] = Omega'_t a(p_b) for a given
// coefficient vector, cached so that evaluating the channel at a candidate
// UE position costs one steering vector and one dense product:
// h(p) = V^T a(p).
class CoupledRisOperator {
  public:
    explicit CoupledRisOperator(const SystemSetup& setup);

    void set_coeffs(const Eigen::VectorXcd& coeffs);
    const Eigen::VectorXcd& coeffs() const { return coeffs_; }

    // V, M_r x N_t.
    const Eigen::MatrixXcd& effective_profiles() const { return v_; }

    // h with [h]_t = a_ue^T V[:,t].
    Eigen::VectorXcd channel(const Eigen::VectorXcd& a_ue) const {
        return v_.transpose() * a_ue;
    }

    // Columns Omega'_t rhs for an arbitrary right-hand side (Omega' is
    // complex symmetric, so this also gives rhs^T Omega'_t as rows).
    Eigen::MatrixXcd apply_effective(const Eigen::VectorXcd& rhs);

  private:
    const SystemSetup& setup_;
    CoupledProfileSolver solver_;
    Eigen::VectorXcd a_bs_;
    Eigen::VectorXcd coeffs_;
    Eigen::MatrixXcd v_;
};

// Exact cascaded channel [h]_t = a(p_ue)^T Omega'_t a(p_b).
Eigen::VectorXcd cascaded_channel(const Position3& ue, const SystemSetup& setup,
                                  const Eigen::VectorXcd& coeffs);

// Coupling-free channel h~ = W^T (a(p_ue) .* a(p_b)).
Eigen::VectorXcd mcfree_channel(const Position3& ue, const SystemSetup& setup);

// First-order (Neumann) coupling response, [G]_{t,i} =
// a(p_ue)^T Omega_t A_i Omega_t a(p_b); h ~= h~ + G s for small |s|.
Eigen::MatrixXcd neumann_gain_matrix(const Position3& ue, const SystemSetup& setup);

// Overall channel gain beta = lambda^2 sqrt(P G_t G_r) e^{j phi} /
// (16 pi^2 |p_ue - p_ris| |p_ris - p_bs|), P in watts.
struct ChannelGain {
    Complex beta;
    double phase_offset = 0.0;
};
ChannelGain channel_gain(const RadioConfig& radio, const Position3& ue,
                         const Position3& ris_center, const Position3& bs,
                         double phase_offset);

struct Observation {
    Eigen::VectorXcd y;
    double noise_var = 0.0;  // per-sample complex variance
    Position3 true_position = Position3::Zero();
    Eigen::VectorXcd true_coeffs;
    Complex true_gain{0.0, 0.0};
    std::uint64_t seed = 0;
};

// y = beta h + n with n i.i.d. CN(0, sigma^2). The stream draws the global
// phase offset first (uniform on [0, 2pi)), then the pilot noise in order.
// Deterministic given the seed.
Observation simulate_observation(const SystemSetup& setup, const Position3& ue,
                                 const Eigen::VectorXcd& coeffs,
                                 std::uint64_t seed);

}  // namespace rismc
