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

#include <vector>

#include "rismc/channel.hpp"

namespace rismc {

using Matrix5d = Eigen::Matrix<double, 5, 5>;
using Vector5d = Eigen::Matrix<double, 5, 1>;

// Fisher information for the coupling-aware model over
// zeta = [beta_R, beta_I, p_u^T, s_m^T], s_m the interleaved real/imag
// coupling coefficients. Derivatives are analytic: steering-phase gradients
// for the position block that and the resolvent identity
// dOmega'/ds_i = Omega' A_i Omega' for the coupling block.
struct AwareFimResult {
    Eigen::MatrixXd fim;          // (5 + 2 N_m) square
    double peb_aware = 0.0;       // sqrt(Tr position block of the inverse), meters
    double peb_aware_trace = 0.0; // raw trace, m^2
    double condition = 0.0;       // of the equilibrated FIM
    bool flagged = false;         // condition > 1e12
};
AwareFimResult fim_aware(const SystemSetup& setup, const Position3& ue,
                         const Eigen::VectorXcd& coeffs, Complex gain);

// PEB with the coupling vector known (5-parameter FIM); used by the
// no-mismatch collapse check.
double peb_known_coeffs(const SystemSetup& setup, const Position3& ue,
                        const Eigen::VectorXcd& coeffs, Complex gain);

struct PseudoTrueConfig {
    double cube_side_m = 1.0;   // discrete search cube centered at the truth
    double grid_step_m = 0.1;
    double polish_tol = 1e-9;   // Nelder-Mead simplex tolerance
    int max_polish_evals = 8000;
};

// Pseudo-true parameter of the coupling-free model: the noiseless
// least-squares fit of beta * h~(p) to the exact coupled observation,
// beta concentrated in closed form, position found by cube search plus
// derivative-free polish.
struct PseudoTrueResult {
    Position3 position = Position3::Zero();
    Complex gain{0.0, 0.0};
    Vector5d gamma0 = Vector5d::Zero();
    double mismatch = 0.0;           // |y_c - y_m(gamma0)|
    double mismatch_at_truth = 0.0;  // |y_c - y_m(gamma_bar)|
    bool polished = false;           // false: polish rejected, grid point kept
};
PseudoTrueResult pseudo_true(const SystemSetup& setup, const Position3& ue,
                             const Eigen::VectorXcd& coeffs, Complex gain,
                             const PseudoTrueConfig& cfg);

// Misspecified-bound bundle for one (power, coupling) scenario.
struct BoundReport {
    double power_dbm = 0.0;
    double coeff_norm = 0.0;
    Matrix5d a_matrix = Matrix5d::Zero();
    Matrix5d b_matrix = Matrix5d::Zero();
    Matrix5d mcrb = Matrix5d::Zero();
    Matrix5d bias = Matrix5d::Zero();
    Matrix5d lb = Matrix5d::Zero();
    Vector5d gamma0 = Vector5d::Zero();
    double peb_unaware = 0.0;       // sqrt(Tr position block of LB), meters
    double lb_pos_trace = 0.0;      // raw trace, m^2
    double mcrb_pos_trace = 0.0;
    double bias_norm = 0.0;         // |position part of gamma_bar - gamma0|
    double peb_aware = 0.0;         // from fim_aware at the same scenario
    double peb_aware_known = 0.0;   // coupling vector known
    double condition = 0.0;         // of the equilibrated A matrix
    bool flagged = false;           // singular/ill-conditioned A (pseudo-inverse used)
};

// Assembles A, B, MCRB = A^{-1} B A^{-1}, Bias, LB = MCRB + Bias and both
// PEBs at the pseudo-true parameter. The pseudo-true position is reused;
// the gain component is re-concentrated for the report's power level.
BoundReport mcrb_lb(const SystemSetup& setup, const Position3& ue,
                    const Eigen::VectorXcd& coeffs, Complex gain,
                    const PseudoTrueResult& pt);

struct BoundSweepResult {
    std::vector<BoundReport> cells;             // s-norm major, power minor
    std::vector<PseudoTrueResult> pseudo_true_per_norm;
};

// One report per (power, |s|) pair. The pseudo-true search runs once per
// coupling norm (its position does not depend on the transmit power).
BoundSweepResult bound_sweep(const SystemSetup& setup, const Position3& ue,
                             const Eigen::VectorXcd& coeff_direction,
                             const std::vector<double>& powers_dbm,
                             const std::vector<double>& coeff_norms,
                             const PseudoTrueConfig& cfg);

}  // namespace rismc
