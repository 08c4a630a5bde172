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
#include "rismc/optim.hpp"

namespace rismc {

struct EstimatorConfig {
    // Coarse AOD grid over the front hemisphere, theta in (0, pi/2],
    // phi in (-pi/2, pi/2], theta-major ordering.
    double aod_step_theta_rad = 2.0 * std::numbers::pi / 180.0;
    double aod_step_phi_rad = 2.0 * std::numbers::pi / 180.0;

    // Coarse 1D distance grid: log-spaced points covering
    // [min_factor * Fresnel bound, max_factor * Fraunhofer distance].
    int distance_grid_points = 200;
    double distance_min_factor = 0.5;
    double distance_max_factor = 1.2;

    // Refinement: stop when the largest parameter update in an outer
    // iteration falls below convergence_eps, or after max_outer_iters.
    double convergence_eps = 1e-15;
    int max_outer_iters = 50;

    bool estimate_mc = true;
    double mc_norm_bound = 0.5;  // |s| clip during the MC block

    AscentOptions inner;  // per-block quasi-Newton settings

    void validate() const;
};

// Precomputed coarse AOD dictionary: normalized assumed-model responses
// c(psi_i) = W^T (a_ff(psi_i) .* a_ff(psi_bs)) / |.| for every grid angle.
struct CoarseAodDictionary {
    std::vector<Aod2D> grid;
    Eigen::MatrixXcd columns;  // N_t x N_c, unit-norm columns

    int size() const { return static_cast<int>(grid.size()); }
};

CoarseAodDictionary build_aod_dictionary(const SystemSetup& setup,
                                         const EstimatorConfig& cfg);
// Serial reference used by the equivalence tests and the benchmark.
CoarseAodDictionary build_aod_dictionary_serial(const SystemSetup& setup,
                                                const EstimatorConfig& cfg);

struct CoarseAodResult {
    Aod2D aod;
    std::ptrdiff_t index = -1;
    double score = 0.0;
};

// argmax_i |c_i^H y| over the dictionary; ties break toward the lowest index.
CoarseAodResult coarse_aod(const Eigen::VectorXcd& y,
                           const CoarseAodDictionary& dict);
CoarseAodResult coarse_aod_serial(const Eigen::VectorXcd& y,
                                  const CoarseAodDictionary& dict);

std::vector<double> distance_grid(const SystemSetup& setup,
                                  const EstimatorConfig& cfg);

// 1D grid search over the UE-RIS distance at a fixed AOD, scoring the
// coupling-free near-field channel against y.
double coarse_distance(const Eigen::VectorXcd& y, const Aod2D& aod,
                       const SystemSetup& setup, const EstimatorConfig& cfg);

struct CoarseMcResult {
    Eigen::VectorXcd coeffs;
    bool ill_conditioned = false;  // rank-deficient LS; coeffs forced to zero
};

// Closed-form coupling initialization: least squares on the first-order
// response, s = G^+ (y / beta - h~), with beta concentrated on h~.
CoarseMcResult coarse_mc(const Eigen::VectorXcd& y, const Aod2D& aod,
                         double distance, const SystemSetup& setup);

// Concentrated-likelihood objective |h^H y|^2 / |h|^2 with the exact
// coupled channel h(aod, distance, coeffs).
double jlmc_objective(const Eigen::VectorXcd& y, const Aod2D& aod,
                      double distance, const Eigen::VectorXcd& coeffs,
                      const SystemSetup& setup);

struct JlmcEstimate {
    Aod2D aod;
    double distance = 0.0;
    Eigen::VectorXcd mc_coeffs;
    Complex gain{0.0, 0.0};
    Position3 position = Position3::Zero();
    std::vector<double> objective_trace;  // initial value, then one entry per block update
    int iterations = 0;                   // outer iterations run
    bool converged = false;
    bool init_ill_conditioned = false;
};

// Alternating block refinement (AOD pair / distance / MC vector), each block
// a quasi-Newton ascent on the exact-coupling objective; block results that
// do not improve the objective are rejected, so the trace is non-decreasing.
JlmcEstimate refine(const Eigen::VectorXcd& y, const Aod2D& aod0, double d0,
                    const Eigen::VectorXcd& s0, const SystemSetup& setup,
                    const EstimatorConfig& cfg);

// Full pipeline: coarse AOD -> coarse distance -> coarse MC -> refinement ->
// position reconstruction.
JlmcEstimate jlmc(const Eigen::VectorXcd& y, const SystemSetup& setup,
                  const EstimatorConfig& cfg, const CoarseAodDictionary& dict);

// Baseline that assumes no coupling: same pipeline with the MC vector frozen
// at zero and the MC block skipped.
JlmcEstimate mc_unaware_estimate(const Eigen::VectorXcd& y,
                                 const SystemSetup& setup,
                                 const EstimatorConfig& cfg,
                                 const CoarseAodDictionary& dict);

}  // namespace rismc
