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

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <complex>
#include <vector>

#include "rismc/geometry.hpp"

namespace rismc {

using Complex = std::complex<double>;
using SupportMatrix = Eigen::SparseMatrix<double>;   // 0/1 entries
using SparseComplex = Eigen::SparseMatrix<Complex>;

// Support matrices A_i of the scattering model S = sum_i s_i A_i, by
// neighbor tier: tier 0 is self-coupling (identity), tier 1 couples
// axis-adjacent elements (center distance = spacing), tier 2 couples
// diagonal neighbors (distance = sqrt(2) * spacing). Tiers are symmetric
// with pairwise disjoint nonzero patterns. num_coeffs must be in {1, 2, 3}.
std::vector<SupportMatrix> build_supports(const RisGeometry& geom, int num_coeffs);

struct McModel {
    std::vector<SupportMatrix> supports;
    Eigen::VectorXcd coeffs;

    // Validates that coeffs and supports have matching lengths.
    static McModel make(std::vector<SupportMatrix> supports, Eigen::VectorXcd coeffs);

    int num_coeffs() const { return static_cast<int>(coeffs.size()); }
};

// S = sum_i s_i A_i (complex symmetric, sparsity = union of the supports).
SparseComplex scattering_matrix(const McModel& mc);

// One MC-affected profile application. Solves (I - S diag(omega)) z = rhs by
// sparse LU and returns both z and Omega' rhs = diag(omega) z, using the
// identity (Omega^{-1} - S)^{-1} = Omega (I - S Omega)^{-1}. Rejects
// near-singular systems (solver failure or residual > 1e-10 |rhs|).
struct ProfileApplyResult {
    Eigen::VectorXcd z;
    Eigen::VectorXcd omega_z;
};
ProfileApplyResult mc_profile_apply(const Eigen::VectorXcd& omega,
                                    const SparseComplex& scattering,
                                    const Eigen::VectorXcd& rhs);

// Repeated-solve machinery for the N_t profile columns: the sparsity
// pattern of (I - S Omega_t) is the same for every pilot and every
// coefficient vector, so the symbolic analysis is done once and only the
// numeric factorization is repeated. Not thread-safe; create one instance
// per worker.
class CoupledProfileSolver {
  public:
    CoupledProfileSolver(int num_elements, std::vector<SupportMatrix> supports);

    int num_coeffs() const { return static_cast<int>(supports_.size()); }

    // Solve (I - S diag(omega)) z = rhs with S = sum_i coeffs[i] A_i.
    // A zero coefficient vector short-circuits to z = rhs.
    Eigen::VectorXcd solve(const Eigen::VectorXcd& coeffs,
                           const Eigen::VectorXcd& omega,
                           const Eigen::VectorXcd& rhs);

  private:
    std::vector<SupportMatrix> supports_;
    SparseComplex system_;            // pattern fixed, values rewritten per solve
    std::vector<int> slot_tier_;      // tier of each stored nonzero, CSC order
    std::vector<int> slot_col_;
    Eigen::SparseLU<SparseComplex> lu_;
    bool analyzed_ = false;
};

}  // namespace rismc
