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

#include "rismc/coupling.hpp"

#include <stdexcept>

namespace rismc {

std::vector<SupportMatrix> build_supports(const RisGeometry& geom, int num_coeffs) {
    if (num_coeffs < 1 || num_coeffs > 3)
        throw std::invalid_argument("build_supports: supported tiers are 1..3");

    const int m1 = geom.rows, m2 = geom.cols;
    const int m = m1 * m2;
    const auto idx = [m2](int i, int j) { return i * m2 + j; };

    std::vector<SupportMatrix> out;
    out.reserve(static_cast<std::size_t>(num_coeffs));

    SupportMatrix self(m, m);
    self.setIdentity();
    out.push_back(std::move(self));

    // Tier offsets within the grid; symmetry is added explicitly.
    const std::pair<int, int> axis[] = {{0, 1}, {1, 0}};
    const std::pair<int, int> diag[] = {{1, 1}, {1, -1}};
    for (int tier = 1; tier < num_coeffs; ++tier) {
        std::vector<Eigen::Triplet<double>> trips;
        for (int i = 0; i < m1; ++i) {
            for (int j = 0; j < m2; ++j) {
                for (const auto& [di, dj] : (tier == 1 ? axis : diag)) {
                    const int ni = i + di, nj = j + dj;
                    if (ni < 0 || ni >= m1 || nj < 0 || nj >= m2) continue;
                    trips.emplace_back(idx(i, j), idx(ni, nj), 1.0);
                    trips.emplace_back(idx(ni, nj), idx(i, j), 1.0);
                }
            }
        }
        SupportMatrix a(m, m);
        a.setFromTriplets(trips.begin(), trips.end());
        out.push_back(std::move(a));
    }
    return out;
}

McModel McModel::make(std::vector<SupportMatrix> supports, Eigen::VectorXcd coeffs) {
    if (static_cast<int>(supports.size()) != coeffs.size())
        throw std::invalid_argument("McModel: coefficient / support count mismatch");
    McModel mc;
    mc.supports = std::move(supports);
    mc.coeffs = std::move(coeffs);
    return mc;
}

SparseComplex scattering_matrix(const McModel& mc) {
    if (mc.supports.empty())
        throw std::invalid_argument("scattering_matrix: no supports");
    const int m = static_cast<int>(mc.supports.front().rows());
    SparseComplex s(m, m);
    for (int i = 0; i < mc.num_coeffs(); ++i)
        s += mc.coeffs[i] * mc.supports[static_cast<std::size_t>(i)].cast<Complex>();
    return s;
}

ProfileApplyResult mc_profile_apply(const Eigen::VectorXcd& omega,
                                    const SparseComplex& scattering,
                                    const Eigen::VectorXcd& rhs) {
    const auto m = omega.size();
    if (scattering.rows() != m || rhs.size() != m)
        throw std::invalid_argument("mc_profile_apply: dimension mismatch");

    // System matrix I - S diag(omega): scale columns of S, subtract from I.
    SparseComplex sys = scattering;
    for (int k = 0; k < sys.outerSize(); ++k)
        for (SparseComplex::InnerIterator it(sys, k); it; ++it)
            it.valueRef() = -it.value() * omega[k];
    SparseComplex eye(m, m);
    eye.setIdentity();
    sys = (eye + sys).eval();

    Eigen::SparseLU<SparseComplex> lu(sys);
    if (lu.info() != Eigen::Success)
        throw std::runtime_error("mc_profile_apply: near-singular coupling system");
    ProfileApplyResult r;
    r.z = lu.solve(rhs);
    if ((sys * r.z - rhs).norm() > 1e-10 * rhs.norm())
        throw std::runtime_error("mc_profile_apply: solve residual too large");
    r.omega_z = omega.cwiseProduct(r.z);
    return r;
}

CoupledProfileSolver::CoupledProfileSolver(int num_elements,
                                           std::vector<SupportMatrix> supports)
    : supports_(std::move(supports)) {
    if (supports_.empty())
        throw std::invalid_argument("CoupledProfileSolver: no supports");
    for (const auto& a : supports_)
        if (a.rows() != num_elements || a.cols() != num_elements)
            throw std::invalid_argument("CoupledProfileSolver: support size mismatch");

    // Union pattern (tier 0 contributes the diagonal). Tier index is encoded
    // in the value; supports are disjoint so the sum keeps it intact.
    SparseComplex pattern(num_elements, num_elements);
    for (std::size_t i = 0; i < supports_.size(); ++i)
        pattern += Complex(static_cast<double>(i + 1), 0.0) *
                   supports_[i].cast<Complex>();
    pattern.makeCompressed();

    slot_tier_.reserve(static_cast<std::size_t>(pattern.nonZeros()));
    slot_col_.reserve(static_cast<std::size_t>(pattern.nonZeros()));
    for (int k = 0; k < pattern.outerSize(); ++k) {
        for (SparseComplex::InnerIterator it(pattern, k); it; ++it) {
            slot_tier_.push_back(static_cast<int>(std::lround(it.value().real())) - 1);
            slot_col_.push_back(static_cast<int>(it.col()));
        }
    }
    system_ = std::move(pattern);
}

Eigen::VectorXcd CoupledProfileSolver::solve(const Eigen::VectorXcd& coeffs,
                                             const Eigen::VectorXcd& omega,
                                             const Eigen::VectorXcd& rhs) {
    if (coeffs.size() != num_coeffs())
        throw std::invalid_argument("CoupledProfileSolver: coefficient count mismatch");
    if (omega.size() != system_.rows() || rhs.size() != system_.rows())
        throw std::invalid_argument("CoupledProfileSolver: dimension mismatch");
    if (coeffs.isZero(0.0)) return rhs;  // S = 0 -> identity system

    Complex* vals = system_.valuePtr();
    const Eigen::Index nnz = system_.nonZeros();
    const int* inner = system_.innerIndexPtr();
    for (Eigen::Index k = 0; k < nnz; ++k) {
        const int col = slot_col_[static_cast<std::size_t>(k)];
        const int tier = slot_tier_[static_cast<std::size_t>(k)];
        Complex v = -coeffs[tier] * omega[col];
        if (inner[k] == col) v += 1.0;
        vals[k] = v;
    }

    if (!analyzed_) {
        lu_.analyzePattern(system_);
        analyzed_ = true;
    }
    lu_.factorize(system_);
    if (lu_.info() != Eigen::Success)
        throw std::runtime_error("CoupledProfileSolver: near-singular coupling system");
    Eigen::VectorXcd z = lu_.solve(rhs);
    if ((system_ * z - rhs).norm() > 1e-10 * rhs.norm())
        throw std::runtime_error("CoupledProfileSolver: solve residual too large");
    return z;
}

}  // namespace rismc
