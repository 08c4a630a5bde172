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

#include "rismc/bounds.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "rismc/kernels.hpp"
#include "rismc/optim.hpp"

namespace rismc {

namespace {

// Symmetric positive-definite inverse with diagonal equilibration; returns
// the condition number of the equilibrated matrix. Throws if the matrix is
// numerically singular and pseudo_inverse is false; otherwise clips small
// eigenvalues.
Eigen::MatrixXd spd_inverse(const Eigen::MatrixXd& m, double* condition,
                            bool* flagged, bool pseudo_inverse,
                            const char* what) {
    const Eigen::Index n = m.rows();
    Eigen::VectorXd d(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double v = std::abs(m(i, i));
        d[i] = v > 0.0 ? 1.0 / std::sqrt(v) : 1.0;
    }
    const Eigen::MatrixXd mn = d.asDiagonal() * m * d.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mn);
    if (es.info() != Eigen::Success)
        throw std::runtime_error(std::string(what) + ": eigendecomposition failed");
    const Eigen::VectorXd ev = es.eigenvalues();
    const double emax = ev.cwiseAbs().maxCoeff();
    const double emin = ev.cwiseAbs().minCoeff();
    *condition = emin > 0.0 ? emax / emin : std::numeric_limits<double>::infinity();
    *flagged = *flagged || *condition > 1e12;
    const double floor = 1e-15 * emax;
    Eigen::VectorXd inv_ev(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (std::abs(ev[i]) <= floor) {
            if (!pseudo_inverse)
                throw std::runtime_error(std::string(what) + ": singular matrix");
            *flagged = true;
            inv_ev[i] = 0.0;
        } else {
            inv_ev[i] = 1.0 / ev[i];
        }
    }
    const Eigen::MatrixXd mn_inv =
        es.eigenvectors() * inv_ev.asDiagonal() * es.eigenvectors().transpose();
    return d.asDiagonal() * mn_inv * d.asDiagonal();
}

// Columns of d mu / d zeta for the coupling-aware model, mu = beta h.
Eigen::MatrixXcd aware_jacobian(const SystemSetup& setup, const Position3& ue,
                                const Eigen::VectorXcd& coeffs, Complex gain,
                                int* out_cols) {
    const double k = setup.radio.wavenumber();
    const int n_t = setup.profiles.num_pilots();
    const int n_m = setup.num_mc_coeffs();
    const int n_cols = 5 + 2 * n_m;

    CoupledRisOperator op(setup);
    op.set_coeffs(coeffs);
    const Eigen::VectorXcd a_ue = nf_steering(ue, setup.ris, k);
    const Eigen::VectorXcd h = op.channel(a_ue);
    const Eigen::MatrixXcd v = op.effective_profiles();      // Omega'_t a_bs
    const Eigen::MatrixXcd r = op.apply_effective(a_ue);     // Omega'_t a_ue
    const Eigen::MatrixXcd dh_dp =
        v.transpose() * nf_steering_position_jacobian(ue, setup.ris, k);

    Eigen::MatrixXcd d(n_t, n_cols);
    const Complex j(0.0, 1.0);
    d.col(0) = h;
    d.col(1) = j * h;
    for (int c = 0; c < 3; ++c) d.col(2 + c) = gain * dh_dp.col(c);
    for (int i = 0; i < n_m; ++i) {
        const SparseComplex a_i = setup.supports[static_cast<std::size_t>(i)].cast<Complex>();
        Eigen::VectorXcd g_i(n_t);
        for (int t = 0; t < n_t; ++t)
            g_i[t] = r.col(t).cwiseProduct(a_i * v.col(t)).sum();
        d.col(5 + 2 * i) = gain * g_i;
        d.col(5 + 2 * i + 1) = j * gain * g_i;
    }
    *out_cols = n_cols;
    return d;
}

// Coupling-free model value and analytic position derivatives at p.
struct AssumedModel {
    const SystemSetup& setup;
    Eigen::VectorXcd a_bs;
    std::vector<Position3> elements;
    double k;

    explicit AssumedModel(const SystemSetup& s)
        : setup(s),
          a_bs(s.bs_steering()),
          elements(element_positions(s.ris)),
          k(s.radio.wavenumber()) {}

    Eigen::VectorXcd h(const Position3& p) const {
        return setup.profiles.coeffs.transpose() *
               nf_steering(p, elements, setup.ris.center, k).cwiseProduct(a_bs);
    }
    Eigen::MatrixXcd dh(const Position3& p) const {  // N_t x 3
        Eigen::MatrixXcd jac = nf_steering_position_jacobian(p, setup.ris, k);
        for (int c = 0; c < 3; ++c) jac.col(c) = jac.col(c).cwiseProduct(a_bs);
        return setup.profiles.coeffs.transpose() * jac;
    }
};

}  // namespace

AwareFimResult fim_aware(const SystemSetup& setup, const Position3& ue,
                         const Eigen::VectorXcd& coeffs, Complex gain) {
    int n_cols = 0;
    const Eigen::MatrixXcd d = aware_jacobian(setup, ue, coeffs, gain, &n_cols);
    const double sigma2 = setup.radio.noise_variance_watts();
    AwareFimResult res;
    res.fim = (2.0 / sigma2) * (d.adjoint() * d).real();
    const Eigen::MatrixXd inv =
        spd_inverse(res.fim, &res.condition, &res.flagged, false, "fim_aware");
    res.peb_aware_trace = inv.block(2, 2, 3, 3).trace();
    res.peb_aware = std::sqrt(res.peb_aware_trace);
    return res;
}

double peb_known_coeffs(const SystemSetup& setup, const Position3& ue,
                        const Eigen::VectorXcd& coeffs, Complex gain) {
    int n_cols = 0;
    const Eigen::MatrixXcd d_full =
        aware_jacobian(setup, ue, coeffs, gain, &n_cols);
    const Eigen::MatrixXcd d = d_full.leftCols(5);
    const double sigma2 = setup.radio.noise_variance_watts();
    const Eigen::MatrixXd fim = (2.0 / sigma2) * (d.adjoint() * d).real();
    double cond = 0.0;
    bool flagged = false;
    const Eigen::MatrixXd inv =
        spd_inverse(fim, &cond, &flagged, false, "peb_known_coeffs");
    return std::sqrt(inv.block(2, 2, 3, 3).trace());
}

PseudoTrueResult pseudo_true(const SystemSetup& setup, const Position3& ue,
                             const Eigen::VectorXcd& coeffs, Complex gain,
                             const PseudoTrueConfig& cfg) {
    const Eigen::VectorXcd y_c = gain * cascaded_channel(ue, setup, coeffs);
    AssumedModel model(setup);

    const auto score = [&](const Position3& p) {
        const Eigen::VectorXcd h = model.h(p);
        const double hh = h.squaredNorm();
        return hh > 0.0 ? std::norm(h.dot(y_c)) / hh : 0.0;
    };

    // Discrete cube search centered at the true position.
    const int n_axis =
        static_cast<int>(std::lround(cfg.cube_side_m / cfg.grid_step_m)) + 1;
    const double half = cfg.cube_side_m / 2.0;
    const auto offset = [&](int i) {
        return n_axis == 1 ? 0.0 : -half + cfg.grid_step_m * i;
    };
    const std::ptrdiff_t total =
        static_cast<std::ptrdiff_t>(n_axis) * n_axis * n_axis;
    const ScanResult best = argmax_scan(total, [&](std::ptrdiff_t idx) {
        const int iz = static_cast<int>(idx % n_axis);
        const int iy = static_cast<int>((idx / n_axis) % n_axis);
        const int ix = static_cast<int>(idx / (n_axis * n_axis));
        return score(ue + Position3(offset(ix), offset(iy), offset(iz)));
    });
    const int iz = static_cast<int>(best.index % n_axis);
    const int iy = static_cast<int>((best.index / n_axis) % n_axis);
    const int ix = static_cast<int>(best.index / (n_axis * n_axis));
    Position3 p0 = ue + Position3(offset(ix), offset(iy), offset(iz));

    // Derivative-free polish from the best grid point.
    NelderMeadOptions nm;
    nm.initial_step = cfg.grid_step_m / 5.0;
    nm.x_tol = cfg.polish_tol;
    nm.max_evals = cfg.max_polish_evals;
    const NelderMeadResult polish = nelder_mead_minimize(
        [&](const Eigen::VectorXd& x) {
            return -score(Position3(x[0], x[1], x[2]));
        },
        p0, nm);

    PseudoTrueResult res;
    res.polished = -polish.value >= best.value;
    if (res.polished) p0 = Position3(polish.x[0], polish.x[1], polish.x[2]);

    const Eigen::VectorXcd h0 = model.h(p0);
    res.position = p0;
    res.gain = h0.dot(y_c) / h0.squaredNorm();
    res.gamma0 << res.gain.real(), res.gain.imag(), p0.x(), p0.y(), p0.z();
    res.mismatch = (y_c - res.gain * h0).norm();
    res.mismatch_at_truth = (y_c - gain * model.h(ue)).norm();
    return res;
}

BoundReport mcrb_lb(const SystemSetup& setup, const Position3& ue,
                    const Eigen::VectorXcd& coeffs, Complex gain,
                    const PseudoTrueResult& pt) {
    const double sigma2 = setup.radio.noise_variance_watts();
    const Eigen::VectorXcd y_c = gain * cascaded_channel(ue, setup, coeffs);
    AssumedModel model(setup);

    // Re-concentrate the gain at this report's power level; the pseudo-true
    // position itself is power-independent.
    const Position3 p0 = pt.position;
    const Eigen::VectorXcd h0 = model.h(p0);
    const Complex b0 = h0.dot(y_c) / h0.squaredNorm();
    const Eigen::MatrixXcd dh0 = model.dh(p0);
    const Eigen::VectorXcd resid = y_c - b0 * h0;

    // First derivatives of y_m = beta h~(p) over [beta_R, beta_I, p].
    const Complex j(0.0, 1.0);
    Eigen::MatrixXcd ydot(y_c.size(), 5);
    ydot.col(0) = h0;
    ydot.col(1) = j * h0;
    for (int c = 0; c < 3; ++c) ydot.col(2 + c) = b0 * dh0.col(c);

    // Second derivatives: the beta block vanishes, beta-position blocks are
    // analytic, the position Hessian is a central difference of the analytic
    // first derivatives.
    Eigen::MatrixXcd hess[3][3];
    for (int cj = 0; cj < 3; ++cj) {
        const double step = 1e-5 * std::max(1.0, std::abs(p0[cj]));
        Position3 pp = p0, pm = p0;
        pp[cj] += step;
        pm[cj] -= step;
        const Eigen::MatrixXcd diff = (model.dh(pp) - model.dh(pm)) / (2.0 * step);
        for (int ci = 0; ci < 3; ++ci) hess[ci][cj] = diff.col(ci);
    }

    const auto second = [&](int i, int jdx) -> Eigen::VectorXcd {
        const bool i_beta = i < 2, j_beta = jdx < 2;
        if (i_beta && j_beta) return Eigen::VectorXcd::Zero(y_c.size());
        if (i_beta) {
            const Eigen::VectorXcd base = dh0.col(jdx - 2);
            return i == 0 ? base : (j * base).eval();
        }
        if (j_beta) {
            const Eigen::VectorXcd base = dh0.col(i - 2);
            return jdx == 0 ? base : (j * base).eval();
        }
        // Symmetrized FD Hessian entry.
        return b0 * 0.5 * (hess[i - 2][jdx - 2] + hess[jdx - 2][i - 2]);
    };

    BoundReport rep;
    rep.power_dbm = setup.radio.tx_power_dbm;
    rep.coeff_norm = coeffs.norm();
    rep.gamma0 << b0.real(), b0.imag(), p0.x(), p0.y(), p0.z();

    Vector5d mu_dot;
    for (int i = 0; i < 5; ++i) mu_dot[i] = ydot.col(i).dot(resid).real();

    for (int i = 0; i < 5; ++i) {
        for (int jdx = i; jdx < 5; ++jdx) {
            const double cross = ydot.col(i).dot(ydot.col(jdx)).real();
            const double curv = second(i, jdx).dot(resid).real();
            const double a_ij = (2.0 / sigma2) * (curv - cross);
            const double b_ij =
                (4.0 / (sigma2 * sigma2)) * mu_dot[i] * mu_dot[jdx] +
                (2.0 / sigma2) * cross;
            rep.a_matrix(i, jdx) = rep.a_matrix(jdx, i) = a_ij;
            rep.b_matrix(i, jdx) = rep.b_matrix(jdx, i) = b_ij;
        }
    }

    const Eigen::MatrixXd a_inv = spd_inverse(
        rep.a_matrix, &rep.condition, &rep.flagged, true, "mcrb_lb A matrix");
    rep.mcrb = a_inv * rep.b_matrix * a_inv;

    Vector5d gamma_bar;
    gamma_bar << gain.real(), gain.imag(), ue.x(), ue.y(), ue.z();
    const Vector5d delta = gamma_bar - rep.gamma0;
    rep.bias = delta * delta.transpose();
    rep.lb = rep.mcrb + rep.bias;
    rep.bias_norm = delta.tail<3>().norm();
    rep.mcrb_pos_trace = rep.mcrb.block(2, 2, 3, 3).trace();
    rep.lb_pos_trace = rep.lb.block(2, 2, 3, 3).trace();
    rep.peb_unaware = std::sqrt(std::max(0.0, rep.lb_pos_trace));

    const AwareFimResult aware = fim_aware(setup, ue, coeffs, gain);
    rep.peb_aware = aware.peb_aware;
    rep.peb_aware_known = peb_known_coeffs(setup, ue, coeffs, gain);
    return rep;
}

BoundSweepResult bound_sweep(const SystemSetup& setup, const Position3& ue,
                             const Eigen::VectorXcd& coeff_direction,
                             const std::vector<double>& powers_dbm,
                             const std::vector<double>& coeff_norms,
                             const PseudoTrueConfig& cfg) {
    if (powers_dbm.empty() || coeff_norms.empty())
        throw std::invalid_argument("bound_sweep: empty sweep lists");
    BoundSweepResult out;
    for (const double q : coeff_norms) {
        const Eigen::VectorXcd coeffs = q * coeff_direction;
        SystemSetup ref = setup;
        ref.radio.tx_power_dbm = powers_dbm.front();
        const Complex gain_ref =
            channel_gain(ref.radio, ue, ref.ris.center, ref.bs_position, 0.0)
                .beta;
        const PseudoTrueResult pt = pseudo_true(ref, ue, coeffs, gain_ref, cfg);
        out.pseudo_true_per_norm.push_back(pt);
        for (const double p : powers_dbm) {
            SystemSetup cell = setup;
            cell.radio.tx_power_dbm = p;
            const Complex gain =
                channel_gain(cell.radio, ue, cell.ris.center, cell.bs_position,
                             0.0)
                    .beta;
            out.cells.push_back(mcrb_lb(cell, ue, coeffs, gain, pt));
        }
    }
    return out;
}

}  // namespace rismc
