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

#include "rismc/estimator.hpp"

#include <cmath>
#include <stdexcept>

#include "rismc/kernels.hpp"

namespace rismc {

namespace {

double concentrated_score(const Eigen::VectorXcd& h, const Eigen::VectorXcd& y) {
    const double hh = h.squaredNorm();
    if (!(hh > 0.0))
        throw std::runtime_error("concentrated objective: zero channel norm");
    return std::norm(h.dot(y)) / hh;  // h.dot(y) = h^H y
}

std::vector<Aod2D> make_aod_grid(const EstimatorConfig& cfg) {
    const double half_pi = std::numbers::pi / 2.0;
    std::vector<Aod2D> grid;
    for (int i = 1; i * cfg.aod_step_theta_rad <= half_pi + 1e-12; ++i) {
        const double theta = i * cfg.aod_step_theta_rad;
        for (int j = 1; -half_pi + j * cfg.aod_step_phi_rad <= half_pi + 1e-12; ++j)
            grid.push_back({theta, -half_pi + j * cfg.aod_step_phi_rad});
    }
    return grid;
}

CoarseAodDictionary build_dictionary_impl(const SystemSetup& setup,
                                          const EstimatorConfig& cfg,
                                          bool parallel) {
    CoarseAodDictionary dict;
    dict.grid = make_aod_grid(cfg);
    const double k = setup.radio.wavenumber();
    const Aod2D bs_aod = aod_from_position(setup.bs_position, setup.ris).aod;
    const Eigen::VectorXcd a_bs_ff = ff_steering(bs_aod, setup.ris, k);
    const int n_c = dict.size();
    dict.columns.resize(setup.profiles.num_pilots(), n_c);

    const auto fill = [&](std::ptrdiff_t i) {
        const Eigen::VectorXcd b =
            ff_steering(dict.grid[static_cast<std::size_t>(i)], setup.ris, k)
                .cwiseProduct(a_bs_ff);
        Eigen::VectorXcd c = setup.profiles.coeffs.transpose() * b;
        const double nrm = c.norm();
        if (!(nrm > 0.0))
            throw std::runtime_error("build_aod_dictionary: zero-norm column");
        dict.columns.col(i) = c / nrm;
    };
    if (parallel)
        parallel_for(n_c, fill);
    else
        for (std::ptrdiff_t i = 0; i < n_c; ++i) fill(i);
    return dict;
}

CoarseAodResult coarse_aod_impl(const Eigen::VectorXcd& y,
                                const CoarseAodDictionary& dict, bool parallel) {
    if (dict.size() == 0)
        throw std::invalid_argument("coarse_aod: empty dictionary");
    const auto score = [&](std::ptrdiff_t i) {
        return std::abs(dict.columns.col(i).dot(y));
    };
    const ScanResult r = parallel ? argmax_scan(dict.size(), score)
                                  : argmax_scan_serial(dict.size(), score);
    return {dict.grid[static_cast<std::size_t>(r.index)], r.index, r.value};
}

// Shared state for the refinement blocks. The effective-profile matrix V(s)
// is cached in the operator, so position-block evaluations cost one steering
// vector; MC-block evaluations rebuild V through the shared factorization.
class RefineWorkspace {
  public:
    RefineWorkspace(const Eigen::VectorXcd& y, const SystemSetup& setup)
        : y_(y),
          setup_(setup),
          op_(setup),
          elements_(element_positions(setup.ris)),
          k_(setup.radio.wavenumber()) {}

    CoupledRisOperator& op() { return op_; }

    void commit_coeffs(const Eigen::VectorXcd& coeffs) {
        if ((op_.coeffs() - coeffs).isZero(0.0)) return;
        op_.set_coeffs(coeffs);
    }

    double eval_position(const Aod2D& aod, double distance) const {
        const Position3 p =
            position_from_spherical({aod, distance}, setup_.ris);
        return concentrated_score(
            op_.channel(nf_steering(p, elements_, setup_.ris.center, k_)), y_);
    }

    double eval_coeffs(const Eigen::VectorXcd& coeffs, const Position3& p) {
        op_.set_coeffs(coeffs);
        return concentrated_score(
            op_.channel(nf_steering(p, elements_, setup_.ris.center, k_)), y_);
    }

    Eigen::VectorXcd channel_at(const Aod2D& aod, double distance) const {
        const Position3 p =
            position_from_spherical({aod, distance}, setup_.ris);
        return op_.channel(nf_steering(p, elements_, setup_.ris.center, k_));
    }

  private:
    const Eigen::VectorXcd& y_;
    const SystemSetup& setup_;
    CoupledRisOperator op_;
    std::vector<Position3> elements_;
    double k_;
};

Eigen::VectorXd interleave(const Eigen::VectorXcd& s) {
    Eigen::VectorXd x(2 * s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        x[2 * i] = s[i].real();
        x[2 * i + 1] = s[i].imag();
    }
    return x;
}

Eigen::VectorXcd deinterleave(const Eigen::VectorXd& x) {
    Eigen::VectorXcd s(x.size() / 2);
    for (Eigen::Index i = 0; i < s.size(); ++i) s[i] = {x[2 * i], x[2 * i + 1]};
    return s;
}

}  // namespace

void EstimatorConfig::validate() const {
    if (!(aod_step_theta_rad > 0.0) || !(aod_step_phi_rad > 0.0))
        throw std::invalid_argument("EstimatorConfig: AOD grid steps must be positive");
    if (distance_grid_points < 1)
        throw std::invalid_argument("EstimatorConfig: distance grid must be nonempty");
    if (!(convergence_eps > 0.0))
        throw std::invalid_argument("EstimatorConfig: convergence_eps must be positive");
    if (max_outer_iters < 1)
        throw std::invalid_argument("EstimatorConfig: max_outer_iters must be >= 1");
}

CoarseAodDictionary build_aod_dictionary(const SystemSetup& setup,
                                         const EstimatorConfig& cfg) {
    return build_dictionary_impl(setup, cfg, true);
}

CoarseAodDictionary build_aod_dictionary_serial(const SystemSetup& setup,
                                                const EstimatorConfig& cfg) {
    return build_dictionary_impl(setup, cfg, false);
}

CoarseAodResult coarse_aod(const Eigen::VectorXcd& y,
                           const CoarseAodDictionary& dict) {
    return coarse_aod_impl(y, dict, true);
}

CoarseAodResult coarse_aod_serial(const Eigen::VectorXcd& y,
                                  const CoarseAodDictionary& dict) {
    return coarse_aod_impl(y, dict, false);
}

std::vector<double> distance_grid(const SystemSetup& setup,
                                  const EstimatorConfig& cfg) {
    const double lambda = setup.radio.wavelength();
    const double lo = cfg.distance_min_factor * fresnel_distance(setup.ris, lambda);
    const double hi = cfg.distance_max_factor * fraunhofer_distance(setup.ris, lambda);
    const int n = cfg.distance_grid_points;
    std::vector<double> grid(static_cast<std::size_t>(n));
    if (n == 1) {
        grid[0] = lo;
        return grid;
    }
    const double log_lo = std::log(lo), log_hi = std::log(hi);
    for (int i = 0; i < n; ++i)
        grid[static_cast<std::size_t>(i)] =
            std::exp(log_lo + (log_hi - log_lo) * i / (n - 1.0));
    return grid;
}

double coarse_distance(const Eigen::VectorXcd& y, const Aod2D& aod,
                       const SystemSetup& setup, const EstimatorConfig& cfg) {
    const std::vector<double> grid = distance_grid(setup, cfg);
    if (grid.empty()) throw std::invalid_argument("coarse_distance: empty grid");
    const double k = setup.radio.wavenumber();
    const Eigen::VectorXcd a_bs = setup.bs_steering();
    const std::vector<Position3> elems = element_positions(setup.ris);
    const auto score = [&](std::ptrdiff_t i) {
        const Position3 p = position_from_spherical(
            {aod, grid[static_cast<std::size_t>(i)]}, setup.ris);
        const Eigen::VectorXcd h =
            setup.profiles.coeffs.transpose() *
            nf_steering(p, elems, setup.ris.center, k).cwiseProduct(a_bs);
        return concentrated_score(h, y);
    };
    const ScanResult r =
        argmax_scan(static_cast<std::ptrdiff_t>(grid.size()), score);
    return grid[static_cast<std::size_t>(r.index)];
}

CoarseMcResult coarse_mc(const Eigen::VectorXcd& y, const Aod2D& aod,
                         double distance, const SystemSetup& setup) {
    const int n_m = setup.num_mc_coeffs();
    CoarseMcResult res;
    res.coeffs = Eigen::VectorXcd::Zero(n_m);

    const Position3 p = position_from_spherical({aod, distance}, setup.ris);
    const Eigen::VectorXcd h_free = mcfree_channel(p, setup);
    const double hh = h_free.squaredNorm();
    if (!(hh > 0.0)) throw std::runtime_error("coarse_mc: zero channel norm");
    const Complex beta = h_free.dot(y) / hh;
    if (std::abs(beta) == 0.0) {
        res.ill_conditioned = true;
        return res;
    }

    const Eigen::MatrixXcd g = neumann_gain_matrix(p, setup);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(g);
    if (qr.rank() < n_m) {
        res.ill_conditioned = true;  // keep s = 0
        return res;
    }
    res.coeffs = qr.solve((y / beta - h_free).matrix());
    return res;
}

double jlmc_objective(const Eigen::VectorXcd& y, const Aod2D& aod,
                      double distance, const Eigen::VectorXcd& coeffs,
                      const SystemSetup& setup) {
    const Position3 p = position_from_spherical({aod, distance}, setup.ris);
    return concentrated_score(cascaded_channel(p, setup, coeffs), y);
}

JlmcEstimate refine(const Eigen::VectorXcd& y, const Aod2D& aod0, double d0,
                    const Eigen::VectorXcd& s0, const SystemSetup& setup,
                    const EstimatorConfig& cfg) {
    RefineWorkspace ws(y, setup);
    ws.commit_coeffs(s0);

    Aod2D aod = aod0;
    double dist = d0;
    Eigen::VectorXcd s = s0;

    JlmcEstimate est;
    double obj = ws.eval_position(aod, dist);
    if (!std::isfinite(obj))
        throw std::runtime_error("refine: objective not finite at initialization");
    est.objective_trace.push_back(obj);

    const Eigen::Vector2d aod_scale(1.0, 1.0);
    const Eigen::VectorXd dist_scale = Eigen::VectorXd::Ones(1);
    const Eigen::VectorXd mc_scale =
        Eigen::VectorXd::Constant(2 * s.size(), 0.05);

    for (int outer = 1; outer <= cfg.max_outer_iters; ++outer) {
        est.iterations = outer;
        double max_update = 0.0;

        // 2D-AOD block.
        {
            const auto f = [&](const Eigen::VectorXd& x) {
                return ws.eval_position({x[0], x[1]}, dist);
            };
            const AscentResult r = bfgs_ascend(
                f, Eigen::Vector2d(aod.theta, aod.phi), aod_scale, cfg.inner);
            if (r.value > obj) {
                max_update = std::max({max_update, std::abs(r.x[0] - aod.theta),
                                       std::abs(r.x[1] - aod.phi)});
                aod = {r.x[0], r.x[1]};
                obj = r.value;
            }
            est.objective_trace.push_back(obj);
        }

        // Distance block, log-parameterized to stay positive.
        {
            const auto f = [&](const Eigen::VectorXd& x) {
                return ws.eval_position(aod, std::exp(x[0]));
            };
            Eigen::VectorXd x0(1);
            x0[0] = std::log(dist);
            const AscentResult r = bfgs_ascend(f, x0, dist_scale, cfg.inner);
            if (r.value > obj) {
                const double d_new = std::exp(r.x[0]);
                max_update = std::max(max_update, std::abs(d_new - dist));
                dist = d_new;
                obj = r.value;
            }
            est.objective_trace.push_back(obj);
        }

        // MC block over interleaved real/imag parts, norm-clipped.
        if (cfg.estimate_mc && s.size() > 0) {
            const Position3 p = position_from_spherical({aod, dist}, setup.ris);
            const auto f = [&](const Eigen::VectorXd& x) {
                return ws.eval_coeffs(deinterleave(x), p);
            };
            const auto clip = [&](Eigen::VectorXd& x) {
                const double nrm = x.norm();
                if (nrm > cfg.mc_norm_bound) x *= cfg.mc_norm_bound / nrm;
            };
            const AscentResult r =
                bfgs_ascend(f, interleave(s), mc_scale, cfg.inner, clip);
            if (r.value > obj) {
                const Eigen::VectorXcd s_new = deinterleave(r.x);
                max_update = std::max(
                    max_update, (interleave(s_new) - interleave(s))
                                    .cwiseAbs()
                                    .maxCoeff());
                s = s_new;
                obj = r.value;
            }
            ws.commit_coeffs(s);  // evals may have left other values behind
            est.objective_trace.push_back(obj);
        }

        if (max_update < cfg.convergence_eps) {
            est.converged = true;
            break;
        }
    }

    est.aod = aod;
    est.distance = dist;
    est.mc_coeffs = s;
    const Eigen::VectorXcd h = ws.channel_at(aod, dist);
    est.gain = h.dot(y) / h.squaredNorm();
    est.position = position_from_spherical({aod, dist}, setup.ris);
    return est;
}

JlmcEstimate jlmc(const Eigen::VectorXcd& y, const SystemSetup& setup,
                  const EstimatorConfig& cfg, const CoarseAodDictionary& dict) {
    const CoarseAodResult ca = coarse_aod(y, dict);
    const double d0 = coarse_distance(y, ca.aod, setup, cfg);
    Eigen::VectorXcd s0 = Eigen::VectorXcd::Zero(setup.num_mc_coeffs());
    bool ill = false;
    if (cfg.estimate_mc) {
        const CoarseMcResult cm = coarse_mc(y, ca.aod, d0, setup);
        s0 = cm.coeffs;
        ill = cm.ill_conditioned;
    }
    JlmcEstimate est = refine(y, ca.aod, d0, s0, setup, cfg);
    est.init_ill_conditioned = ill;
    return est;
}

JlmcEstimate mc_unaware_estimate(const Eigen::VectorXcd& y,
                                 const SystemSetup& setup,
                                 const EstimatorConfig& cfg,
                                 const CoarseAodDictionary& dict) {
    EstimatorConfig unaware = cfg;
    unaware.estimate_mc = false;
    return jlmc(y, setup, unaware, dict);
}

}  // namespace rismc
