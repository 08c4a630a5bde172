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

#include <doctest.h>

#include <cmath>

#include "rismc/estimator.hpp"
#include "rismc/harness.hpp"
#include "rismc/rng.hpp"

using namespace rismc;

namespace {

// Desk-scale receiver model shared across the estimator tests.
struct Fixture {
    ScenarioConfig cfg = ScenarioConfig::preset(Preset::desk);
    SystemSetup setup;
    CoarseAodDictionary dict;

    explicit Fixture(double power_dbm = 10.0) {
        cfg.radio.tx_power_dbm = power_dbm;
        setup = make_setup(cfg);
        setup.radio.tx_power_dbm = power_dbm;
        dict = build_aod_dictionary(setup, cfg.estimator);
    }

    Observation observe(const Eigen::VectorXcd& coeffs, std::uint64_t seed,
                        bool noiseless = false) const {
        SystemSetup s = setup;
        if (noiseless) s.radio.noise_psd_dbm_per_hz = -2000.0;
        return simulate_observation(s, cfg.ue_position, coeffs, seed);
    }

    LocalSpherical true_spherical() const {
        return aod_from_position(cfg.ue_position, setup.ris);
    }
};

Aod2D snap_to_grid(const Aod2D& aod, const EstimatorConfig& cfg) {
    const double t =
        std::round(aod.theta / cfg.aod_step_theta_rad) * cfg.aod_step_theta_rad;
    const double half_pi = std::numbers::pi / 2.0;
    const double p =
        -half_pi +
        std::round((aod.phi + half_pi) / cfg.aod_step_phi_rad) * cfg.aod_step_phi_rad;
    return {t, p};
}

}  // namespace

TEST_CASE("dictionary columns are unit norm and the build is thread-identical") {
    const Fixture fx;
    for (int i = 0; i < fx.dict.size(); ++i)
        CHECK(fx.dict.columns.col(i).norm() == doctest::Approx(1.0).epsilon(1e-12));

    const CoarseAodDictionary serial =
        build_aod_dictionary_serial(fx.setup, fx.cfg.estimator);
    REQUIRE(serial.size() == fx.dict.size());
    CHECK((serial.columns - fx.dict.columns).norm() == 0.0);
}

TEST_CASE("coarse_aod: noiseless on-grid AOD is recovered exactly") {
    const Fixture fx;
    const LocalSpherical ls = fx.true_spherical();
    const Aod2D on_grid = snap_to_grid(ls.aod, fx.cfg.estimator);
    const Position3 ue =
        position_from_spherical({on_grid, ls.distance}, fx.setup.ris);

    SystemSetup quiet = fx.setup;
    quiet.radio.noise_psd_dbm_per_hz = -2000.0;
    const Observation obs =
        simulate_observation(quiet, ue, Eigen::VectorXcd::Zero(3), 1);

    const CoarseAodResult got = coarse_aod(obs.y, fx.dict);
    CHECK(got.aod.theta == doctest::Approx(on_grid.theta).epsilon(1e-12));
    CHECK(got.aod.phi == doctest::Approx(on_grid.phi).epsilon(1e-12));

    // Exhaustive serial oracle returns the very same index.
    CHECK(coarse_aod_serial(obs.y, fx.dict).index == got.index);
}

TEST_CASE("coarse_aod: off-grid truth lands within one grid step") {
    const Fixture fx;
    const Observation obs = fx.observe(Eigen::VectorXcd::Zero(3), 2, true);
    const CoarseAodResult got = coarse_aod(obs.y, fx.dict);
    const LocalSpherical ls = fx.true_spherical();
    CHECK(std::abs(got.aod.theta - ls.aod.theta) <=
          fx.cfg.estimator.aod_step_theta_rad);
    CHECK(std::abs(got.aod.phi - ls.aod.phi) <= fx.cfg.estimator.aod_step_phi_rad);
}

TEST_CASE("coarse_aod: zero observation returns index 0 by tie-break") {
    const Fixture fx;
    const Eigen::VectorXcd y = Eigen::VectorXcd::Zero(fx.setup.radio.num_pilots);
    CHECK(coarse_aod(y, fx.dict).index == 0);
    CHECK_THROWS_AS(coarse_aod(y, CoarseAodDictionary{}), std::invalid_argument);
}

TEST_CASE("coarse_distance: noiseless exact-AOD search hits the grid") {
    const Fixture fx;
    const LocalSpherical ls = fx.true_spherical();
    const std::vector<double> grid = distance_grid(fx.setup, fx.cfg.estimator);

    SUBCASE("distance on a grid point is returned exactly") {
        // Move the UE onto the nearest grid distance.
        double nearest = grid.front();
        for (const double d : grid)
            if (std::abs(d - ls.distance) < std::abs(nearest - ls.distance))
                nearest = d;
        const Position3 ue =
            position_from_spherical({ls.aod, nearest}, fx.setup.ris);
        SystemSetup quiet = fx.setup;
        quiet.radio.noise_psd_dbm_per_hz = -2000.0;
        const Observation obs =
            simulate_observation(quiet, ue, Eigen::VectorXcd::Zero(3), 3);
        CHECK(coarse_distance(obs.y, ls.aod, fx.setup, fx.cfg.estimator) ==
              doctest::Approx(nearest).epsilon(1e-12));
    }

    SUBCASE("off-grid distance is bracketed within one step") {
        const Observation obs = fx.observe(Eigen::VectorXcd::Zero(3), 4, true);
        const double got =
            coarse_distance(obs.y, ls.aod, fx.setup, fx.cfg.estimator);
        // Log-spaced grid: neighboring ratio bounds the hit.
        const double ratio = grid[1] / grid[0];
        CHECK(got / ls.distance < ratio);
        CHECK(ls.distance / got < ratio);
    }
}

TEST_CASE("coarse_mc: zero coupling and small-coupling accuracy") {
    const Fixture fx;
    const LocalSpherical ls = fx.true_spherical();

    SUBCASE("s = 0 recovers zero") {
        const Observation obs = fx.observe(Eigen::VectorXcd::Zero(3), 5, true);
        const CoarseMcResult r =
            coarse_mc(obs.y, ls.aod, ls.distance, fx.setup);
        CHECK_FALSE(r.ill_conditioned);
        CHECK(r.coeffs.norm() < 1e-10);
    }

    SUBCASE("|s| = 0.01 recovered within the Neumann truncation error") {
        const Eigen::VectorXcd s = 0.01 * fx.cfg.mc_direction;
        const Observation obs = fx.observe(s, 6, true);
        const CoarseMcResult r =
            coarse_mc(obs.y, ls.aod, ls.distance, fx.setup);
        CHECK_FALSE(r.ill_conditioned);
        CHECK((r.coeffs - s).norm() < 0.1 * s.norm());
    }

    SUBCASE("square system matches a direct solve") {
        // N_t = N_m = 3: the pseudo-inverse is an exact solve.
        ScenarioConfig cfg3 = fx.cfg;
        cfg3.radio.num_pilots = 3;
        const SystemSetup setup3 = make_setup(cfg3);
        const Eigen::VectorXcd s = 0.01 * fx.cfg.mc_direction;
        SystemSetup quiet = setup3;
        quiet.radio.noise_psd_dbm_per_hz = -2000.0;
        const Observation obs =
            simulate_observation(quiet, cfg3.ue_position, s, 61);
        const LocalSpherical ls3 =
            aod_from_position(cfg3.ue_position, setup3.ris);
        const CoarseMcResult r =
            coarse_mc(obs.y, ls3.aod, ls3.distance, setup3);
        REQUIRE_FALSE(r.ill_conditioned);

        const Eigen::VectorXcd h_free =
            mcfree_channel(cfg3.ue_position, setup3);
        const Complex beta = h_free.dot(obs.y) / h_free.squaredNorm();
        const Eigen::MatrixXcd g = neumann_gain_matrix(cfg3.ue_position, setup3);
        const Eigen::VectorXcd direct =
            g.fullPivLu().solve((obs.y / beta - h_free).eval());
        CHECK((r.coeffs - direct).norm() < 1e-8 * direct.norm());
    }
}

TEST_CASE("objective: Cauchy-Schwarz equality and homogeneity") {
    const Fixture fx;
    const Eigen::VectorXcd s = 0.05 * fx.cfg.mc_direction;
    const Observation obs = fx.observe(s, 7, true);
    const LocalSpherical ls = fx.true_spherical();

    const double at_truth =
        jlmc_objective(obs.y, ls.aod, ls.distance, s, fx.setup);
    const Eigen::VectorXcd h = cascaded_channel(fx.cfg.ue_position, fx.setup, s);

    // Noiseless y = beta h: objective = |beta|^2 |h|^2 and the concentrated
    // gain equals beta exactly.
    CHECK(at_truth == doctest::Approx(std::norm(obs.true_gain) * h.squaredNorm())
                          .epsilon(1e-10));
    const Complex beta_hat = h.dot(obs.y) / h.squaredNorm();
    CHECK(std::abs(beta_hat - obs.true_gain) < 1e-10 * std::abs(obs.true_gain));

    // Any other parameter value scores lower on noiseless data.
    const double off = jlmc_objective(obs.y, {ls.aod.theta + 0.01, ls.aod.phi},
                                      ls.distance, s, fx.setup);
    CHECK(off < at_truth);

    // Scaling y by c scales the objective by |c|^2.
    const Complex c(1.7, -0.4);
    const double scaled =
        jlmc_objective(c * obs.y, ls.aod, ls.distance, s, fx.setup);
    CHECK(scaled == doctest::Approx(std::norm(c) * at_truth).epsilon(1e-10));
}

TEST_CASE("refine: truth initialization is a fixed point") {
    const Fixture fx;
    const Eigen::VectorXcd s = 0.01 * fx.cfg.mc_direction;
    const Observation obs = fx.observe(s, 8, true);
    const LocalSpherical ls = fx.true_spherical();

    const JlmcEstimate est =
        refine(obs.y, ls.aod, ls.distance, s, fx.setup, fx.cfg.estimator);
    CHECK(est.converged);
    CHECK(est.iterations == 1);
    CHECK((est.position - fx.cfg.ue_position).norm() < 1e-6);
}

TEST_CASE("refine: coarse init converges on noiseless data; trace monotone") {
    const Fixture fx;
    const Eigen::VectorXcd s = 0.01 * fx.cfg.mc_direction;
    const Observation obs = fx.observe(s, 9, true);

    const JlmcEstimate est = jlmc(obs.y, fx.setup, fx.cfg.estimator, fx.dict);
    CHECK((est.position - fx.cfg.ue_position).norm() < 1e-3);
    for (std::size_t i = 1; i < est.objective_trace.size(); ++i)
        CHECK(est.objective_trace[i] >= est.objective_trace[i - 1]);
    // Gridless refinement beats the coarse initialization.
    CHECK(est.objective_trace.back() >= est.objective_trace.front());
    // Reported position is exactly the spherical reconstruction.
    const Position3 rebuilt =
        position_from_spherical({est.aod, est.distance}, fx.setup.ris);
    CHECK((est.position - rebuilt).norm() == 0.0);
}

TEST_CASE("jlmc is deterministic given the seed") {
    const Fixture fx;
    const Eigen::VectorXcd s = 0.05 * fx.cfg.mc_direction;
    const Observation a = fx.observe(s, 10);
    const Observation b = fx.observe(s, 10);
    const JlmcEstimate ea = jlmc(a.y, fx.setup, fx.cfg.estimator, fx.dict);
    const JlmcEstimate eb = jlmc(b.y, fx.setup, fx.cfg.estimator, fx.dict);
    CHECK((ea.position - eb.position).norm() == 0.0);
    CHECK((ea.mc_coeffs - eb.mc_coeffs).norm() == 0.0);
}

TEST_CASE("mc-unaware estimator equals jlmc with the MC block disabled") {
    const Fixture fx;
    const Observation obs = fx.observe(Eigen::VectorXcd::Zero(3), 11);  // noisy
    EstimatorConfig no_mc = fx.cfg.estimator;
    no_mc.estimate_mc = false;
    const JlmcEstimate a = jlmc(obs.y, fx.setup, no_mc, fx.dict);
    const JlmcEstimate b = mc_unaware_estimate(obs.y, fx.setup, fx.cfg.estimator, fx.dict);
    CHECK((a.position - b.position).norm() == 0.0);
    CHECK(a.distance == b.distance);
    CHECK(a.objective_trace == b.objective_trace);
    CHECK(b.mc_coeffs.norm() == 0.0);
}

TEST_CASE("noiseless zero-coupling run recovers the UE to refine tolerance") {
    const Fixture fx;
    const Observation obs = fx.observe(Eigen::VectorXcd::Zero(3), 12, true);
    const JlmcEstimate est =
        mc_unaware_estimate(obs.y, fx.setup, fx.cfg.estimator, fx.dict);
    CHECK((est.position - fx.cfg.ue_position).norm() < 1e-4);
}

TEST_CASE("scene translation shifts the estimate by the same vector") {
    const Fixture fx;
    const Eigen::VectorXcd s = 0.01 * fx.cfg.mc_direction;
    const Observation obs = fx.observe(s, 13);
    const JlmcEstimate base = jlmc(obs.y, fx.setup, fx.cfg.estimator, fx.dict);

    const Position3 shift(3.0, -2.0, 1.0);
    ScenarioConfig moved = fx.cfg;
    moved.bs_position += shift;
    moved.ris_position += shift;
    moved.ue_position += shift;
    SystemSetup setup2 = make_setup(moved);
    setup2.radio.tx_power_dbm = fx.setup.radio.tx_power_dbm;
    const CoarseAodDictionary dict2 = build_aod_dictionary(setup2, moved.estimator);
    const Observation obs2 =
        simulate_observation(setup2, moved.ue_position, s, obs.seed);
    CHECK((obs2.y - obs.y).norm() < 1e-9 * obs.y.norm());
    const JlmcEstimate shifted = jlmc(obs2.y, setup2, moved.estimator, dict2);
    CHECK((shifted.position - (base.position + shift)).norm() < 1e-4);
}
