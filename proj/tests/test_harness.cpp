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
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rismc/harness.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace rismc;

namespace {

// Small scenario for fast harness runs: 10x10 surface, tiny sweep.
ScenarioConfig tiny_config() {
    ScenarioConfig c = ScenarioConfig::preset(Preset::desk);
    c.ris_rows = c.ris_cols = 10;
    c.ue_position = Position3(0.7, 4.8, 1.95);  // inside the 10x10 near field
    c.powers_dbm = {10.0};
    c.s_norms = {0.0, 0.01};
    c.pseudo_true_s_norms = {0.02};
    c.num_trials = 2;
    c.estimator.aod_step_theta_rad = 3.0 * std::numbers::pi / 180.0;
    c.estimator.aod_step_phi_rad = 3.0 * std::numbers::pi / 180.0;
    c.estimator.distance_grid_points = 80;
    c.pseudo_true.grid_step_m = 0.2;
    return c;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("empty config yields the stock 48x48 defaults") {
    const ScenarioConfig c = config_from_json_text("{}");
    CHECK(c.radio.num_pilots == 15);
    CHECK(c.radio.carrier_hz == 30.0e9);
    CHECK(c.ris_rows == 48);
    CHECK(c.ris_cols == 48);
    CHECK(c.num_trials == 500);
    CHECK((c.bs_position - Position3(0.0, 0.0, 2.5)).norm() == 0.0);
    CHECK((c.ris_position - Position3(0.0, 5.0, 2.0)).norm() == 0.0);
    CHECK((c.ue_position - Position3(7.0, 3.0, 1.5)).norm() == 0.0);
    CHECK(c.mc_direction.size() == 3);
    CHECK(std::abs(c.mc_direction.norm() - 1.0) < 1e-12);
}

TEST_CASE("config validation names the offending field") {
    // Direction with norm 0.9.
    const char* bad = R"({"mc_direction": [[-0.612,0.412],[-0.455,0.044],[0.219,0.083]]})";
    try {
        config_from_json_text(bad);
        FAIL("expected validation error");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("mc_direction") != std::string::npos);
    }
}

TEST_CASE("config round trip is lossless") {
    ScenarioConfig c = tiny_config();
    c.master_seed = 99991;
    const std::string text = c.to_json_text();
    const ScenarioConfig c2 = config_from_json_text(text, Preset::paper);
    CHECK(c2.to_json_text() == text);
    CHECK(config_digest(c2) == config_digest(c));
}

TEST_CASE("trial seeds are scheduling-independent and distinct") {
    CHECK(trial_seed(1, 0, 0) != trial_seed(1, 0, 1));
    CHECK(trial_seed(1, 0, 0) != trial_seed(1, 1, 0));
    CHECK(trial_seed(1, 2, 3) == trial_seed(1, 2, 3));
}

TEST_CASE("noiseless tiny run recovers the UE exactly") {
    ScenarioConfig c = tiny_config();
    c.radio.noise_psd_dbm_per_hz = -2000.0;  // sigma^2 = 0
    c.s_norms = {0.0};
    const ExperimentResult r = run_experiment(c);
    REQUIRE(r.cells.size() == 1);
    CHECK(r.cells[0].n_ok == 2);
    CHECK(r.cells[0].n_failed == 0);
    CHECK(r.cells[0].rmse_jlmc < 1e-3);
}

TEST_CASE("rmse definition matches a scalar recomputation from the trial log") {
    const ScenarioConfig c = tiny_config();
    const ExperimentResult r = run_experiment(c);
    for (std::size_t cell = 0; cell < r.cells.size(); ++cell) {
        double sum = 0.0;
        int n = 0;
        for (const TrialResult& t : r.trials) {
            if (static_cast<std::size_t>(t.cell_index) != cell || !t.ok) continue;
            sum += t.err_jlmc * t.err_jlmc;
            ++n;
        }
        REQUIRE(n == r.cells[cell].n_ok);
        CHECK(r.cells[cell].rmse_jlmc ==
              doctest::Approx(std::sqrt(sum / n)).epsilon(1e-12));
    }
}

TEST_CASE("runs are reproducible and thread-count independent") {
    const ScenarioConfig c = tiny_config();
    const std::filesystem::path base =
        std::filesystem::temp_directory_path() / "rismc_harness_test";
    std::filesystem::remove_all(base);

#ifdef _OPENMP
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
#endif
    const ExperimentResult r1 = run_experiment(c);
    emit_reports(r1, c, base / "a");
#ifdef _OPENMP
    omp_set_num_threads(4);
#endif
    const ExperimentResult r2 = run_experiment(c);
    emit_reports(r2, c, base / "b");
#ifdef _OPENMP
    omp_set_num_threads(saved);
#endif

    for (const char* name :
         {"rmse_vs_power.csv", "rmse_vs_snorm.csv", "pseudo_true_positions.csv",
          "trials.csv", "run_manifest.txt", "config_resolved.json"}) {
        CHECK(slurp(base / "a" / name) == slurp(base / "b" / name));
    }
    std::filesystem::remove_all(base);
}

TEST_CASE("emitted CSV headers match the documented schema") {
    const ScenarioConfig c = tiny_config();
    const ExperimentResult r = run_bounds_only(c);
    const std::filesystem::path dir =
        std::filesystem::temp_directory_path() / "rismc_harness_hdr";
    std::filesystem::remove_all(dir);
    emit_reports(r, c, dir);

    const std::string rmse = slurp(dir / "rmse_vs_power.csv");
    CHECK(rmse.rfind("p_dbm,s_norm,rmse_jlmc_m,rmse_unaware_m,peb_aware_m,"
                     "peb_unaware_m,bias_norm_m,n_trials\n",
                     0) == 0);
    const std::string pt = slurp(dir / "pseudo_true_positions.csv");
    CHECK(pt.rfind("s_norm,x_m,y_m,z_m,bias_norm_m\n", 0) == 0);
    // One row per configured pseudo-true norm.
    CHECK(std::count(pt.begin(), pt.end(), '\n') ==
          1 + static_cast<long>(c.pseudo_true_s_norms.size()));
    const std::string manifest = slurp(dir / "run_manifest.txt");
    CHECK(manifest.find("config_digest: " + config_digest(c)) != std::string::npos);
    std::filesystem::remove_all(dir);
}
