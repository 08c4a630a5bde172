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
#include <filesystem>
#include <string>
#include <vector>

#include "rismc/bounds.hpp"
#include "rismc/estimator.hpp"

namespace rismc {

enum class Preset { paper, desk };

// Full experiment description. Defaults (Preset::paper) reproduce the stock
// 48x48 scenario; Preset::desk is the CI-sized profile (16x16 surface, UE
// inside its near-field region, directive antennas, 100 trials).
struct ScenarioConfig {
    RadioConfig radio;  // tx_power_dbm is taken from powers_dbm per cell

    Position3 bs_position{0.0, 0.0, 2.5};
    Position3 ris_position{0.0, 5.0, 2.0};
    Position3 ue_position{7.0, 3.0, 1.5};
    int ris_rows = 48;
    int ris_cols = 48;
    double ris_spacing_m = 0.005;  // lambda/2 at 30 GHz
    Eigen::Matrix3d ris_orientation = default_ris_orientation();

    int num_mc_coeffs = 3;
    Eigen::VectorXcd mc_direction;  // unit norm

    std::vector<double> powers_dbm{-15.0, -10.0, -5.0, 0.0, 5.0, 10.0};
    std::vector<double> s_norms{0.0, 0.01, 0.05};
    std::vector<double> pseudo_true_s_norms{0.02, 0.1};
    int num_trials = 500;
    std::uint64_t master_seed = 12345;

    EstimatorConfig estimator;
    PseudoTrueConfig pseudo_true;
    std::string output_dir = "out";

    static ScenarioConfig preset(Preset which);

    // Collects every violated invariant into one error message.
    void validate() const;

    std::string to_json_text() const;
};

// Loads a config file, filling omitted fields from the given preset's
// defaults. An empty JSON object yields the full preset. Parse and
// validation failures throw with field diagnostics.
ScenarioConfig load_config(const std::filesystem::path& path,
                           Preset base = Preset::paper);
ScenarioConfig config_from_json_text(const std::string& text,
                                     Preset base = Preset::paper);

// FNV-1a digest of the canonical serialized config.
std::string config_digest(const ScenarioConfig& cfg);

// Receiver-side system model for the configured scenario; the profile set is
// drawn from the master seed.
SystemSetup make_setup(const ScenarioConfig& cfg);

// Deterministic per-trial seed, independent of scheduling.
std::uint64_t trial_seed(std::uint64_t master, int cell_index, int trial_index);

struct TrialResult {
    int cell_index = 0;
    int trial_index = 0;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    double err_jlmc = 0.0;     // position error, meters
    double err_unaware = 0.0;
    double mc_coeff_err = 0.0;  // |s_hat - s|
    int iters_jlmc = 0;
    int iters_unaware = 0;
    bool trace_monotone = true;  // both estimators' objective traces
    double wall_seconds = 0.0;
    std::vector<double> trace_jlmc;
    std::vector<double> trace_unaware;
};

struct RmseCell {
    double p_dbm = 0.0;
    double s_norm = 0.0;
    double rmse_jlmc = 0.0;
    double rmse_unaware = 0.0;
    double peb_aware = 0.0;
    double peb_unaware = 0.0;
    double bias_norm = 0.0;
    int n_ok = 0;
    int n_failed = 0;
};

struct ExperimentResult {
    std::vector<RmseCell> cells;        // s-norm major, power minor
    std::vector<BoundReport> bound_cells;  // same order as cells
    std::vector<TrialResult> trials;
    std::vector<PseudoTrueResult> pseudo_true_rows;  // one per pseudo_true_s_norms entry
    bool has_trials = false;
};

// Monte Carlo sweep over (power, |s|) cells: bounds per cell, then seeded
// trials running both estimators. Trial failures are recorded and excluded
// from the RMSE, never aborting the sweep. Results are independent of the
// number of OpenMP threads.
ExperimentResult run_experiment(const ScenarioConfig& cfg);

// Bounds and pseudo-true positions only (no Monte Carlo).
ExperimentResult run_bounds_only(const ScenarioConfig& cfg);

// Writes rmse_vs_power.csv, rmse_vs_snorm.csv, pseudo_true_positions.csv,
// trials.csv (when trials ran), bound_reports.csv (bounds-only runs) and
// run_manifest.txt into dir. Numbers are printed with 9 significant digits
// so repeated runs are byte-identical.
void emit_reports(const ExperimentResult& result, const ScenarioConfig& cfg,
                  const std::filesystem::path& dir);

}  // namespace rismc
