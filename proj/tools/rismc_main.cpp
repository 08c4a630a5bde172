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

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "rismc/harness.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

rismc::Preset parse_preset(const std::string& name) {
    if (name == "desk") return rismc::Preset::desk;
    if (name == "paper") return rismc::Preset::paper;
    throw CLI::ValidationError("--preset must be 'desk' or 'paper'");
}

void apply_threads(int threads) {
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#else
    (void)threads;
#endif
}

void print_cells(const rismc::ExperimentResult& result) {
    std::printf("%8s %8s %12s %12s %12s %12s %12s\n", "P[dBm]", "|s|",
                "rmse_jlmc", "rmse_unaw", "peb_aware", "peb_unaw", "bias");
    for (const auto& c : result.cells)
        std::printf("%8.1f %8.3f %12.4e %12.4e %12.4e %12.4e %12.4e\n", c.p_dbm,
                    c.s_norm, c.rmse_jlmc, c.rmse_unaware, c.peb_aware,
                    c.peb_unaware, c.bias_norm);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "rismc: near-field RIS localization under mutual coupling - "
        "simulation, JLMC estimation, and CRB/MCRB bounds"};
    app.require_subcommand(1);

    std::string config_path, out_dir, preset_name = "paper";
    int threads = 0;

    auto add_common = [&](CLI::App* cmd, bool with_out) {
        cmd->add_option("config", config_path, "Path to a JSON config file")
            ->required();
        cmd->add_option("--preset", preset_name,
                        "Baseline defaults for omitted fields (desk|paper)");
        if (with_out) {
            cmd->add_option("--out", out_dir, "Output directory (overrides config)");
            cmd->add_option("--threads", threads, "OpenMP thread count");
        }
    };

    CLI::App* run = app.add_subcommand(
        "run", "Run the Monte Carlo sweep and emit CSV reports");
    add_common(run, true);
    CLI::App* bounds = app.add_subcommand(
        "bounds-only", "Compute bound reports without Monte Carlo trials");
    add_common(bounds, true);
    CLI::App* validate =
        app.add_subcommand("validate", "Parse and validate a config file");
    add_common(validate, false);

    CLI11_PARSE(app, argc, argv);

    try {
        const rismc::Preset preset = parse_preset(preset_name);
        rismc::ScenarioConfig cfg = rismc::load_config(config_path, preset);
        if (!out_dir.empty()) cfg.output_dir = out_dir;

        if (validate->parsed()) {
            std::printf("OK: %s (digest %s)\n", config_path.c_str(),
                        rismc::config_digest(cfg).c_str());
            return 0;
        }

        apply_threads(threads);
        const bool with_trials = run->parsed();
        std::printf("%s: %dx%d RIS, %zu powers x %zu coupling norms%s\n",
                    with_trials ? "run" : "bounds-only", cfg.ris_rows,
                    cfg.ris_cols, cfg.powers_dbm.size(), cfg.s_norms.size(),
                    with_trials
                        ? (", " + std::to_string(cfg.num_trials) + " trials/cell").c_str()
                        : "");
        const rismc::ExperimentResult result =
            with_trials ? rismc::run_experiment(cfg) : rismc::run_bounds_only(cfg);
        rismc::emit_reports(result, cfg, cfg.output_dir);
        print_cells(result);

        int failed = 0;
        for (const auto& t : result.trials) failed += t.ok ? 0 : 1;
        if (failed > 0)
            std::printf("warning: %d trial(s) failed and were excluded\n", failed);
        std::printf("reports written to %s\n", cfg.output_dir.c_str());
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
