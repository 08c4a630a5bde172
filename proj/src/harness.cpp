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

#include "rismc/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "rismc/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rismc {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr double kDegToRad = std::numbers::pi / 180.0;

// Stock coupling direction: the published unit-norm coefficient vector
// (normalized exactly; the printed values carry rounding).
Eigen::VectorXcd default_mc_direction() {
    Eigen::VectorXcd s(3);
    s << Complex(-0.681, 0.458), Complex(-0.506, 0.0492), Complex(0.244, 0.0928);
    return s / s.norm();
}

std::string fmt9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.8e", v);
    return buf;
}

ordered_json config_to_json(const ScenarioConfig& c) {
    ordered_json j;
    j["carrier_hz"] = c.radio.carrier_hz;
    j["bandwidth_hz"] = c.radio.bandwidth_hz;
    j["noise_psd_dbm_per_hz"] = c.radio.noise_psd_dbm_per_hz;
    j["tx_gain"] = c.radio.tx_gain;
    j["rx_gain"] = c.radio.rx_gain;
    j["num_pilots"] = c.radio.num_pilots;
    j["bs_position"] = {c.bs_position.x(), c.bs_position.y(), c.bs_position.z()};
    j["ris_position"] = {c.ris_position.x(), c.ris_position.y(), c.ris_position.z()};
    j["ue_position"] = {c.ue_position.x(), c.ue_position.y(), c.ue_position.z()};
    j["ris_rows"] = c.ris_rows;
    j["ris_cols"] = c.ris_cols;
    j["ris_spacing_m"] = c.ris_spacing_m;
    std::vector<double> r(9);
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) r[static_cast<std::size_t>(3 * i + k)] = c.ris_orientation(i, k);
    j["ris_orientation"] = r;
    j["num_mc_coeffs"] = c.num_mc_coeffs;
    std::vector<std::vector<double>> dir;
    for (Eigen::Index i = 0; i < c.mc_direction.size(); ++i)
        dir.push_back({c.mc_direction[i].real(), c.mc_direction[i].imag()});
    j["mc_direction"] = dir;
    j["powers_dbm"] = c.powers_dbm;
    j["s_norms"] = c.s_norms;
    j["pseudo_true_s_norms"] = c.pseudo_true_s_norms;
    j["num_trials"] = c.num_trials;
    j["master_seed"] = c.master_seed;
    ordered_json e;
    e["aod_step_theta_deg"] = c.estimator.aod_step_theta_rad / kDegToRad;
    e["aod_step_phi_deg"] = c.estimator.aod_step_phi_rad / kDegToRad;
    e["distance_grid_points"] = c.estimator.distance_grid_points;
    e["distance_min_factor"] = c.estimator.distance_min_factor;
    e["distance_max_factor"] = c.estimator.distance_max_factor;
    e["convergence_eps"] = c.estimator.convergence_eps;
    e["max_outer_iters"] = c.estimator.max_outer_iters;
    e["estimate_mc"] = c.estimator.estimate_mc;
    e["mc_norm_bound"] = c.estimator.mc_norm_bound;
    e["inner_max_iters"] = c.estimator.inner.max_iters;
    e["inner_rel_grad_tol"] = c.estimator.inner.rel_grad_tol;
    e["fd_rel_step"] = c.estimator.inner.fd_rel_step;
    j["estimator"] = e;
    ordered_json p;
    p["cube_side_m"] = c.pseudo_true.cube_side_m;
    p["grid_step_m"] = c.pseudo_true.grid_step_m;
    p["polish_tol"] = c.pseudo_true.polish_tol;
    p["max_polish_evals"] = c.pseudo_true.max_polish_evals;
    j["pseudo_true"] = p;
    j["output_dir"] = c.output_dir;
    return j;
}

template <typename T>
void read_field(const ordered_json& j, const char* key, T& out) {
    if (const auto it = j.find(key); it != j.end()) out = it->get<T>();
}

void read_vec3(const ordered_json& j, const char* key, Position3& out) {
    if (const auto it = j.find(key); it != j.end()) {
        const auto v = it->get<std::vector<double>>();
        if (v.size() != 3)
            throw std::invalid_argument(std::string("config field '") + key +
                                        "' must have 3 entries");
        out = Position3(v[0], v[1], v[2]);
    }
}

}  // namespace

ScenarioConfig ScenarioConfig::preset(Preset which) {
    ScenarioConfig c;
    c.mc_direction = default_mc_direction();
    if (which == Preset::desk) {
        c.ris_rows = 16;
        c.ris_cols = 16;
        // Inside the 16x16 near-field region (~0.21 m .. 2.25 m from the
        // surface), along the stock UE bearing.
        c.ue_position = Position3(1.247, 4.644, 1.911);
        c.radio.tx_gain = 100.0;   // 20 dBi horns
        c.radio.rx_gain = 100.0;
        c.radio.bandwidth_hz = 1.0e4;  // narrowband pilot tones
        c.num_trials = 100;
    }
    return c;
}

void ScenarioConfig::validate() const {
    std::vector<std::string> problems;
    const auto check = [&](bool ok, const std::string& msg) {
        if (!ok) problems.push_back(msg);
    };
    try {
        radio.validate();
    } catch (const std::exception& e) {
        problems.emplace_back(e.what());
    }
    check(ris_rows >= 1 && ris_cols >= 1, "ris_rows/ris_cols: must be >= 1");
    check(ris_spacing_m > 0.0, "ris_spacing_m: must be positive");
    const double ortho =
        (ris_orientation.transpose() * ris_orientation - Eigen::Matrix3d::Identity())
            .cwiseAbs()
            .maxCoeff();
    check(ortho <= 1e-12 && std::abs(ris_orientation.determinant() - 1.0) <= 1e-12,
          "ris_orientation: must be a proper rotation matrix");
    check(num_mc_coeffs >= 1 && num_mc_coeffs <= 3,
          "num_mc_coeffs: supported values are 1..3");
    check(mc_direction.size() == num_mc_coeffs,
          "mc_direction: length must equal num_mc_coeffs");
    if (mc_direction.size() > 0)
        check(std::abs(mc_direction.norm() - 1.0) <= 1e-9,
              "mc_direction: must have unit norm (within 1e-9)");
    check(!powers_dbm.empty(), "powers_dbm: must be nonempty");
    check(!s_norms.empty(), "s_norms: must be nonempty");
    for (const double q : s_norms)
        check(q >= 0.0, "s_norms: entries must be >= 0");
    check(num_trials >= 1, "num_trials: must be >= 1");
    check((ue_position - ris_position).norm() > 0.0,
          "ue_position: must differ from ris_position");
    check((bs_position - ris_position).norm() > 0.0,
          "bs_position: must differ from ris_position");
    try {
        estimator.validate();
    } catch (const std::exception& e) {
        problems.emplace_back(e.what());
    }
    check(pseudo_true.grid_step_m > 0.0 && pseudo_true.cube_side_m > 0.0,
          "pseudo_true: cube side and grid step must be positive");
    if (!problems.empty()) {
        std::string msg = "invalid configuration:";
        for (const auto& p : problems) msg += "\n  - " + p;
        throw std::invalid_argument(msg);
    }
}

std::string ScenarioConfig::to_json_text() const {
    return config_to_json(*this).dump(2) + "\n";
}

ScenarioConfig config_from_json_text(const std::string& text, Preset base) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("config parse error: ") + e.what());
    }
    if (!j.is_object())
        throw std::invalid_argument("config parse error: top level must be an object");

    ScenarioConfig c = ScenarioConfig::preset(base);
    read_field(j, "carrier_hz", c.radio.carrier_hz);
    read_field(j, "bandwidth_hz", c.radio.bandwidth_hz);
    read_field(j, "noise_psd_dbm_per_hz", c.radio.noise_psd_dbm_per_hz);
    read_field(j, "tx_gain", c.radio.tx_gain);
    read_field(j, "rx_gain", c.radio.rx_gain);
    read_field(j, "num_pilots", c.radio.num_pilots);
    read_vec3(j, "bs_position", c.bs_position);
    read_vec3(j, "ris_position", c.ris_position);
    read_vec3(j, "ue_position", c.ue_position);
    read_field(j, "ris_rows", c.ris_rows);
    read_field(j, "ris_cols", c.ris_cols);
    read_field(j, "ris_spacing_m", c.ris_spacing_m);
    if (const auto it = j.find("ris_orientation"); it != j.end()) {
        const auto v = it->get<std::vector<double>>();
        if (v.size() != 9)
            throw std::invalid_argument(
                "config field 'ris_orientation' must have 9 entries (row-major)");
        for (int i = 0; i < 3; ++i)
            for (int k = 0; k < 3; ++k)
                c.ris_orientation(i, k) = v[static_cast<std::size_t>(3 * i + k)];
    }
    read_field(j, "num_mc_coeffs", c.num_mc_coeffs);
    if (const auto it = j.find("mc_direction"); it != j.end()) {
        const auto v = it->get<std::vector<std::vector<double>>>();
        c.mc_direction.resize(static_cast<Eigen::Index>(v.size()));
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (v[i].size() != 2)
                throw std::invalid_argument(
                    "config field 'mc_direction' entries must be [re, im] pairs");
            c.mc_direction[static_cast<Eigen::Index>(i)] = Complex(v[i][0], v[i][1]);
        }
    } else if (c.num_mc_coeffs != c.mc_direction.size()) {
        // Preset direction has 3 entries; renormalize a truncation if the
        // tier count was reduced.
        c.mc_direction = default_mc_direction().head(c.num_mc_coeffs).eval();
        c.mc_direction /= c.mc_direction.norm();
    }
    read_field(j, "powers_dbm", c.powers_dbm);
    read_field(j, "s_norms", c.s_norms);
    read_field(j, "pseudo_true_s_norms", c.pseudo_true_s_norms);
    read_field(j, "num_trials", c.num_trials);
    read_field(j, "master_seed", c.master_seed);
    if (const auto it = j.find("estimator"); it != j.end()) {
        const ordered_json& e = *it;
        double th_deg = c.estimator.aod_step_theta_rad / kDegToRad;
        double ph_deg = c.estimator.aod_step_phi_rad / kDegToRad;
        read_field(e, "aod_step_theta_deg", th_deg);
        read_field(e, "aod_step_phi_deg", ph_deg);
        c.estimator.aod_step_theta_rad = th_deg * kDegToRad;
        c.estimator.aod_step_phi_rad = ph_deg * kDegToRad;
        read_field(e, "distance_grid_points", c.estimator.distance_grid_points);
        read_field(e, "distance_min_factor", c.estimator.distance_min_factor);
        read_field(e, "distance_max_factor", c.estimator.distance_max_factor);
        read_field(e, "convergence_eps", c.estimator.convergence_eps);
        read_field(e, "max_outer_iters", c.estimator.max_outer_iters);
        read_field(e, "estimate_mc", c.estimator.estimate_mc);
        read_field(e, "mc_norm_bound", c.estimator.mc_norm_bound);
        read_field(e, "inner_max_iters", c.estimator.inner.max_iters);
        read_field(e, "inner_rel_grad_tol", c.estimator.inner.rel_grad_tol);
        read_field(e, "fd_rel_step", c.estimator.inner.fd_rel_step);
    }
    if (const auto it = j.find("pseudo_true"); it != j.end()) {
        const ordered_json& p = *it;
        read_field(p, "cube_side_m", c.pseudo_true.cube_side_m);
        read_field(p, "grid_step_m", c.pseudo_true.grid_step_m);
        read_field(p, "polish_tol", c.pseudo_true.polish_tol);
        read_field(p, "max_polish_evals", c.pseudo_true.max_polish_evals);
    }
    read_field(j, "output_dir", c.output_dir);
    c.validate();
    return c;
}

ScenarioConfig load_config(const std::filesystem::path& path, Preset base) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("load_config: cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    std::string text = ss.str();
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) text = "{}";
    return config_from_json_text(text, base);
}

std::string config_digest(const ScenarioConfig& cfg) {
    const std::string text = cfg.to_json_text();
    std::uint64_t h = 0xCBF29CE484222325ULL;  // FNV-1a
    for (const unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001B3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

SystemSetup make_setup(const ScenarioConfig& cfg) {
    SystemSetup s;
    s.radio = cfg.radio;
    s.ris = RisGeometry::make(cfg.ris_rows, cfg.ris_cols, cfg.ris_spacing_m,
                              cfg.ris_position, cfg.ris_orientation);
    s.bs_position = cfg.bs_position;
    s.profiles = RisProfileSet::random(s.ris.num_elements(), cfg.radio.num_pilots,
                                       derive_seed(cfg.master_seed, 0xA11CEULL, 0));
    s.supports = build_supports(s.ris, cfg.num_mc_coeffs);
    return s;
}

std::uint64_t trial_seed(std::uint64_t master, int cell_index, int trial_index) {
    return derive_seed(master, static_cast<std::uint64_t>(cell_index) + 1,
                       static_cast<std::uint64_t>(trial_index) + 1);
}

namespace {

bool is_nondecreasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] < v[i - 1]) return false;
    return true;
}

ExperimentResult run_impl(const ScenarioConfig& cfg, bool with_trials) {
    cfg.validate();
    const SystemSetup base = make_setup(cfg);

    ExperimentResult result;
    result.has_trials = with_trials;

    // Bounds, one pseudo-true search per coupling norm.
    const BoundSweepResult sweep =
        bound_sweep(base, cfg.ue_position, cfg.mc_direction, cfg.powers_dbm,
                    cfg.s_norms, cfg.pseudo_true);
    result.bound_cells = sweep.cells;

    const int n_p = static_cast<int>(cfg.powers_dbm.size());
    const int n_s = static_cast<int>(cfg.s_norms.size());
    const int n_cells = n_p * n_s;
    result.cells.resize(static_cast<std::size_t>(n_cells));
    for (int c = 0; c < n_cells; ++c) {
        const BoundReport& b = result.bound_cells[static_cast<std::size_t>(c)];
        RmseCell& cell = result.cells[static_cast<std::size_t>(c)];
        cell.p_dbm = cfg.powers_dbm[static_cast<std::size_t>(c % n_p)];
        cell.s_norm = cfg.s_norms[static_cast<std::size_t>(c / n_p)];
        cell.peb_aware = b.peb_aware;
        cell.peb_unaware = b.peb_unaware;
        cell.bias_norm = b.bias_norm;
    }

    // Pseudo-true position map (plotting data), at the first power level.
    for (const double q : cfg.pseudo_true_s_norms) {
        SystemSetup ref = base;
        ref.radio.tx_power_dbm = cfg.powers_dbm.front();
        const Complex gain = channel_gain(ref.radio, cfg.ue_position,
                                          ref.ris.center, ref.bs_position, 0.0)
                                 .beta;
        result.pseudo_true_rows.push_back(pseudo_true(
            ref, cfg.ue_position, q * cfg.mc_direction, gain, cfg.pseudo_true));
    }

    if (!with_trials) return result;

    // Per-cell setups so trials share read-only state.
    std::vector<SystemSetup> cell_setups(static_cast<std::size_t>(n_cells), base);
    for (int si = 0; si < n_s; ++si)
        for (int pi = 0; pi < n_p; ++pi)
            cell_setups[static_cast<std::size_t>(si * n_p + pi)].radio.tx_power_dbm =
                cfg.powers_dbm[static_cast<std::size_t>(pi)];

    const CoarseAodDictionary dict = build_aod_dictionary(base, cfg.estimator);

    const int n_trials = cfg.num_trials;
    result.trials.resize(static_cast<std::size_t>(n_cells) *
                         static_cast<std::size_t>(n_trials));

    const std::ptrdiff_t total = static_cast<std::ptrdiff_t>(result.trials.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (std::ptrdiff_t idx = 0; idx < total; ++idx) {
        const int cell = static_cast<int>(idx / n_trials);
        const int trial = static_cast<int>(idx % n_trials);
        const int si = cell / n_p;
        const SystemSetup& setup = cell_setups[static_cast<std::size_t>(cell)];
        const Eigen::VectorXcd coeffs =
            cfg.s_norms[static_cast<std::size_t>(si)] * cfg.mc_direction;

        TrialResult& tr = result.trials[static_cast<std::size_t>(idx)];
        tr.cell_index = cell;
        tr.trial_index = trial;
        tr.seed = trial_seed(cfg.master_seed, cell, trial);
        const auto t0 = std::chrono::steady_clock::now();
        try {
            const Observation obs =
                simulate_observation(setup, cfg.ue_position, coeffs, tr.seed);
            const JlmcEstimate jl = jlmc(obs.y, setup, cfg.estimator, dict);
            const JlmcEstimate un =
                mc_unaware_estimate(obs.y, setup, cfg.estimator, dict);
            tr.err_jlmc = (jl.position - cfg.ue_position).norm();
            tr.err_unaware = (un.position - cfg.ue_position).norm();
            tr.mc_coeff_err = (jl.mc_coeffs - coeffs).norm();
            tr.iters_jlmc = jl.iterations;
            tr.iters_unaware = un.iterations;
            tr.trace_jlmc = jl.objective_trace;
            tr.trace_unaware = un.objective_trace;
            tr.trace_monotone = is_nondecreasing(jl.objective_trace) &&
                                is_nondecreasing(un.objective_trace);
            tr.ok = true;
        } catch (const std::exception& e) {
            tr.ok = false;
            tr.error = e.what();
        }
        tr.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
    }

    // RMSE aggregation in fixed trial order.
    for (int cell = 0; cell < n_cells; ++cell) {
        RmseCell& rc = result.cells[static_cast<std::size_t>(cell)];
        double sum_jl = 0.0, sum_un = 0.0;
        for (int trial = 0; trial < n_trials; ++trial) {
            const TrialResult& tr =
                result.trials[static_cast<std::size_t>(cell) * n_trials + trial];
            if (!tr.ok) {
                ++rc.n_failed;
                continue;
            }
            sum_jl += tr.err_jlmc * tr.err_jlmc;
            sum_un += tr.err_unaware * tr.err_unaware;
            ++rc.n_ok;
        }
        if (rc.n_ok > 0) {
            rc.rmse_jlmc = std::sqrt(sum_jl / rc.n_ok);
            rc.rmse_unaware = std::sqrt(sum_un / rc.n_ok);
        }
    }
    return result;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << text;
    if (!out) throw std::runtime_error("write failed for " + p.string());
}

}  // namespace

ExperimentResult run_experiment(const ScenarioConfig& cfg) {
    return run_impl(cfg, true);
}

ExperimentResult run_bounds_only(const ScenarioConfig& cfg) {
    return run_impl(cfg, false);
}

void emit_reports(const ExperimentResult& result, const ScenarioConfig& cfg,
                  const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const int n_p = static_cast<int>(cfg.powers_dbm.size());
    const int n_s = static_cast<int>(cfg.s_norms.size());

    const auto cell_row = [&](const RmseCell& c) {
        std::string row;
        row += fmt9(c.p_dbm) + "," + fmt9(c.s_norm) + "," + fmt9(c.rmse_jlmc) +
               "," + fmt9(c.rmse_unaware) + "," + fmt9(c.peb_aware) + "," +
               fmt9(c.peb_unaware) + "," + fmt9(c.bias_norm) + "," +
               std::to_string(c.n_ok);
        return row + "\n";
    };
    const std::string header =
        "p_dbm,s_norm,rmse_jlmc_m,rmse_unaware_m,peb_aware_m,peb_unaware_m,"
        "bias_norm_m,n_trials\n";

    // Power sweep: one block per coupling norm, power ascending in config order.
    std::string vs_power = header;
    for (int si = 0; si < n_s; ++si)
        for (int pi = 0; pi < n_p; ++pi)
            vs_power += cell_row(result.cells[static_cast<std::size_t>(si * n_p + pi)]);
    write_file(dir / "rmse_vs_power.csv", vs_power);

    // Coupling-norm sweep: one block per power.
    std::string vs_snorm = header;
    for (int pi = 0; pi < n_p; ++pi)
        for (int si = 0; si < n_s; ++si)
            vs_snorm += cell_row(result.cells[static_cast<std::size_t>(si * n_p + pi)]);
    write_file(dir / "rmse_vs_snorm.csv", vs_snorm);

    std::string pt = "s_norm,x_m,y_m,z_m,bias_norm_m\n";
    for (std::size_t i = 0; i < result.pseudo_true_rows.size(); ++i) {
        const PseudoTrueResult& r = result.pseudo_true_rows[i];
        pt += fmt9(cfg.pseudo_true_s_norms[i]) + "," + fmt9(r.position.x()) +
              "," + fmt9(r.position.y()) + "," + fmt9(r.position.z()) + "," +
              fmt9((r.position - cfg.ue_position).norm()) + "\n";
    }
    write_file(dir / "pseudo_true_positions.csv", pt);

    if (result.has_trials) {
        std::string tcsv =
            "cell,p_dbm,s_norm,trial,seed,ok,err_jlmc_m,err_unaware_m,"
            "mc_coeff_err,iters_jlmc,iters_unaware,trace_monotone\n";
        for (const TrialResult& tr : result.trials) {
            const RmseCell& c = result.cells[static_cast<std::size_t>(tr.cell_index)];
            tcsv += std::to_string(tr.cell_index) + "," + fmt9(c.p_dbm) + "," +
                    fmt9(c.s_norm) + "," + std::to_string(tr.trial_index) + "," +
                    std::to_string(tr.seed) + "," + (tr.ok ? "1" : "0") + "," +
                    fmt9(tr.err_jlmc) + "," + fmt9(tr.err_unaware) + "," +
                    fmt9(tr.mc_coeff_err) + "," + std::to_string(tr.iters_jlmc) +
                    "," + std::to_string(tr.iters_unaware) + "," +
                    (tr.trace_monotone ? "1" : "0") + "\n";
        }
        write_file(dir / "trials.csv", tcsv);
    } else {
        std::string bcsv =
            "p_dbm,s_norm,peb_aware_m,peb_unaware_m,bias_norm_m,"
            "peb_aware_known_m,mcrb_pos_trace_m2,lb_pos_trace_m2,flagged\n";
        for (const BoundReport& b : result.bound_cells) {
            bcsv += fmt9(b.power_dbm) + "," + fmt9(b.coeff_norm) + "," +
                    fmt9(b.peb_aware) + "," + fmt9(b.peb_unaware) + "," +
                    fmt9(b.bias_norm) + "," + fmt9(b.peb_aware_known) + "," +
                    fmt9(b.mcrb_pos_trace) + "," + fmt9(b.lb_pos_trace) + "," +
                    (b.flagged ? "1" : "0") + "\n";
        }
        write_file(dir / "bound_reports.csv", bcsv);
    }

    std::string manifest;
    manifest += "config_digest: " + config_digest(cfg) + "\n";
    manifest += "master_seed: " + std::to_string(cfg.master_seed) + "\n";
    manifest += "profile_seed: " +
                std::to_string(derive_seed(cfg.master_seed, 0xA11CEULL, 0)) + "\n";
    manifest += "cells:\n";
    for (int si = 0; si < n_s; ++si) {
        for (int pi = 0; pi < n_p; ++pi) {
            const int cell = si * n_p + pi;
            manifest += "  - index: " + std::to_string(cell) +
                        ", p_dbm: " + fmt9(cfg.powers_dbm[static_cast<std::size_t>(pi)]) +
                        ", s_norm: " + fmt9(cfg.s_norms[static_cast<std::size_t>(si)]) +
                        ", first_trial_seed: " +
                        std::to_string(trial_seed(cfg.master_seed, cell, 0)) + "\n";
        }
    }
    write_file(dir / "run_manifest.txt", manifest);
    write_file(dir / "config_resolved.json", cfg.to_json_text());
}

}  // namespace rismc
