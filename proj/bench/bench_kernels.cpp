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
//
// Times the OpenMP kernels against their serial references:
//   - coarse AOD dictionary construction
//   - dictionary correlation scan
//   - pseudo-true cube scan
//   - a batch of coupled-profile solves (Monte Carlo inner loop shape)
//
// Usage: bench_kernels [ris_side] [repeats]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>

#include "rismc/bounds.hpp"
#include "rismc/estimator.hpp"
#include "rismc/harness.hpp"
#include "rismc/kernels.hpp"
#include "rismc/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

double time_of(const std::function<void()>& fn, int repeats) {
    fn();  // warm-up
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < repeats; ++i) fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count() / repeats;
}

void report(const char* name, double serial_s, double parallel_s) {
    std::printf("%-28s %12.3f ms %12.3f ms %8.2fx\n", name, serial_s * 1e3,
                parallel_s * 1e3, serial_s / parallel_s);
}

}  // namespace

int main(int argc, char** argv) {
    const int side = argc > 1 ? std::atoi(argv[1]) : 32;
    const int repeats = argc > 2 ? std::atoi(argv[2]) : 5;

    rismc::ScenarioConfig cfg = rismc::ScenarioConfig::preset(rismc::Preset::desk);
    cfg.ris_rows = cfg.ris_cols = side;
    const rismc::SystemSetup setup = rismc::make_setup(cfg);

#ifdef _OPENMP
    std::printf("threads: %d, RIS %dx%d, %d repeats\n", omp_get_max_threads(),
                side, side, repeats);
#else
    std::printf("OpenMP disabled, RIS %dx%d, %d repeats\n", side, side, repeats);
#endif
    std::printf("%-28s %15s %15s %9s\n", "kernel", "serial", "openmp", "speedup");

    // Dictionary build.
    const double dict_serial = time_of(
        [&] { rismc::build_aod_dictionary_serial(setup, cfg.estimator); }, repeats);
    const double dict_par = time_of(
        [&] { rismc::build_aod_dictionary(setup, cfg.estimator); }, repeats);
    report("aod_dictionary_build", dict_serial, dict_par);

    // Correlation scan.
    const rismc::CoarseAodDictionary dict =
        rismc::build_aod_dictionary(setup, cfg.estimator);
    const rismc::Observation obs = rismc::simulate_observation(
        setup, cfg.ue_position, 0.05 * cfg.mc_direction, 99);
    const double scan_serial =
        time_of([&] { rismc::coarse_aod_serial(obs.y, dict); }, repeats * 10);
    const double scan_par =
        time_of([&] { rismc::coarse_aod(obs.y, dict); }, repeats * 10);
    report("aod_correlation_scan", scan_serial, scan_par);

    // Pseudo-true cube scan (grid only: coarse step, no polish).
    {
        const auto cube = [&](bool parallel) {
            const std::ptrdiff_t n = 11 * 11 * 11;
            const auto score = [&](std::ptrdiff_t idx) {
                const int iz = static_cast<int>(idx % 11);
                const int iy = static_cast<int>((idx / 11) % 11);
                const int ix = static_cast<int>(idx / 121);
                const rismc::Position3 p =
                    cfg.ue_position + rismc::Position3(-0.5 + 0.1 * ix,
                                                       -0.5 + 0.1 * iy,
                                                       -0.5 + 0.1 * iz);
                const Eigen::VectorXcd h = rismc::mcfree_channel(p, setup);
                return std::norm(h.dot(obs.y)) / h.squaredNorm();
            };
            if (parallel)
                rismc::argmax_scan(n, score);
            else
                rismc::argmax_scan_serial(n, score);
        };
        const double cube_serial = time_of([&] { cube(false); }, repeats);
        const double cube_par = time_of([&] { cube(true); }, repeats);
        report("pseudo_true_cube_scan", cube_serial, cube_par);
    }

    // Batch of coupled-profile rebuilds (the JLMC MC-block inner loop).
    {
        rismc::CoupledRisOperator op(setup);
        rismc::RandomStream rng(5);
        const auto batch = [&] {
            Eigen::VectorXcd s(3);
            for (int i = 0; i < 3; ++i)
                s[i] = 0.03 * rng.complex_normal();
            op.set_coeffs(s / std::max(1.0, s.norm() / 0.05));
        };
        const double t = time_of(batch, repeats * 5);
        std::printf("%-28s %12.3f ms per rebuild (%d pilots)\n",
                    "coupled_profile_rebuild", t * 1e3, setup.radio.num_pilots);
    }
    return 0;
}
