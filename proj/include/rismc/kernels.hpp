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

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rismc {

struct ScanResult {
    std::ptrdiff_t index = -1;
    double value = 0.0;
};

// Serial reference scan: index of the maximum score, ties broken toward the
// lowest index. score(i) must be a pure function of i.
template <class ScoreFn>
ScanResult argmax_scan_serial(std::ptrdiff_t n, ScoreFn&& score) {
    ScanResult best;
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const double v = score(i);
        if (best.index < 0 || v > best.value) {
            best.index = i;
            best.value = v;
        }
    }
    return best;
}

// OpenMP scan with the same contract as argmax_scan_serial. Because each
// score is an independent function of its index and the combination rule is
// order-free (higher value wins, equal values prefer the lower index), the
// result is identical to the serial reference for any thread count.
template <class ScoreFn>
ScanResult argmax_scan(std::ptrdiff_t n, ScoreFn&& score) {
    ScanResult best;
#ifdef _OPENMP
#pragma omp parallel
    {
        ScanResult local;
#pragma omp for nowait
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            const double v = score(i);
            if (local.index < 0 || v > local.value ||
                (v == local.value && i < local.index)) {
                local.index = i;
                local.value = v;
            }
        }
#pragma omp critical(rismc_argmax_scan)
        {
            if (local.index >= 0 &&
                (best.index < 0 || local.value > best.value ||
                 (local.value == best.value && local.index < best.index))) {
                best = local;
            }
        }
    }
#else
    best = argmax_scan_serial(n, score);
#endif
    return best;
}

// Parallel-for over [0, n) used by embarrassingly parallel fill loops whose
// iterations write disjoint slots.
template <class BodyFn>
void parallel_for(std::ptrdiff_t n, BodyFn&& body) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
#else
    for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
#endif
}

}  // namespace rismc
