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

#include <complex>
#include <cstdint>
#include <random>

namespace rismc {

// SplitMix64 mixing step.
std::uint64_t splitmix64(std::uint64_t x);

// Stream seed derived from (base, a, b). Used for per-trial seeds so that
// results do not depend on scheduling order.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b);

// Deterministic random stream. All draws are defined on top of raw
// mt19937_64 output (not std::*_distribution, whose sequences are
// implementation-defined), so streams are reproducible across toolchains.
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform01();
    double uniform(double lo, double hi);

    // Standard normal, Box-Muller.
    double normal();

    // Circularly-symmetric complex normal with E|z|^2 = 1.
    std::complex<double> complex_normal();

  private:
    std::mt19937_64 engine_;
};

}  // namespace rismc
