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

#include <numbers>

namespace rismc {

inline constexpr double kSpeedOfLight = 3.0e8;  // m/s

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

// Narrowband radio parameters. Pilot symbols are fixed to 1, so the pilot
// count is the observation length. All dBm <-> watt conversions live here;
// everything downstream works in SI units.
struct RadioConfig {
    double carrier_hz = 30.0e9;
    double tx_power_dbm = 0.0;
    double tx_gain = 1.0;
    double rx_gain = 1.0;
    double noise_psd_dbm_per_hz = -173.855;
    double bandwidth_hz = 1.0e6;
    int num_pilots = 15;

    double wavelength() const { return kSpeedOfLight / carrier_hz; }
    double wavenumber() const { return 2.0 * std::numbers::pi / wavelength(); }
    double tx_power_watts() const { return dbm_to_watts(tx_power_dbm); }

    // Per-sample complex noise variance: the noise PSD integrated over the
    // pilot bandwidth.
    double noise_variance_watts() const {
        return dbm_to_watts(noise_psd_dbm_per_hz) * bandwidth_hz;
    }

    void validate() const;
};

}  // namespace rismc
