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

#include "rismc/radio.hpp"

#include <cmath>
#include <stdexcept>

namespace rismc {

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

void RadioConfig::validate() const {
    if (!(carrier_hz > 0.0))
        throw std::invalid_argument("RadioConfig: carrier_hz must be positive");
    if (!(bandwidth_hz > 0.0))
        throw std::invalid_argument("RadioConfig: bandwidth_hz must be positive");
    if (!(tx_gain > 0.0) || !(rx_gain > 0.0))
        throw std::invalid_argument("RadioConfig: antenna gains must be positive");
    if (num_pilots < 1)
        throw std::invalid_argument("RadioConfig: num_pilots must be >= 1");
    if (!std::isfinite(tx_power_dbm) || !std::isfinite(noise_psd_dbm_per_hz))
        throw std::invalid_argument("RadioConfig: power fields must be finite");
}

}  // namespace rismc
