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
#include <complex>

#include "rismc/channel.hpp"
#include "rismc/rng.hpp"

using namespace rismc;

namespace {

Eigen::VectorXcd table1_direction() {
    Eigen::VectorXcd s(3);
    s << Complex(-0.681, 0.458), Complex(-0.506, 0.0492), Complex(0.244, 0.0928);
    return s / s.norm();
}

SystemSetup small_setup(int m1 = 8, int m2 = 8, int n_t = 15,
                        std::uint64_t seed = 404) {
    SystemSetup s;
    s.radio = RadioConfig{};
    s.radio.num_pilots = n_t;
    s.ris = RisGeometry::make(m1, m2, 0.005, Position3(0.0, 5.0, 2.0),
                              default_ris_orientation());
    s.bs_position = Position3(0.0, 0.0, 2.5);
    s.profiles = RisProfileSet::random(s.ris.num_elements(), n_t, seed);
    s.supports = build_supports(s.ris, 3);
    return s;
}

const Position3 kStockUe(7.0, 3.0, 1.5);

}  // namespace

TEST_CASE("profile phases are in range and coefficients unit-modulus") {
    const RisProfileSet p = RisProfileSet::random(64, 15, 7);
    CHECK(p.phases.minCoeff() >= -std::numbers::pi);
    CHECK(p.phases.maxCoeff() <= std::numbers::pi);
    for (int t = 0; t < p.num_pilots(); ++t)
        for (int n = 0; n < p.num_elements(); ++n)
            CHECK(std::abs(std::abs(p.coeffs(n, t)) - 1.0) < 1e-12);
}

TEST_CASE("nf_steering: unit modulus, center element at 1 on odd grids") {
    const RisGeometry g = RisGeometry::make(3, 3, 0.005, Position3(0.0, 5.0, 2.0),
                                            default_ris_orientation());
    const double k = RadioConfig{}.wavenumber();
    const Eigen::VectorXcd a = nf_steering(kStockUe, g, k);
    for (int n = 0; n < 9; ++n)
        CHECK(std::abs(std::abs(a[n]) - 1.0) < 1e-12);
    // Center element of a 3x3 grid is index 4 and coincides with the
    // reference point, so its entry is exactly 1.
    CHECK(std::abs(a[4] - Complex(1.0, 0.0)) < 1e-12);
}

TEST_CASE("ff_steering: boresight gives the all-ones vector") {
    const RisGeometry g = RisGeometry::make(4, 4, 0.005, Position3::Zero(),
                                            Eigen::Matrix3d::Identity());
    const Eigen::VectorXcd a = ff_steering({0.0, 0.0}, g, 628.3);
    CHECK((a - Eigen::VectorXcd::Ones(16)).norm() < 1e-12);
}

TEST_CASE("ff_steering conjugates when the in-plane direction flips") {
    const RisGeometry g = RisGeometry::make(5, 3, 0.005, Position3::Zero(),
                                            Eigen::Matrix3d::Identity());
    const double k = RadioConfig{}.wavenumber();
    const Aod2D fwd{1.1, 0.4};
    // Same polar angle mirrored through the z-axis: u -> (-ux, -uy, uz)
    // negates every in-plane inner product (grid z = 0).
    const Aod2D mirrored{1.1, 0.4 - std::numbers::pi};
    const Eigen::VectorXcd a = ff_steering(fwd, g, k);
    const Eigen::VectorXcd b = ff_steering(mirrored, g, k);
    CHECK((a - b.conjugate()).norm() < 1e-11);
}

TEST_CASE("nf_steering converges to ff_steering in the far zone") {
    const RisGeometry g = RisGeometry::make(16, 16, 0.005, Position3(0.0, 5.0, 2.0),
                                            default_ris_orientation());
    const RadioConfig radio;
    const double k = radio.wavenumber();
    const Aod2D aod{1.2, -0.3};
    const double d = 1.0e4 * fraunhofer_distance(g, radio.wavelength());
    const Position3 far = position_from_spherical({aod, d}, g);
    const Eigen::VectorXcd nf = nf_steering(far, g, k);
    const Eigen::VectorXcd ff = ff_steering(aod, g, k);
    double worst = 0.0;
    for (int n = 0; n < g.num_elements(); ++n)
        worst = std::max(worst, std::abs(std::arg(nf[n] * std::conj(ff[n]))));
    CHECK(worst < 1e-3);
}

TEST_CASE("steering jacobian matches central differences") {
    const RisGeometry g = RisGeometry::make(6, 6, 0.005, Position3(0.0, 5.0, 2.0),
                                            default_ris_orientation());
    const double k = RadioConfig{}.wavenumber();
    const Eigen::MatrixXcd jac = nf_steering_position_jacobian(kStockUe, g, k);
    for (int c = 0; c < 3; ++c) {
        Position3 pp = kStockUe, pm = kStockUe;
        const double h = 1e-6;
        pp[c] += h;
        pm[c] -= h;
        const Eigen::VectorXcd fd =
            (nf_steering(pp, g, k) - nf_steering(pm, g, k)) / (2.0 * h);
        CHECK((jac.col(c) - fd).norm() < 1e-5 * fd.norm());
    }
}

TEST_CASE("cascaded channel with zero coupling equals the compact W-form") {
    const SystemSetup s = small_setup();
    const Eigen::VectorXcd h_exact =
        cascaded_channel(kStockUe, s, Eigen::VectorXcd::Zero(3));
    const Eigen::VectorXcd h_w = mcfree_channel(kStockUe, s);
    CHECK((h_exact - h_w).norm() < 1e-12 * h_w.norm());
    CHECK(h_w.squaredNorm() <=
          static_cast<double>(s.ris.num_elements()) * s.ris.num_elements() *
              s.radio.num_pilots);
}

TEST_CASE("channel scales linearly with a phase rotation of the BS steering") {
    // h depends linearly on a(p_b); rotating the BS steering by e^{j alpha}
    // multiplies every entry.
    const SystemSetup s = small_setup();
    const Eigen::VectorXcd coeffs = 0.05 * table1_direction();

    CoupledRisOperator op(s);
    op.set_coeffs(coeffs);
    const Eigen::VectorXcd a_ue =
        nf_steering(kStockUe, s.ris, s.radio.wavenumber());
    const Eigen::VectorXcd h = op.channel(a_ue);

    const Complex rot = std::polar(1.0, 0.83);
    const Eigen::MatrixXcd v_rot = op.apply_effective(rot * s.bs_steering());
    const Eigen::VectorXcd h_rot = v_rot.transpose() * a_ue;
    CHECK((h_rot - rot * h).norm() < 1e-12 * h.norm());
}

TEST_CASE("exact channel matches the Neumann form to second order") {
    const SystemSetup s = small_setup();
    const Eigen::VectorXcd dir = table1_direction();
    const Eigen::VectorXcd h_free = mcfree_channel(kStockUe, s);
    const Eigen::MatrixXcd g = neumann_gain_matrix(kStockUe, s);

    const auto err_at = [&](double q) {
        const Eigen::VectorXcd coeffs = q * dir;
        const Eigen::VectorXcd h = cascaded_channel(kStockUe, s, coeffs);
        return (h - (h_free + g * coeffs)).norm();
    };
    // Quadratic decay: halving |s| divides the truncation error by ~4.
    const double e1 = err_at(0.01), e2 = err_at(0.02), e4 = err_at(0.04);
    CHECK(e2 / e1 > 3.2);
    CHECK(e2 / e1 < 4.8);
    CHECK(e4 / e2 > 3.2);
    CHECK(e4 / e2 < 4.8);
    // Coarse absolute sanity at |s| = 0.05: within 10 |S Omega|^2 of exact.
    const Eigen::VectorXcd c5 = 0.05 * dir;
    const double rel =
        (cascaded_channel(kStockUe, s, c5) - (h_free + g * c5)).norm() /
        mcfree_channel(kStockUe, s).norm();
    CHECK(rel < 10.0 * 0.05 * 0.05 * 16.0);
}

TEST_CASE("channel gain magnitude: stock scenario at 0 dBm") {
    const RadioConfig radio;  // P = 0 dBm, unit gains
    const ChannelGain g = channel_gain(radio, kStockUe, Position3(0.0, 5.0, 2.0),
                                       Position3(0.0, 0.0, 2.5), 0.0);
    // lambda^2 sqrt(1 mW) / (16 pi^2 sqrt(53.25) sqrt(25.25)) = 5.4612e-10.
    CHECK(std::abs(g.beta) == doctest::Approx(5.4612e-10).epsilon(1e-4));
    CHECK(std::arg(g.beta) == 0.0);
}

TEST_CASE("channel gain scaling laws") {
    const RadioConfig radio;
    const Position3 ris(0.0, 5.0, 2.0), bs(0.0, 0.0, 2.5);
    const double b1 = std::abs(channel_gain(radio, kStockUe, ris, bs, 0.0).beta);

    // Doubling both link distances quarters the magnitude.
    const Position3 ue2 = ris + 2.0 * (kStockUe - ris);
    const Position3 bs2 = ris + 2.0 * (bs - ris);
    const double b2 = std::abs(channel_gain(radio, ue2, ris, bs2, 0.0).beta);
    CHECK(b2 == doctest::Approx(b1 / 4.0).epsilon(1e-12));

    // +20 dB transmit power is a factor of 10 in magnitude.
    RadioConfig loud = radio;
    loud.tx_power_dbm = 20.0;
    const double b3 = std::abs(channel_gain(loud, kStockUe, ris, bs, 0.0).beta);
    CHECK(b3 == doctest::Approx(10.0 * b1).epsilon(1e-12));

    CHECK_THROWS_AS(channel_gain(radio, ris, ris, bs, 0.0), std::domain_error);
}

TEST_CASE("observations: noiseless, seeded, and with calibrated noise power") {
    SystemSetup s = small_setup();
    const Eigen::VectorXcd coeffs = Eigen::VectorXcd::Zero(3);

    SUBCASE("zero bandwidth limit gives y = beta h exactly") {
        SystemSetup quiet = s;
        quiet.radio.noise_psd_dbm_per_hz = -2000.0;  // sigma^2 underflows to 0
        const Observation obs = simulate_observation(quiet, kStockUe, coeffs, 11);
        const Eigen::VectorXcd expect =
            obs.true_gain * cascaded_channel(kStockUe, quiet, coeffs);
        CHECK((obs.y - expect).norm() == 0.0);
    }

    SUBCASE("same seed reproduces bit-for-bit; different seed does not") {
        const Observation a = simulate_observation(s, kStockUe, coeffs, 42);
        const Observation b = simulate_observation(s, kStockUe, coeffs, 42);
        const Observation c = simulate_observation(s, kStockUe, coeffs, 43);
        CHECK((a.y - b.y).norm() == 0.0);
        CHECK((a.y - c.y).norm() > 0.0);
    }

    SUBCASE("noise variance matches sigma^2 within 2% over 1e5 samples") {
        // Kill the signal so y is pure noise.
        SystemSetup dark = s;
        dark.radio.tx_power_dbm = -2000.0;
        const double sigma2 = dark.radio.noise_variance_watts();
        double sum = 0.0;
        int count = 0;
        for (std::uint64_t seed = 0; count < 100000; ++seed) {
            const Observation obs =
                simulate_observation(dark, kStockUe, coeffs, seed);
            for (int t = 0; t < obs.y.size() && count < 100000; ++t, ++count)
                sum += std::norm(obs.y[t]);
        }
        CHECK(sum / count == doctest::Approx(sigma2).epsilon(0.02));
    }
}

TEST_CASE("noise variance constant is the PSD integrated over the bandwidth") {
    const RadioConfig radio;  // -173.855 dBm/Hz over 1 MHz
    CHECK(radio.noise_variance_watts() ==
          doctest::Approx(4.116233473e-15).epsilon(1e-9));
    CHECK(radio.wavelength() == doctest::Approx(0.01).epsilon(1e-12));
}
