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

#include "rismc/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rismc/rng.hpp"

namespace rismc {

RisProfileSet RisProfileSet::from_phases(const Eigen::MatrixXd& phases) {
    RisProfileSet p;
    p.phases = phases;
    p.coeffs = phases.unaryExpr(
        [](double w) { return std::polar(1.0, w); });
    return p;
}

RisProfileSet RisProfileSet::random(int num_elements, int num_pilots,
                                    std::uint64_t seed) {
    RandomStream rng(seed);
    Eigen::MatrixXd phases(num_elements, num_pilots);
    for (int t = 0; t < num_pilots; ++t)
        for (int n = 0; n < num_elements; ++n)
            phases(n, t) = rng.uniform(-std::numbers::pi, std::numbers::pi);
    return from_phases(phases);
}

Eigen::VectorXcd nf_steering(const Position3& p,
                             const std::vector<Position3>& elements,
                             const Position3& center, double wavenumber) {
    const double d_center = (p - center).norm();
    if (!(d_center > 0.0))
        throw std::domain_error("nf_steering: point coincides with the RIS center");
    const Eigen::Index m = static_cast<Eigen::Index>(elements.size());
    Eigen::VectorXcd a(m);
    for (Eigen::Index n = 0; n < m; ++n) {
        const double d_n = (p - elements[static_cast<std::size_t>(n)]).norm();
        if (!(d_n > 0.0))
            throw std::domain_error("nf_steering: point coincides with an element");
        a[n] = std::polar(1.0, -wavenumber * (d_n - d_center));
    }
    return a;
}

Eigen::VectorXcd nf_steering(const Position3& p, const RisGeometry& geom,
                             double wavenumber) {
    return nf_steering(p, element_positions(geom), geom.center, wavenumber);
}

Eigen::MatrixXcd nf_steering_position_jacobian(const Position3& p,
                                               const RisGeometry& geom,
                                               double wavenumber) {
    const auto elems = element_positions(geom);
    const Eigen::Vector3d to_center = p - geom.center;
    const double d_center = to_center.norm();
    if (!(d_center > 0.0))
        throw std::domain_error("nf_steering_position_jacobian: degenerate point");
    const Eigen::Vector3d u_center = to_center / d_center;
    Eigen::MatrixXcd jac(geom.num_elements(), 3);
    const Complex factor(0.0, -wavenumber);
    for (int n = 0; n < geom.num_elements(); ++n) {
        const Eigen::Vector3d dv = p - elems[static_cast<std::size_t>(n)];
        const double d_n = dv.norm();
        const Complex a_n = std::polar(1.0, -wavenumber * (d_n - d_center));
        const Eigen::Vector3d grad = dv / d_n - u_center;
        for (int c = 0; c < 3; ++c) jac(n, c) = a_n * factor * grad[c];
    }
    return jac;
}

Eigen::VectorXcd ff_steering(const Aod2D& aod, const RisGeometry& geom,
                             double wavenumber) {
    const auto local = element_positions_local(geom);
    const Eigen::Vector3d u = unit_vector(aod);
    Eigen::VectorXcd a(geom.num_elements());
    for (int n = 0; n < geom.num_elements(); ++n)
        a[n] = std::polar(1.0, wavenumber * local[static_cast<std::size_t>(n)].dot(u));
    return a;
}

Eigen::VectorXcd SystemSetup::bs_steering() const {
    return nf_steering(bs_position, ris, radio.wavenumber());
}

CoupledRisOperator::CoupledRisOperator(const SystemSetup& setup)
    : setup_(setup),
      solver_(setup.ris.num_elements(), setup.supports),
      a_bs_(setup.bs_steering()),
      coeffs_(Eigen::VectorXcd::Zero(setup.num_mc_coeffs())) {
    set_coeffs(coeffs_);
}

void CoupledRisOperator::set_coeffs(const Eigen::VectorXcd& coeffs) {
    const Eigen::MatrixXcd& w = setup_.profiles.coeffs;
    coeffs_ = coeffs;
    v_.resize(w.rows(), w.cols());
    for (int t = 0; t < w.cols(); ++t) {
        const Eigen::VectorXcd omega = w.col(t);
        v_.col(t) = omega.cwiseProduct(solver_.solve(coeffs, omega, a_bs_));
    }
}

Eigen::MatrixXcd CoupledRisOperator::apply_effective(const Eigen::VectorXcd& rhs) {
    const Eigen::MatrixXcd& w = setup_.profiles.coeffs;
    Eigen::MatrixXcd out(w.rows(), w.cols());
    for (int t = 0; t < w.cols(); ++t) {
        const Eigen::VectorXcd omega = w.col(t);
        out.col(t) = omega.cwiseProduct(solver_.solve(coeffs_, omega, rhs));
    }
    return out;
}

Eigen::VectorXcd cascaded_channel(const Position3& ue, const SystemSetup& setup,
                                  const Eigen::VectorXcd& coeffs) {
    CoupledRisOperator op(setup);
    op.set_coeffs(coeffs);
    return op.channel(nf_steering(ue, setup.ris, setup.radio.wavenumber()));
}

Eigen::VectorXcd mcfree_channel(const Position3& ue, const SystemSetup& setup) {
    const double k = setup.radio.wavenumber();
    const Eigen::VectorXcd b =
        nf_steering(ue, setup.ris, k).cwiseProduct(setup.bs_steering());
    return setup.profiles.coeffs.transpose() * b;
}

Eigen::MatrixXcd neumann_gain_matrix(const Position3& ue, const SystemSetup& setup) {
    const double k = setup.radio.wavenumber();
    const Eigen::VectorXcd a_ue = nf_steering(ue, setup.ris, k);
    const Eigen::VectorXcd a_bs = setup.bs_steering();
    const Eigen::MatrixXcd& w = setup.profiles.coeffs;
    const int n_t = setup.profiles.num_pilots();
    const int n_m = setup.num_mc_coeffs();
    std::vector<SparseComplex> supports_c;
    supports_c.reserve(setup.supports.size());
    for (const auto& a : setup.supports) supports_c.push_back(a.cast<Complex>());
    Eigen::MatrixXcd g(n_t, n_m);
    for (int t = 0; t < n_t; ++t) {
        const Eigen::VectorXcd left = w.col(t).cwiseProduct(a_ue);
        const Eigen::VectorXcd right = w.col(t).cwiseProduct(a_bs);
        for (int i = 0; i < n_m; ++i)
            g(t, i) = left.cwiseProduct(supports_c[static_cast<std::size_t>(i)] * right).sum();
    }
    return g;
}

ChannelGain channel_gain(const RadioConfig& radio, const Position3& ue,
                         const Position3& ris_center, const Position3& bs,
                         double phase_offset) {
    const double d_ur = (ue - ris_center).norm();
    const double d_rb = (ris_center - bs).norm();
    if (!(d_ur > 0.0) || !(d_rb > 0.0))
        throw std::domain_error("channel_gain: zero link distance");
    const double lambda = radio.wavelength();
    const double pi2 = std::numbers::pi * std::numbers::pi;
    const double mag =
        lambda * lambda *
        std::sqrt(radio.tx_power_watts() * radio.tx_gain * radio.rx_gain) /
        (16.0 * pi2 * d_ur * d_rb);
    return {std::polar(mag, phase_offset), phase_offset};
}

Observation simulate_observation(const SystemSetup& setup, const Position3& ue,
                                 const Eigen::VectorXcd& coeffs,
                                 std::uint64_t seed) {
    RandomStream rng(seed);
    const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const ChannelGain gain =
        channel_gain(setup.radio, ue, setup.ris.center, setup.bs_position, phase);
    const Eigen::VectorXcd h = cascaded_channel(ue, setup, coeffs);

    Observation obs;
    obs.noise_var = setup.radio.noise_variance_watts();
    obs.y = gain.beta * h;
    const double sigma = std::sqrt(obs.noise_var);
    if (sigma > 0.0)
        for (int t = 0; t < obs.y.size(); ++t)
            obs.y[t] += sigma * rng.complex_normal();
    obs.true_position = ue;
    obs.true_coeffs = coeffs;
    obs.true_gain = gain.beta;
    obs.seed = seed;
    return obs;
}

}  // namespace rismc
