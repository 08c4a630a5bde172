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

#include "rismc/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace rismc {

Eigen::Matrix3d default_ris_orientation() {
    Eigen::Matrix3d r;
    // Columns are the local axes expressed in the global frame.
    r << 1.0, 0.0, 0.0,   //
        0.0, 0.0, -1.0,   //
        0.0, 1.0, 0.0;
    return r;
}

RisGeometry RisGeometry::make(int rows, int cols, double spacing,
                              const Position3& center,
                              const Eigen::Matrix3d& orientation) {
    if (rows < 1 || cols < 1)
        throw std::invalid_argument("RisGeometry: rows and cols must be >= 1");
    if (!(spacing > 0.0) || !std::isfinite(spacing))
        throw std::invalid_argument("RisGeometry: spacing must be positive and finite");
    if (!center.allFinite())
        throw std::invalid_argument("RisGeometry: center must be finite");
    const double ortho_err = (orientation.transpose() * orientation -
                              Eigen::Matrix3d::Identity())
                                 .cwiseAbs()
                                 .maxCoeff();
    if (ortho_err > 1e-12)
        throw std::invalid_argument("RisGeometry: orientation is not orthonormal");
    if (std::abs(orientation.determinant() - 1.0) > 1e-12)
        throw std::invalid_argument("RisGeometry: orientation must have det +1");
    RisGeometry g;
    g.rows = rows;
    g.cols = cols;
    g.spacing = spacing;
    g.center = center;
    g.orientation = orientation;
    return g;
}

double RisGeometry::aperture_diagonal() const {
    const double w = (cols - 1) * spacing;
    const double h = (rows - 1) * spacing;
    return std::sqrt(w * w + h * h);
}

std::vector<Position3> element_positions_local(const RisGeometry& geom) {
    std::vector<Position3> out;
    out.reserve(static_cast<std::size_t>(geom.num_elements()));
    const double x0 = (geom.cols - 1) / 2.0;
    const double y0 = (geom.rows - 1) / 2.0;
    for (int i = 0; i < geom.rows; ++i)
        for (int j = 0; j < geom.cols; ++j)
            out.emplace_back((j - x0) * geom.spacing, (y0 - i) * geom.spacing, 0.0);
    return out;
}

std::vector<Position3> element_positions(const RisGeometry& geom) {
    std::vector<Position3> out = element_positions_local(geom);
    for (Position3& p : out) p = geom.orientation * p + geom.center;
    return out;
}

Eigen::Vector3d unit_vector(const Aod2D& aod) {
    const double st = std::sin(aod.theta);
    return {st * std::cos(aod.phi), st * std::sin(aod.phi), std::cos(aod.theta)};
}

LocalSpherical aod_from_position(const Position3& p, const RisGeometry& geom) {
    const Eigen::Vector3d local = geom.orientation.transpose() * (p - geom.center);
    const double d = local.norm();
    if (!(d > 0.0))
        throw std::domain_error("aod_from_position: point coincides with the RIS center");
    LocalSpherical ls;
    ls.distance = d;
    ls.aod.theta = std::acos(std::clamp(local.z() / d, -1.0, 1.0));
    // atan2(0, 0) is undefined; boresight maps to phi = 0 by convention.
    ls.aod.phi = (local.x() == 0.0 && local.y() == 0.0)
                     ? 0.0
                     : std::atan2(local.y(), local.x());
    return ls;
}

Position3 position_from_spherical(const LocalSpherical& ls, const RisGeometry& geom) {
    if (!(ls.distance > 0.0))
        throw std::domain_error("position_from_spherical: distance must be positive");
    return geom.orientation * (ls.distance * unit_vector(ls.aod)) + geom.center;
}

double fraunhofer_distance(const RisGeometry& geom, double wavelength) {
    const double d = geom.aperture_diagonal();
    return 2.0 * d * d / wavelength;
}

double fresnel_distance(const RisGeometry& geom, double wavelength) {
    const double d = geom.aperture_diagonal();
    return 0.62 * std::sqrt(d * d * d / wavelength);
}

}  // namespace rismc
