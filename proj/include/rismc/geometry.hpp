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

#include <Eigen/Dense>
#include <vector>

namespace rismc {

using Position3 = Eigen::Vector3d;

// 2D angle of departure in the RIS local frame: elevation theta in [0, pi]
// measured from the local +z axis (the surface normal), azimuth phi in
// (-pi, pi]. Convention: phi = 0 at boresight (theta = 0), where the
// azimuth is otherwise undefined.
struct Aod2D {
    double theta = 0.0;
    double phi = 0.0;
};

struct LocalSpherical {
    Aod2D aod;
    double distance = 0.0;  // meters, > 0
};

// Default RIS orientation: local x -> global +x, local y -> global +z, and
// the surface normal (local z) -> global -y. With the stock scenario this
// places both the BS and the UE in the front half-space of the surface.
Eigen::Matrix3d default_ris_orientation();

// Planar RIS: rows x cols elements on a centered grid in the local xy-plane,
// element n = (i, j) in row-major order from the top-left corner.
struct RisGeometry {
    int rows = 1;
    int cols = 1;
    double spacing = 0.005;  // element pitch, meters
    Position3 center = Position3::Zero();
    Eigen::Matrix3d orientation = Eigen::Matrix3d::Identity();

    // Validating factory: rejects non-positive sizes/spacing and any
    // orientation that is not a proper rotation (R^T R = I, det R = +1,
    // both within 1e-12).
    static RisGeometry make(int rows, int cols, double spacing,
                            const Position3& center,
                            const Eigen::Matrix3d& orientation);

    int num_elements() const { return rows * cols; }

    // Diagonal of the rectangle spanned by the outermost element centers.
    double aperture_diagonal() const;
};

// Element coordinates in the local frame (z = 0 plane). Element (i, j) maps
// to [(j - (cols-1)/2) * spacing, ((rows-1)/2 - i) * spacing, 0].
std::vector<Position3> element_positions_local(const RisGeometry& geom);

// Global element coordinates: R * local + center.
std::vector<Position3> element_positions(const RisGeometry& geom);

// u(psi) = [sin(theta)cos(phi), sin(theta)sin(phi), cos(theta)]^T.
Eigen::Vector3d unit_vector(const Aod2D& aod);

// Local spherical coordinates of a global point as seen from the RIS:
// theta = arccos([p_loc]_3 / |p_loc|), phi = atan2([p_loc]_2, [p_loc]_1)
// with p_loc = R^T (p - center). Throws for p == center.
LocalSpherical aod_from_position(const Position3& p, const RisGeometry& geom);

// Inverse map: center + distance * R * u(aod).
Position3 position_from_spherical(const LocalSpherical& ls, const RisGeometry& geom);

// Near-field boundaries for the given aperture: Fraunhofer distance 2 D^2 /
// lambda and Fresnel bound 0.62 sqrt(D^3 / lambda), D the aperture diagonal.
double fraunhofer_distance(const RisGeometry& geom, double wavelength);
double fresnel_distance(const RisGeometry& geom, double wavelength);

}  // namespace rismc
