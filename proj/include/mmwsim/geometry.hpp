// SPDX-License-Identifier: Apache-2.0
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


#ifndef MMWSIM_GEOMETRY_HPP
#define MMWSIM_GEOMETRY_HPP

namespace mmwsim
{

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSpeedOfLight = 299792458.0;

struct Vec3
{
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    bool operator==(const Vec3&) const = default;

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const;
    double norm2d() const;
};

// Spherical direction: zenith angle theta in [0, pi] measured from +z,
// azimuth phi in (-pi, pi] measured from +x in the horizontal plane.
struct Direction
{
    double zenith = kPi / 2.0;
    double azimuth = 0.0;
};

double distance_2d(const Vec3& a, const Vec3& b);
double distance_3d(const Vec3& a, const Vec3& b);

// Global direction of `to` as seen from `from`.
Direction direction_between(const Vec3& from, const Vec3& to);

// The same direction expressed in the frame of a panel whose boresight
// points at azimuth `boresight_azimuth`; the result azimuth is wrapped to
// (-pi, pi].
Direction to_local(const Direction& global, double boresight_azimuth);
Direction to_global(const Direction& local, double boresight_azimuth);

Vec3 unit_vector(const Direction& d);

// Angle between two directions (radians, in [0, pi]).
double angular_separation(const Direction& a, const Direction& b);

double wrap_angle(double a);

} // namespace mmwsim

#endif
