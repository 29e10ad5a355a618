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


#include "mmwsim/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace mmwsim
{

double Vec3::norm() const
{
    return std::sqrt(x * x + y * y + z * z);
}

double Vec3::norm2d() const
{
    return std::hypot(x, y);
}

double distance_2d(const Vec3& a, const Vec3& b)
{
    return (b - a).norm2d();
}

double distance_3d(const Vec3& a, const Vec3& b)
{
    return (b - a).norm();
}

double wrap_angle(double a)
{
    a = std::remainder(a, 2.0 * kPi);
    if (a <= -kPi)
        a += 2.0 * kPi;
    return a;
}

Direction direction_between(const Vec3& from, const Vec3& to)
{
    Vec3 d = to - from;
    double r = d.norm();
    Direction out;
    if (r == 0.0)
        return out;
    out.zenith = std::acos(std::clamp(d.z / r, -1.0, 1.0));
    out.azimuth = std::atan2(d.y, d.x);
    return out;
}

Direction to_local(const Direction& global, double boresight_azimuth)
{
    return {global.zenith, wrap_angle(global.azimuth - boresight_azimuth)};
}

Direction to_global(const Direction& local, double boresight_azimuth)
{
    return {local.zenith, wrap_angle(local.azimuth + boresight_azimuth)};
}

Vec3 unit_vector(const Direction& d)
{
    double s = std::sin(d.zenith);
    return {s * std::cos(d.azimuth), s * std::sin(d.azimuth), std::cos(d.zenith)};
}

double angular_separation(const Direction& a, const Direction& b)
{
    double c = unit_vector(a).dot(unit_vector(b));
    return std::acos(std::clamp(c, -1.0, 1.0));
}

} // namespace mmwsim
