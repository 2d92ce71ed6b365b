#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>

namespace leggett {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

inline bool is_unit(const Vec3& v, double tol = 1e-9) {
  return std::abs(v.norm() - 1.0) <= tol;
}

inline std::array<double, 3> to_array(const Vec3& v) { return {v.x(), v.y(), v.z()}; }

}  // namespace leggett
