#pragma once

// Reference computations used only by the tests. They deliberately avoid the
// library's code paths (no Eigen, no pattern search, no bisection).

#include <array>
#include <cmath>
#include <complex>
#include <vector>

namespace oracle {

using cd = std::complex<double>;
using M2 = std::array<std::array<cd, 2>, 2>;
using M4 = std::array<std::array<cd, 4>, 4>;
using V3 = std::array<double, 3>;

inline M2 pauli(int j) {
  const cd i(0, 1);
  if (j == 0) return {{{0.0, 1.0}, {1.0, 0.0}}};
  if (j == 1) return {{{0.0, -i}, {i, 0.0}}};
  if (j == 2) return {{{1.0, 0.0}, {0.0, -1.0}}};
  return {{{1.0, 0.0}, {0.0, 1.0}}};
}

inline M4 kron(const M2& a, const M2& b) {
  M4 out{};
  for (int r1 = 0; r1 < 2; ++r1)
    for (int c1 = 0; c1 < 2; ++c1)
      for (int r2 = 0; r2 < 2; ++r2)
        for (int c2 = 0; c2 < 2; ++c2) out[2 * r1 + r2][2 * c1 + c2] = a[r1][c1] * b[r2][c2];
  return out;
}

inline M4 outer(const std::array<cd, 4>& psi) {
  M4 out{};
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) out[r][c] = psi[r] * std::conj(psi[c]);
  return out;
}

inline double trace_product(const M4& a, const M4& b) {
  cd t = 0;
  for (int r = 0; r < 4; ++r)
    for (int k = 0; k < 4; ++k) t += a[r][k] * b[k][r];
  return t.real();
}

// T_jk = Tr[rho sigma_j (x) sigma_k] by explicit summation.
inline std::array<std::array<double, 3>, 3> tensor(const M4& rho) {
  std::array<std::array<double, 3>, 3> t{};
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) t[j][k] = trace_product(rho, kron(pauli(j), pauli(k)));
  return t;
}

inline double dot(const V3& a, const V3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

inline V3 cross(const V3& a, const V3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

inline double sum_abs(const V3& v, const std::vector<V3>& dirs) {
  double s = 0;
  for (const auto& e : dirs) s += std::abs(dot(v, e));
  return s;
}

// min over the sphere of sum |v . e_i|. The objective is linear on each
// sign cell and a linear function has no interior minimum on the sphere
// (f >= 0 excludes -w/|w|), so the minimum sits on some great circle
// v . e_i = 0: at a crossing of two such circles or inside one arc.
// Crossings are enumerated exactly; each circle is scanned densely.
inline double geometric_factor_exhaustive(const std::vector<V3>& dirs,
                                          int circle_samples = 200000) {
  double best = 1e300;
  for (std::size_t i = 0; i < dirs.size(); ++i)
    for (std::size_t j = i + 1; j < dirs.size(); ++j) {
      V3 c = cross(dirs[i], dirs[j]);
      const double n = std::sqrt(dot(c, c));
      if (n < 1e-12) continue;
      for (auto& x : c) x /= n;
      best = std::min(best, sum_abs(c, dirs));
    }
  for (const auto& e : dirs) {
    V3 a = std::abs(e[0]) < 0.9 ? V3{1, 0, 0} : V3{0, 1, 0};
    V3 t1 = cross(e, a);
    const double n1 = std::sqrt(dot(t1, t1));
    for (auto& x : t1) x /= n1;
    const V3 t2 = cross(e, t1);
    for (int k = 0; k < circle_samples; ++k) {
      const double th = 2.0 * M_PI * k / circle_samples;
      const V3 v{std::cos(th) * t1[0] + std::sin(th) * t2[0],
                 std::cos(th) * t1[1] + std::sin(th) * t2[1],
                 std::cos(th) * t1[2] + std::sin(th) * t2[2]};
      best = std::min(best, sum_abs(v, dirs));
    }
  }
  return best;
}

// Roots of b V cos(x) + s sin(x) = b with x = phi/2, via the amplitude-phase
// form R cos(x - alpha). Returns {lo, hi} in radians or {-1, -1} if none.
inline std::array<double, 2> region_closed_form(double bound, double sine, double v) {
  const double a = bound * v;
  const double r = std::hypot(a, sine);
  if (r <= bound) return {-1, -1};
  const double alpha = std::atan2(sine, a);
  const double d = std::acos(bound / r);
  return {std::max(0.0, 2 * (alpha - d)), 2 * (alpha + d)};
}

}  // namespace oracle
