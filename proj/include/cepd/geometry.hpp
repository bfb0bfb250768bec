#ifndef CEPD_GEOMETRY_HPP
#define CEPD_GEOMETRY_HPP

#include <array>
#include <cmath>
#include <cstdint>

namespace cepd {

using Vec3 = std::array<double, 3>;
using IVec3 = std::array<int, 3>;

// Rows are vectors: (M*v)_i = sum_j M[i][j] v[j]; row_apply(v, M) treats v as
// a row vector of coefficients on the rows of M, which is the convention used
// for fractional -> cartesian conversion throughout.
using Mat3 = std::array<Vec3, 3>;

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

inline Vec3 mat_apply(const Mat3& m, const Vec3& v) {
  return {dot(m[0], v), dot(m[1], v), dot(m[2], v)};
}

// v interpreted as coefficients on the rows of m: v[0]*m[0] + v[1]*m[1] + v[2]*m[2]
inline Vec3 row_apply(const Vec3& v, const Mat3& m) {
  return v[0] * m[0] + v[1] * m[1] + v[2] * m[2];
}

inline double det(const Mat3& m) { return dot(m[0], cross(m[1], m[2])); }

inline Mat3 transpose(const Mat3& m) {
  Mat3 t;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) t[i][j] = m[j][i];
  return t;
}

inline Mat3 mat_mul(const Mat3& a, const Mat3& b) {
  Mat3 c{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0;
      for (int k = 0; k < 3; ++k) s += a[i][k] * b[k][j];
      c[i][j] = s;
    }
  return c;
}

inline Mat3 inverse(const Mat3& m) {
  const double d = det(m);
  const Vec3 c0 = cross(m[1], m[2]);
  const Vec3 c1 = cross(m[2], m[0]);
  const Vec3 c2 = cross(m[0], m[1]);
  // inverse rows are the scaled cofactor columns
  Mat3 inv;
  for (int i = 0; i < 3; ++i) {
    inv[i][0] = c0[i] / d;
    inv[i][1] = c1[i] / d;
    inv[i][2] = c2[i] / d;
  }
  return inv;
}

inline Mat3 identity3() { return {Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}}; }

inline bool nearly_equal(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

inline bool nearly_equal(const Vec3& a, const Vec3& b, double tol) {
  return nearly_equal(a[0], b[0], tol) && nearly_equal(a[1], b[1], tol) && nearly_equal(a[2], b[2], tol);
}

inline bool nearly_equal(const Mat3& a, const Mat3& b, double tol) {
  return nearly_equal(a[0], b[0], tol) && nearly_equal(a[1], b[1], tol) && nearly_equal(a[2], b[2], tol);
}

// Nearest integer and the distance to it, used for on-lattice tests.
inline double round_err(double v) { return std::fabs(v - std::round(v)); }

inline int floor_mod(int a, int n) {
  int r = a % n;
  return r < 0 ? r + n : r;
}

}  // namespace cepd

#endif
