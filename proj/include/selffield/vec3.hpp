#pragma once

#include <array>
#include <cmath>
#include <complex>

namespace selffield {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
  constexpr double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }

  constexpr Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  constexpr Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
  constexpr Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }

  friend constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
  friend constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
  friend constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
  friend constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
  friend constexpr Vec3 operator/(Vec3 a, double s) { return a *= (1.0 / s); }
  friend constexpr Vec3 operator-(Vec3 a) { return a *= -1.0; }
  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

/// Complex 3-vector for Fourier-space fields.
struct CVec3 {
  std::complex<double> x, y, z;

  std::complex<double> operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

  friend CVec3 operator*(std::complex<double> s, const CVec3& v) { return {s * v.x, s * v.y, s * v.z}; }
  friend CVec3 operator*(double s, const CVec3& v) { return {s * v.x, s * v.y, s * v.z}; }
};

inline CVec3 to_complex(const Vec3& v) { return {v.x, v.y, v.z}; }

/// Bilinear (no conjugation) product q . v.
inline std::complex<double> dot(const Vec3& q, const CVec3& v) { return q.x * v.x + q.y * v.y + q.z * v.z; }

inline double norm(const CVec3& v) {
  return std::sqrt(std::norm(v.x) + std::norm(v.y) + std::norm(v.z));
}

}  // namespace selffield
