#pragma once
// Shared basic types and small numeric helpers.

#include <complex>
#include <array>
#include <vector>
#include <string>
#include <cmath>
#include <stdexcept>

namespace fermicurve {

using cplx = std::complex<double>;
using std::size_t;

inline constexpr double PI = 3.141592653589793238462643383279502884;
inline constexpr cplx I{0.0, 1.0};

// Real 2-vector (lattice vectors, dual vectors, real momenta).
struct Vec2 {
  double x = 0, y = 0;
  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}
  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator-() const { return {-x, -y}; }
};
inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

// Complexified 2-vector: a point of the complexified momentum plane.
struct CVec2 {
  cplx x{0.0, 0.0}, y{0.0, 0.0};
  CVec2() = default;
  CVec2(cplx x_, cplx y_) : x(x_), y(y_) {}
  CVec2(const Vec2& v) : x(v.x), y(v.y) {}
  CVec2 operator+(const CVec2& o) const { return {x + o.x, y + o.y}; }
  CVec2 operator-(const CVec2& o) const { return {x - o.x, y - o.y}; }
  CVec2 operator*(cplx s) const { return {x * s, y * s}; }
  CVec2 operator-() const { return {-x, -y}; }
};
inline CVec2 operator*(cplx s, const CVec2& v) { return v * s; }

// Euclidean bilinear form g(a,b) = a1 b1 + a2 b2, extended complex-bilinearly.
inline double gform(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline cplx gform(const CVec2& a, const CVec2& b) { return a.x * b.x + a.y * b.y; }

inline double norm2(const Vec2& a) { return gform(a, a); }

// Approximate comparison helpers used across tests and acceptance checks.
inline bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }
inline bool close(cplx a, cplx b, double tol) { return std::abs(a - b) <= tol; }

}  // namespace fermicurve
