#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace pulshom {

// Domain-level failure modes.  Geometry and config problems map to exit
// code 2 at the CLI, solver problems to exit code 3.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ClearanceViolation : ValidationError { using ValidationError::ValidationError; };
struct InvalidSlice : ValidationError { using ValidationError::ValidationError; };
struct PointNotOnInterface : ValidationError { using ValidationError::ValidationError; };
struct DegenerateMap : ValidationError { using ValidationError::ValidationError; };
struct MeshFailure : ValidationError { using ValidationError::ValidationError; };
struct NonFiniteCoefficient : ValidationError { using ValidationError::ValidationError; };
struct InsufficientSlices : ValidationError { using ValidationError::ValidationError; };
struct GridMismatch : ValidationError { using ValidationError::ValidationError; };
struct ConfigError : ValidationError { using ValidationError::ValidationError; };

struct IncompatibleData : SolverError { using SolverError::SolverError; };
struct SolverDivergence : SolverError { using SolverError::SolverError; };

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double a) const { return {a * x, a * y}; }
  Vec2 operator-() const { return {-x, -y}; }
  Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }

  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double cross(const Vec2& o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
  double squared_norm() const { return x * x + y * y; }
  Vec2 perp() const { return {-y, x}; }  // 90 degree counterclockwise rotation
};

inline Vec2 operator*(double a, const Vec2& v) { return {a * v.x, a * v.y}; }

// Row-major 2x2 matrix; enough linear algebra for transformation fields.
struct Mat2 {
  double a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;

  static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static Mat2 rotation(double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    return {c, -s, s, c};
  }
  // d/dangle of rotation(angle)
  static Mat2 rotation_rate(double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    return {-s, -c, c, -s};
  }
  static Mat2 outer(const Vec2& u, const Vec2& v) {
    return {u.x * v.x, u.x * v.y, u.y * v.x, u.y * v.y};
  }

  Vec2 apply(const Vec2& v) const { return {a11 * v.x + a12 * v.y, a21 * v.x + a22 * v.y}; }
  Vec2 apply_transposed(const Vec2& v) const { return {a11 * v.x + a21 * v.y, a12 * v.x + a22 * v.y}; }

  Mat2 operator+(const Mat2& o) const { return {a11 + o.a11, a12 + o.a12, a21 + o.a21, a22 + o.a22}; }
  Mat2 operator-(const Mat2& o) const { return {a11 - o.a11, a12 - o.a12, a21 - o.a21, a22 - o.a22}; }
  Mat2 operator*(double t) const { return {t * a11, t * a12, t * a21, t * a22}; }
  Mat2 operator*(const Mat2& o) const {
    return {a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22,
            a21 * o.a11 + a22 * o.a21, a21 * o.a12 + a22 * o.a22};
  }

  double det() const { return a11 * a22 - a12 * a21; }
  Mat2 adjugate() const { return {a22, -a12, -a21, a11}; }
  Mat2 inverse() const {
    const double d = det();
    return {a22 / d, -a12 / d, -a21 / d, a11 / d};
  }
  Mat2 transposed() const { return {a11, a21, a12, a22}; }
  double max_abs() const {
    return std::max({std::abs(a11), std::abs(a12), std::abs(a21), std::abs(a22)});
  }
};

constexpr double kPi = 3.14159265358979323846;

}  // namespace pulshom
