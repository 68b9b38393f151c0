#pragma once

// Convex bodies with membership and chord oracles, isotropic
// normalizations of the standard families, and closed-form John
// decompositions used as fixtures.

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "isotropy/symlin.hpp"

namespace isotropy {

class GeometryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class Body;

struct Cube {
  double halfwidth;
};

struct Ball {
  double radius;
};

/// Simplex from n+1 affinely independent vertices. Membership is tested
/// through barycentric coordinates, stored as halfspaces -lambda_i(x) <= 0.
struct Simplex {
  std::vector<Vector> vertices;
  std::vector<Vector> normals;
  Vector offsets;
};

/// {shape * u : |u| <= 1} for SPD `shape`.
struct Ellipsoid {
  SymMatrix shape;
  SymMatrix inverse;
};

/// {x : normals[j] . x <= offsets[j] for all j}. Unlike the other
/// variants the origin is not required to be interior.
struct HPolytope {
  std::vector<Vector> normals;
  Vector offsets;
};

/// base intersected with the centered ball of the given radius.
struct Truncated {
  std::shared_ptr<const Body> base;
  double radius;
};

enum class BodyKind { Cube, Ball, Simplex, Ellipsoid, HPolytope, Truncated };

std::string to_string(BodyKind kind);

/// Immutable convex body in R^n. Factories validate their inputs and,
/// except for HPolytope, that the origin is an interior point.
class Body {
 public:
  using Shape = std::variant<Cube, Ball, Simplex, Ellipsoid, HPolytope, Truncated>;

  static Body cube(std::size_t n, double halfwidth);
  static Body ball(std::size_t n, double radius);
  static Body simplex(std::vector<Vector> vertices);
  static Body ellipsoid(SymMatrix shape);
  static Body hpolytope(std::vector<Vector> normals, Vector offsets);
  static Body truncated(Body base, double radius);

  std::size_t dim() const noexcept { return n_; }
  BodyKind kind() const noexcept { return static_cast<BodyKind>(shape_.index()); }
  const Shape& shape() const noexcept { return shape_; }

  template <class T>
  const T& as() const {
    return std::get<T>(shape_);
  }

  /// Short human-readable tag, e.g. "cube(a=1.7320508075688772,n=4)".
  std::string describe() const;

 private:
  Body(std::size_t n, Shape shape) : n_(n), shape_(std::move(shape)) {}

  std::size_t n_;
  Shape shape_;
};

/// Relative slack for boundary points (closed bodies).
inline constexpr double kBoundarySlack = 1e-10;

bool membership(const Body& body, std::span<const double> x);

struct Chord {
  double t_lo;
  double t_hi;
};

/// Maximal [t_lo, t_hi] with x + t d inside the body. Requires x inside
/// and |d| = 1; throws GeometryError otherwise or when the body is
/// unbounded along d.
Chord chord(const Body& body, std::span<const double> x, std::span<const double> d);

enum class BodyFamily { Cube, Ball, Simplex };

BodyFamily parse_body_family(const std::string& name);
std::string to_string(BodyFamily family);

/// Scale factor putting the family in isotropic position:
/// cube halfwidth sqrt(3), ball radius sqrt(n+2), and circumradius
/// sqrt(n(n+2)) for the regular simplex.
double isotropic_scale(BodyFamily family, std::size_t n);

Body isotropic_normalization(BodyFamily family, std::size_t n);

/// n+1 unit vectors forming a regular simplex centered at the origin.
std::vector<Vector> regular_simplex_vertices(std::size_t n);

/// Unit contact points z_i with positive weights c_i such that
/// sum c_i z_i (x) z_i = id and sum c_i z_i = 0.
class JohnDecomposition {
 public:
  /// Validates every invariant at kJohnTolerance.
  static JohnDecomposition create(std::vector<Vector> points, Vector weights);

  std::size_t dim() const noexcept { return n_; }
  std::size_t size() const noexcept { return points_.size(); }
  const std::vector<Vector>& points() const noexcept { return points_; }
  const Vector& weights() const noexcept { return weights_; }

  struct Residuals {
    double max_unit_error;  // max_i | |z_i| - 1 |
    double identity_error;  // | sum c z (x) z - id |
    double centroid_error;  // | sum c z |
    double weight_sum_error;  // | sum c - n |
  };
  static Residuals residuals(std::span<const Vector> points, std::span<const double> weights);

 private:
  JohnDecomposition(std::size_t n, std::vector<Vector> points, Vector weights)
      : n_(n), points_(std::move(points)), weights_(std::move(weights)) {}

  std::size_t n_;
  std::vector<Vector> points_;
  Vector weights_;
};

inline constexpr double kJohnTolerance = 1e-10;

enum class JohnFixture { CrossPolytope, CubeVertices, Simplex };

JohnFixture parse_john_fixture(const std::string& name);
std::string to_string(JohnFixture fixture);

inline constexpr std::size_t kMaxCubeVerticesDim = 20;

/// Cross-polytope: +-e_i with weight 1/2. Cube vertices: 2^n points with
/// coordinates +-1/sqrt(n), weight n/2^n (n <= 20). Simplex: n+1 regular
/// simplex vertices, weight n/(n+1).
JohnDecomposition canonical_john(JohnFixture fixture, std::size_t n);

/// Text format: "n m" then m lines of n coefficients followed by the offset.
Body load_hpolytope(std::istream& in);
Body load_hpolytope_file(const std::string& path);
void write_hpolytope(std::ostream& out, const HPolytope& poly);

}  // namespace isotropy
