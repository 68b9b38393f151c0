#include "isotropy/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace isotropy {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_dim(std::size_t n, std::size_t got, const char* what) {
  if (n != got) {
    std::ostringstream msg;
    msg << what << ": dimension mismatch (body n=" << n << ", vector n=" << got << ")";
    throw GeometryError(msg.str());
  }
}

// Gauss-Jordan inverse with partial pivoting; throws on singular input.
std::vector<Vector> invert(std::vector<Vector> a) {
  const std::size_t n = a.size();
  std::vector<Vector> inv(n, Vector(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
  double scale = 0.0;
  for (const auto& row : a)
    for (double v : row) scale = std::max(scale, std::abs(v));
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    if (std::abs(a[pivot][col]) <= 1e-13 * scale) throw GeometryError("simplex vertices are affinely dependent");
    std::swap(a[col], a[pivot]);
    std::swap(inv[col], inv[pivot]);
    const double p = a[col][col];
    for (std::size_t j = 0; j < n; ++j) {
      a[col][j] /= p;
      inv[col][j] /= p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r][col];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        a[r][j] -= f * a[col][j];
        inv[r][j] -= f * inv[col][j];
      }
    }
  }
  return inv;
}

bool halfspaces_contain(const std::vector<Vector>& normals, const Vector& offsets,
                        std::span<const double> x) {
  const double xnorm = norm(x);
  for (std::size_t j = 0; j < normals.size(); ++j) {
    const double slack = kBoundarySlack * (std::abs(offsets[j]) + norm(normals[j]) * xnorm);
    if (dot(normals[j], x) - offsets[j] > slack) return false;
  }
  return true;
}

Chord halfspace_chord(const std::vector<Vector>& normals, const Vector& offsets,
                      std::span<const double> x, std::span<const double> d) {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < normals.size(); ++j) {
    const double rate = dot(normals[j], d);
    if (rate == 0.0) continue;
    const double room = std::max(0.0, offsets[j] - dot(normals[j], x));
    const double t = room / rate;
    if (rate > 0.0) {
      hi = std::min(hi, t);
    } else {
      lo = std::max(lo, t);
    }
  }
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw GeometryError("chord: body is unbounded along direction");
  return {lo, hi};
}

Chord ball_chord(double radius, std::span<const double> x, std::span<const double> d) {
  const double b = dot(x, d);
  const double c = dot(x, x) - radius * radius;
  const double disc = std::max(0.0, b * b - c);
  const double root = std::sqrt(disc);
  // Stable pair: the product of the roots is c.
  double lo, hi;
  if (b >= 0.0) {
    lo = -b - root;
    hi = lo != 0.0 ? c / lo : 0.0;
  } else {
    hi = -b + root;
    lo = hi != 0.0 ? c / hi : 0.0;
  }
  return {std::min(lo, 0.0), std::max(hi, 0.0)};
}

Chord intersect(Chord a, Chord b) { return {std::max(a.t_lo, b.t_lo), std::min(a.t_hi, b.t_hi)}; }

std::string fmt_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

std::string to_string(BodyKind kind) {
  switch (kind) {
    case BodyKind::Cube: return "cube";
    case BodyKind::Ball: return "ball";
    case BodyKind::Simplex: return "simplex";
    case BodyKind::Ellipsoid: return "ellipsoid";
    case BodyKind::HPolytope: return "hpolytope";
    case BodyKind::Truncated: return "truncated";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Factories

Body Body::cube(std::size_t n, double halfwidth) {
  if (n == 0) throw GeometryError("cube: dimension must be positive");
  if (!(halfwidth > 0.0) || !std::isfinite(halfwidth)) throw GeometryError("cube: halfwidth must be positive");
  return Body(n, Cube{halfwidth});
}

Body Body::ball(std::size_t n, double radius) {
  if (n == 0) throw GeometryError("ball: dimension must be positive");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw GeometryError("ball: radius must be positive");
  return Body(n, Ball{radius});
}

Body Body::simplex(std::vector<Vector> vertices) {
  if (vertices.size() < 2) throw GeometryError("simplex: need n+1 >= 2 vertices");
  const std::size_t n = vertices.size() - 1;
  for (const auto& v : vertices) {
    require_dim(n, v.size(), "simplex");
    if (!all_finite(v)) throw GeometryError("simplex: non-finite vertex");
  }
  // Columns (v_i; 1); lambda = inverse * (x; 1).
  std::vector<Vector> system(n + 1, Vector(n + 1, 1.0));
  for (std::size_t i = 0; i <= n; ++i)
    for (std::size_t r = 0; r < n; ++r) system[r][i] = vertices[i][r];
  const auto inv = invert(std::move(system));

  Simplex s;
  s.vertices = std::move(vertices);
  for (std::size_t i = 0; i <= n; ++i) {
    Vector normal(n);
    for (std::size_t r = 0; r < n; ++r) normal[r] = -inv[i][r];
    const double at_origin = inv[i][n];
    if (!(at_origin > 1e-12)) throw GeometryError("simplex: origin is not an interior point");
    s.normals.push_back(std::move(normal));
    s.offsets.push_back(at_origin);
  }
  return Body(n, std::move(s));
}

Body Body::ellipsoid(SymMatrix shape) {
  const std::size_t n = shape.n();
  if (n == 0) throw GeometryError("ellipsoid: dimension must be positive");
  if (!shape.all_finite()) throw GeometryError("ellipsoid: non-finite shape");
  const auto ed = eigen(shape);
  if (!(ed.eigenvalues.back() > 1e-12 * std::abs(ed.eigenvalues.front())))
    throw GeometryError("ellipsoid: shape matrix is not positive definite");
  SymMatrix inverse(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k)
        s += ed.eigenvectors(i, k) * ed.eigenvectors(j, k) / ed.eigenvalues[k];
      inverse.set(i, j, s);
    }
  return Body(n, Ellipsoid{std::move(shape), std::move(inverse)});
}

Body Body::hpolytope(std::vector<Vector> normals, Vector offsets) {
  if (normals.empty()) throw GeometryError("hpolytope: need at least one halfspace");
  if (normals.size() != offsets.size()) throw GeometryError("hpolytope: normals/offsets count mismatch");
  const std::size_t n = normals.front().size();
  if (n == 0) throw GeometryError("hpolytope: dimension must be positive");
  for (std::size_t j = 0; j < normals.size(); ++j) {
    require_dim(n, normals[j].size(), "hpolytope");
    if (!all_finite(normals[j]) || !std::isfinite(offsets[j])) throw GeometryError("hpolytope: non-finite data");
    if (norm(normals[j]) == 0.0) throw GeometryError("hpolytope: zero normal");
  }
  return Body(n, HPolytope{std::move(normals), std::move(offsets)});
}

Body Body::truncated(Body base, double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw GeometryError("truncated: radius must be positive");
  const std::size_t n = base.dim();
  return Body(n, Truncated{std::make_shared<const Body>(std::move(base)), radius});
}

std::string Body::describe() const {
  return std::visit(
      Overloaded{
          [&](const Cube& c) { return "cube(a=" + fmt_double(c.halfwidth) + ",n=" + std::to_string(n_) + ")"; },
          [&](const Ball& b) { return "ball(r=" + fmt_double(b.radius) + ",n=" + std::to_string(n_) + ")"; },
          [&](const Simplex&) { return "simplex(n=" + std::to_string(n_) + ")"; },
          [&](const Ellipsoid&) { return "ellipsoid(n=" + std::to_string(n_) + ")"; },
          [&](const HPolytope& p) {
            return "hpolytope(n=" + std::to_string(n_) + ",m=" + std::to_string(p.normals.size()) + ")";
          },
          [&](const Truncated& t) { return "truncated(" + t.base->describe() + ",rho=" + fmt_double(t.radius) + ")"; },
      },
      shape_);
}

// ---------------------------------------------------------------------------
// Oracles

bool membership(const Body& body, std::span<const double> x) {
  require_dim(body.dim(), x.size(), "membership");
  return std::visit(
      Overloaded{
          [&](const Cube& c) {
            const double limit = c.halfwidth * (1.0 + kBoundarySlack);
            return std::all_of(x.begin(), x.end(), [&](double v) { return std::abs(v) <= limit; });
          },
          [&](const Ball& b) { return norm(x) <= b.radius * (1.0 + kBoundarySlack); },
          [&](const Simplex& s) { return halfspaces_contain(s.normals, s.offsets, x); },
          [&](const Ellipsoid& e) { return norm(e.inverse.apply(x)) <= 1.0 + kBoundarySlack; },
          [&](const HPolytope& p) { return halfspaces_contain(p.normals, p.offsets, x); },
          [&](const Truncated& t) {
            return norm(x) <= t.radius * (1.0 + kBoundarySlack) && membership(*t.base, x);
          },
      },
      body.shape());
}

Chord chord(const Body& body, std::span<const double> x, std::span<const double> d) {
  require_dim(body.dim(), x.size(), "chord");
  require_dim(body.dim(), d.size(), "chord");
  if (std::abs(norm(d) - 1.0) > 1e-10) throw GeometryError("chord: direction is not a unit vector");
  if (!membership(body, x)) throw GeometryError("chord: base point lies outside the body");
  return std::visit(
      Overloaded{
          [&](const Cube& c) {
            double lo = -std::numeric_limits<double>::infinity();
            double hi = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < x.size(); ++i) {
              if (d[i] == 0.0) continue;
              const double up = std::max(0.0, c.halfwidth - x[i]) / d[i];
              const double down = -std::max(0.0, c.halfwidth + x[i]) / d[i];
              lo = std::max(lo, std::min(up, down));
              hi = std::min(hi, std::max(up, down));
            }
            return Chord{lo, hi};
          },
          [&](const Ball& b) { return ball_chord(b.radius, x, d); },
          [&](const Simplex& s) { return halfspace_chord(s.normals, s.offsets, x, d); },
          [&](const Ellipsoid& e) {
            const Vector p = e.inverse.apply(x);
            const Vector q = e.inverse.apply(d);
            const double qq = dot(q, q);
            const double pq = dot(p, q);
            const double disc = pq * pq - qq * (dot(p, p) - 1.0);
            if (disc <= 0.0) return Chord{0.0, 0.0};
            const double root = std::sqrt(disc);
            return Chord{std::min(0.0, (-pq - root) / qq), std::max(0.0, (-pq + root) / qq)};
          },
          [&](const HPolytope& p) { return halfspace_chord(p.normals, p.offsets, x, d); },
          [&](const Truncated& t) { return intersect(chord(*t.base, x, d), ball_chord(t.radius, x, d)); },
      },
      body.shape());
}

// ---------------------------------------------------------------------------
// Isotropic normalization

BodyFamily parse_body_family(const std::string& name) {
  if (name == "cube") return BodyFamily::Cube;
  if (name == "ball") return BodyFamily::Ball;
  if (name == "simplex") return BodyFamily::Simplex;
  throw GeometryError("unsupported body family '" + name + "' (expected cube, ball or simplex)");
}

std::string to_string(BodyFamily family) {
  switch (family) {
    case BodyFamily::Cube: return "cube";
    case BodyFamily::Ball: return "ball";
    case BodyFamily::Simplex: return "simplex";
  }
  return "unknown";
}

double isotropic_scale(BodyFamily family, std::size_t n) {
  if (n == 0) throw GeometryError("isotropic_scale: dimension must be positive");
  const double dn = static_cast<double>(n);
  switch (family) {
    case BodyFamily::Cube: return std::sqrt(3.0);
    case BodyFamily::Ball: return std::sqrt(dn + 2.0);
    // Uniform on a simplex with unit vertices v_i (sum v_i = 0) has second
    // moment sum_i v_i v_i^T / ((n+1)(n+2)) = id / (n(n+2)).
    case BodyFamily::Simplex: return std::sqrt(dn * (dn + 2.0));
  }
  throw GeometryError("isotropic_scale: unsupported family");
}

std::vector<Vector> regular_simplex_vertices(std::size_t n) {
  if (n == 0) throw GeometryError("regular_simplex_vertices: dimension must be positive");
  // Coordinates of the centered basis vectors e_i of R^{n+1} in the
  // orthonormal Helmert basis of the hyperplane sum x = 0.
  std::vector<Vector> vertices(n + 1, Vector(n, 0.0));
  const double unit = std::sqrt(static_cast<double>(n + 1) / static_cast<double>(n));
  for (std::size_t k = 1; k <= n; ++k) {
    const double dk = static_cast<double>(k);
    const double h = 1.0 / std::sqrt(dk * (dk + 1.0));
    for (std::size_t i = 0; i < k; ++i) vertices[i][k - 1] = h * unit;
    vertices[k][k - 1] = -dk * h * unit;
  }
  return vertices;
}

Body isotropic_normalization(BodyFamily family, std::size_t n) {
  const double s = isotropic_scale(family, n);
  switch (family) {
    case BodyFamily::Cube: return Body::cube(n, s);
    case BodyFamily::Ball: return Body::ball(n, s);
    case BodyFamily::Simplex: {
      auto vertices = regular_simplex_vertices(n);
      for (auto& v : vertices)
        for (double& c : v) c *= s;
      return Body::simplex(std::move(vertices));
    }
  }
  throw GeometryError("isotropic_normalization: unsupported family");
}

// ---------------------------------------------------------------------------
// John decompositions

JohnDecomposition::Residuals JohnDecomposition::residuals(std::span<const Vector> points,
                                                          std::span<const double> weights) {
  const std::size_t n = points.empty() ? 0 : points.front().size();
  Residuals r{0.0, 0.0, 0.0, 0.0};
  RankOneAccumulator acc(n);
  Vector centroid(n, 0.0);
  double weight_sum = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    r.max_unit_error = std::max(r.max_unit_error, std::abs(norm(points[i]) - 1.0));
    acc.add(points[i], weights[i]);
    for (std::size_t k = 0; k < n; ++k) centroid[k] += weights[i] * points[i][k];
    weight_sum += weights[i];
  }
  SymMatrix diff = acc.sum();
  diff.shift_diagonal(-1.0);
  r.identity_error = operator_norm(diff);
  r.centroid_error = norm(centroid);
  r.weight_sum_error = std::abs(weight_sum - static_cast<double>(n));
  return r;
}

JohnDecomposition JohnDecomposition::create(std::vector<Vector> points, Vector weights) {
  if (points.empty()) throw GeometryError("john decomposition: no points");
  if (points.size() != weights.size()) throw GeometryError("john decomposition: points/weights count mismatch");
  const std::size_t n = points.front().size();
  if (n == 0) throw GeometryError("john decomposition: dimension must be positive");
  for (std::size_t i = 0; i < points.size(); ++i) {
    require_dim(n, points[i].size(), "john decomposition");
    if (!all_finite(points[i])) throw GeometryError("john decomposition: non-finite point");
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i])) throw GeometryError("john decomposition: weights must be positive");
  }
  const Residuals r = residuals(points, weights);
  std::ostringstream bad;
  if (r.max_unit_error > kJohnTolerance) bad << " point norms off by " << r.max_unit_error << ";";
  if (r.identity_error > kJohnTolerance) bad << " |sum c z(x)z - id| = " << r.identity_error << ";";
  if (r.centroid_error > kJohnTolerance) bad << " |sum c z| = " << r.centroid_error << ";";
  if (r.weight_sum_error > kJohnTolerance) bad << " |sum c - n| = " << r.weight_sum_error << ";";
  if (!bad.str().empty()) throw GeometryError("john decomposition invalid:" + bad.str());
  return JohnDecomposition(n, std::move(points), std::move(weights));
}

JohnFixture parse_john_fixture(const std::string& name) {
  if (name == "crosspolytope" || name == "cross-polytope") return JohnFixture::CrossPolytope;
  if (name == "cubevertices" || name == "cube-vertices") return JohnFixture::CubeVertices;
  if (name == "simplex") return JohnFixture::Simplex;
  throw GeometryError("unknown John fixture '" + name + "' (expected crosspolytope, cubevertices or simplex)");
}

std::string to_string(JohnFixture fixture) {
  switch (fixture) {
    case JohnFixture::CrossPolytope: return "crosspolytope";
    case JohnFixture::CubeVertices: return "cubevertices";
    case JohnFixture::Simplex: return "simplex";
  }
  return "unknown";
}

JohnDecomposition canonical_john(JohnFixture fixture, std::size_t n) {
  if (n == 0) throw GeometryError("canonical_john: dimension must be positive");
  const double dn = static_cast<double>(n);
  std::vector<Vector> points;
  Vector weights;
  switch (fixture) {
    case JohnFixture::CrossPolytope:
      for (std::size_t i = 0; i < n; ++i) {
        for (double s : {1.0, -1.0}) {
          Vector z(n, 0.0);
          z[i] = s;
          points.push_back(std::move(z));
          weights.push_back(0.5);
        }
      }
      break;
    case JohnFixture::CubeVertices: {
      if (n > kMaxCubeVerticesDim)
        throw GeometryError("canonical_john: cube vertices limited to n <= 20 (2^n points)");
      const std::size_t count = std::size_t{1} << n;
      const double coord = 1.0 / std::sqrt(dn);
      const double w = dn / static_cast<double>(count);
      points.reserve(count);
      for (std::size_t mask = 0; mask < count; ++mask) {
        Vector z(n);
        for (std::size_t k = 0; k < n; ++k) z[k] = (mask >> k) & 1u ? -coord : coord;
        points.push_back(std::move(z));
        weights.push_back(w);
      }
      break;
    }
    case JohnFixture::Simplex:
      points = regular_simplex_vertices(n);
      weights.assign(n + 1, dn / (dn + 1.0));
      break;
  }
  return JohnDecomposition::create(std::move(points), std::move(weights));
}

// ---------------------------------------------------------------------------
// HPolytope text format

Body load_hpolytope(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> std::istringstream {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") != std::string::npos) return std::istringstream(line);
    }
    throw GeometryError("hpolytope: unexpected end of input after line " + std::to_string(line_no));
  };
  auto fail = [&](const std::string& what) {
    throw GeometryError("hpolytope: line " + std::to_string(line_no) + ": " + what);
  };

  std::size_t n = 0, m = 0;
  {
    auto header = next_line();
    if (!(header >> n >> m) || n == 0 || m == 0) fail("expected header 'n m' with positive integers");
    std::string extra;
    if (header >> extra) fail("trailing data in header");
  }
  std::vector<Vector> normals;
  Vector offsets;
  for (std::size_t j = 0; j < m; ++j) {
    auto row = next_line();
    Vector a(n);
    double b = 0.0;
    for (double& v : a)
      if (!(row >> v)) fail("expected " + std::to_string(n + 1) + " numbers");
    if (!(row >> b)) fail("expected " + std::to_string(n + 1) + " numbers");
    std::string extra;
    if (row >> extra) fail("trailing data");
    normals.push_back(std::move(a));
    offsets.push_back(b);
  }
  return Body::hpolytope(std::move(normals), std::move(offsets));
}

Body load_hpolytope_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw GeometryError("hpolytope: cannot open '" + path + "'");
  return load_hpolytope(in);
}

void write_hpolytope(std::ostream& out, const HPolytope& poly) {
  const std::size_t n = poly.normals.empty() ? 0 : poly.normals.front().size();
  out << n << ' ' << poly.normals.size() << '\n';
  out << std::setprecision(17);
  for (std::size_t j = 0; j < poly.normals.size(); ++j) {
    for (double v : poly.normals[j]) out << v << ' ';
    out << poly.offsets[j] << '\n';
  }
}

}  // namespace isotropy
