#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

// The integer rescaling that Boost.Geometry applies by default before
// overlay operations costs about 1e-8 in area; exact double arithmetic plus
// the vertex snap below is sufficient for the smooth inputs used here.
#ifndef BOOST_GEOMETRY_NO_ROBUSTNESS
#define BOOST_GEOMETRY_NO_ROBUSTNESS
#endif
#include <boost/geometry.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>
#include <boost/geometry/geometries/multi_polygon.hpp>
#include <json.hpp>

#include "lenslab/errors.hpp"
#include "lenslab/numerics.hpp"

namespace lenslab {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point a, Point b) = default;
};

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline double distance(Point a, Point b) { return norm(a - b); }

/// Ordered sequence of points. Closed polylines are validated as simple.
class Polyline {
 public:
  Polyline() = default;
  Polyline(std::vector<Point> points, bool closed = false);

  const std::vector<Point>& points() const noexcept { return points_; }
  bool closed() const noexcept { return closed_; }
  std::size_t size() const noexcept { return points_.size(); }
  Point front() const { return points_.front(); }
  Point back() const { return points_.back(); }

 private:
  std::vector<Point> points_;
  bool closed_ = false;
};

/// Simple polygon stored as an open ring in counterclockwise order.
class Polygon {
 public:
  enum class Check { full, orientation_only };

  Polygon() = default;
  /// Clockwise input is reversed. With Check::full the ring is validated as
  /// simple with positive area.
  explicit Polygon(std::vector<Point> vertices, Check check = Check::full);

  const std::vector<Point>& vertices() const noexcept { return vertices_; }
  std::size_t size() const noexcept { return vertices_.size(); }
  Polyline boundary() const { return Polyline(vertices_, true); }

 private:
  std::vector<Point> vertices_;
};

/// Analytic standard lens of area m: two circular arcs of radius r meeting
/// the horizontal axis at p1 = (-sqrt(3)/2 r, 0) and p2 = (sqrt(3)/2 r, 0).
struct LensSpec {
  double mass = 0.0;
  double radius = 0.0;
  double halfWidth = 0.0;
  Point p1;
  Point p2;

  static LensSpec from_mass(double m);
  static LensSpec from_radius(double r);
};

/// Area of the lens with unit radius, 2pi/3 - sqrt(3)/2.
inline constexpr double unit_lens_area = 2.0 * constants::pi / 3.0 - constants::ell;

inline double lens_radius(double m) {
  if (!(m > 0.0) || !std::isfinite(m)) throw DomainError("lens mass must be positive");
  return std::sqrt(m) / std::sqrt(unit_lens_area);
}

inline LensSpec LensSpec::from_mass(double m) {
  LensSpec s;
  s.mass = m;
  s.radius = lens_radius(m);
  s.halfWidth = constants::ell * s.radius;
  s.p1 = {-s.halfWidth, 0.0};
  s.p2 = {s.halfWidth, 0.0};
  return s;
}

inline LensSpec LensSpec::from_radius(double r) {
  if (!(r > 0.0)) throw DomainError("lens radius must be positive");
  return from_mass(unit_lens_area * r * r);
}

/// Upper lens profile u1(x) = sqrt(r^2 - x^2) - r/2 on |x| <= sqrt(3)/2 r.
inline double lens_upper_height(double radius, double x) {
  return std::sqrt(std::max(0.0, radius * radius - x * x)) - 0.5 * radius;
}

// ---------------------------------------------------------------------------
// Boost.Geometry adaptors

namespace detail {
namespace bg = boost::geometry;
using BgPoint = bg::model::d2::point_xy<double>;
using BgPolygon = bg::model::polygon<BgPoint, false, false>;
using BgMulti = bg::model::multi_polygon<BgPolygon>;

inline BgPolygon to_bg(std::span<const Point> pts) {
  BgPolygon poly;
  auto& ring = poly.outer();
  ring.reserve(pts.size());
  for (const Point& p : pts) ring.emplace_back(p.x, p.y);
  return poly;
}

inline double signed_area(std::span<const Point> pts) {
  NeumaierSum s;
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = pts[i];
    const Point b = pts[(i + 1) % n];
    s += a.x * b.y - b.x * a.y;
  }
  return 0.5 * s.value();
}

inline double coordinate_scale(std::span<const Point> pts) {
  double s = 1.0;
  for (const Point& p : pts) s = std::max({s, std::abs(p.x), std::abs(p.y)});
  return s;
}

inline void require_finite_distinct(std::span<const Point> pts, bool closed) {
  for (const Point& p : pts) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw ValidationError("non-finite coordinate");
  }
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (pts[i] == pts[i + 1]) throw ValidationError("consecutive points coincide at index " + std::to_string(i));
  }
  if (closed && pts.size() > 2 && pts.front() == pts.back()) {
    throw ValidationError("closed polyline repeats its first point");
  }
}

inline void require_simple_ring(std::span<const Point> ccw) {
  BgPolygon poly = to_bg(ccw);
  std::string reason;
  if (!bg::is_valid(poly, reason)) throw ValidationError("polygon is not simple: " + reason);
}
}  // namespace detail

inline Polyline::Polyline(std::vector<Point> points, bool closed)
    : points_(std::move(points)), closed_(closed) {
  if (points_.size() < 2) throw ValidationError("polyline needs at least two points");
  detail::require_finite_distinct(points_, closed_);
  if (closed_) {
    if (points_.size() < 3) throw ValidationError("closed polyline needs at least three points");
    std::vector<Point> ring = points_;
    if (detail::signed_area(ring) < 0.0) std::reverse(ring.begin(), ring.end());
    detail::require_simple_ring(ring);
  }
}

inline Polygon::Polygon(std::vector<Point> vertices, Check check) : vertices_(std::move(vertices)) {
  if (vertices_.size() < 3) throw ValidationError("polygon needs at least three vertices");
  if (vertices_.front() == vertices_.back()) vertices_.pop_back();
  const double area = detail::signed_area(vertices_);
  if (area < 0.0) std::reverse(vertices_.begin(), vertices_.end());
  if (check == Check::full) {
    detail::require_finite_distinct(vertices_, true);
    if (!(std::abs(area) > 0.0)) throw ValidationError("polygon has zero area");
    detail::require_simple_ring(vertices_);
  }
}

// ---------------------------------------------------------------------------
// Measurements

inline double polyline_length(const Polyline& c) {
  NeumaierSum s;
  const auto& p = c.points();
  for (std::size_t i = 0; i + 1 < p.size(); ++i) s += distance(p[i], p[i + 1]);
  if (c.closed()) s += distance(p.back(), p.front());
  return s.value();
}

inline double polygon_perimeter(const Polygon& p) { return polyline_length(p.boundary()); }

inline double polygon_area(const Polygon& p) { return std::abs(detail::signed_area(p.vertices())); }

/// Point-in-polygon by winding; points on the boundary (within `tol`) count
/// as inside when `inclusive` is set.
inline bool contains(const Polygon& poly, Point q, bool inclusive = true, double tol = 1e-12) {
  const auto& v = poly.vertices();
  const std::size_t n = v.size();
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point a = v[j];
    const Point b = v[i];
    const Point ab = b - a;
    const double len = norm(ab);
    const double t = std::clamp(dot(q - a, ab) / (len * len), 0.0, 1.0);
    if (distance(q, a + t * ab) <= tol) return inclusive;
    if ((a.y > q.y) != (b.y > q.y)) {
      const double xc = a.x + (q.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (q.x < xc) inside = !inside;
    }
  }
  return inside;
}

namespace detail {
/// Replaces vertices of `b` lying within `eps` of a vertex of `a` by that vertex.
inline std::vector<Point> snap_to(std::span<const Point> a, std::span<const Point> b, double eps) {
  std::vector<Point> sorted(a.begin(), a.end());
  std::sort(sorted.begin(), sorted.end(), [](Point p, Point q) { return p.x < q.x; });
  std::vector<Point> out(b.begin(), b.end());
  for (Point& q : out) {
    auto lo = std::lower_bound(sorted.begin(), sorted.end(), q.x - eps,
                               [](Point p, double x) { return p.x < x; });
    for (auto it = lo; it != sorted.end() && it->x <= q.x + eps; ++it) {
      if (std::abs(it->y - q.y) <= eps) {
        q = *it;
        break;
      }
    }
  }
  std::vector<Point> dedup;
  dedup.reserve(out.size());
  for (const Point& q : out) {
    if (dedup.empty() || !(dedup.back() == q)) dedup.push_back(q);
  }
  while (dedup.size() > 1 && dedup.front() == dedup.back()) dedup.pop_back();
  return dedup;
}

inline double intersection_area_raw(std::span<const Point> a, std::span<const Point> b) {
  const double eps = 1e-12 * std::max(coordinate_scale(a), coordinate_scale(b));
  const std::vector<Point> bs = snap_to(a, b, eps);
  if (bs.size() < 3) return 0.0;
  BgPolygon pa = to_bg(a);
  BgPolygon pb = to_bg(bs);
  BgMulti out;
  bg::intersection(pa, pb, out);
  return std::abs(bg::area(out));
}
}  // namespace detail

inline double intersection_area(const Polygon& a, const Polygon& b) {
  return detail::intersection_area_raw(a.vertices(), b.vertices());
}

/// |a \ b| + |b \ a| = |a| + |b| - 2|a n b|, clamped at zero. Coincident
/// vertices closer than 1e-12 (relative) are snapped before clipping.
inline double symmetric_difference_area(const Polygon& a, const Polygon& b) {
  const double value = polygon_area(a) + polygon_area(b) - 2.0 * intersection_area(a, b);
  return std::max(0.0, value);
}

/// Direction (radians, in (-pi, pi]) of the one-sided tangent of `arc` at
/// the endpoint `at`, pointing into the arc. Uses a quadratic fit through
/// the three nearest samples when available.
inline double meeting_angle(const Polyline& arc, Point at) {
  const auto& pts = arc.points();
  const double tol = 1e-12 * std::max(1.0, norm(at));
  std::vector<Point> near;
  if (distance(pts.front(), at) <= tol) {
    for (std::size_t i = 0; i < std::min<std::size_t>(3, pts.size()); ++i) near.push_back(pts[i]);
  } else if (distance(pts.back(), at) <= tol) {
    for (std::size_t i = 0; i < std::min<std::size_t>(3, pts.size()); ++i) near.push_back(pts[pts.size() - 1 - i]);
  } else {
    throw DomainError("meeting_angle: point is not an endpoint of the arc");
  }
  Point d = near[1] - near[0];
  if (near.size() == 3) {
    const double s1 = distance(near[0], near[1]);
    const double s2 = s1 + distance(near[1], near[2]);
    const Point a = (s2 / (s1 * (s2 - s1))) * (near[1] - near[0]);
    const Point b = (s1 / (s2 * (s2 - s1))) * (near[2] - near[0]);
    d = a - b;
  }
  return std::atan2(d.y, d.x);
}

// ---------------------------------------------------------------------------
// Lens construction

/// Upper and lower arcs of the lens, both ordered from p1 to p2, sampled
/// with n segments uniform in arc length. Endpoints are exactly p1 and p2.
inline std::pair<Polyline, Polyline> lens_boundary(const LensSpec& spec, std::size_t n) {
  if (n < 8) throw DomainError("lens_boundary needs at least 8 samples");
  const double r = spec.radius;
  std::vector<Point> upper(n + 1), lower(n + 1);
  const double span = 2.0 * constants::pi / 3.0;
  for (std::size_t k = 0; k <= n; ++k) {
    const double f = static_cast<double>(k) / static_cast<double>(n);
    const double tu = 5.0 * constants::pi / 6.0 - f * span;
    const double tl = 7.0 * constants::pi / 6.0 + f * span;
    upper[k] = {r * std::cos(tu), -0.5 * r + r * std::sin(tu)};
    lower[k] = {r * std::cos(tl), 0.5 * r + r * std::sin(tl)};
  }
  upper.front() = lower.front() = spec.p1;
  upper.back() = lower.back() = spec.p2;
  upper[n / 2].x = n % 2 == 0 ? 0.0 : upper[n / 2].x;
  lower[n / 2].x = n % 2 == 0 ? 0.0 : lower[n / 2].x;
  return {Polyline(std::move(upper)), Polyline(std::move(lower))};
}

/// Closed lens polygon (lower arc p1 -> p2, then upper arc back to p1).
inline Polygon lens_polygon(const LensSpec& spec, std::size_t n) {
  auto [upper, lower] = lens_boundary(spec, n);
  std::vector<Point> v = lower.points();
  const auto& u = upper.points();
  for (std::size_t k = u.size() - 2; k >= 1; --k) v.push_back(u[k]);
  return Polygon(std::move(v), Polygon::Check::orientation_only);
}

/// Rigid motion x -> R(theta) * F(x) + (dx, dy), where F optionally mirrors
/// x -> -x.
struct Isometry {
  double dx = 0.0;
  double dy = 0.0;
  double theta = 0.0;
  bool reflectX = false;

  Point apply(Point p) const {
    if (reflectX) p.x = -p.x;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return {c * p.x - s * p.y + dx, s * p.x + c * p.y + dy};
  }
};

inline std::vector<Point> transform(std::span<const Point> pts, const Isometry& t) {
  std::vector<Point> out;
  out.reserve(pts.size());
  for (const Point& p : pts) out.push_back(t.apply(p));
  return out;
}

inline Polygon scaled(const Polygon& p, double factor) {
  std::vector<Point> v;
  v.reserve(p.size());
  for (const Point& q : p.vertices()) v.push_back(factor * q);
  return Polygon(std::move(v), Polygon::Check::orientation_only);
}

inline Polygon translated(const Polygon& p, Point by) {
  std::vector<Point> v;
  v.reserve(p.size());
  for (const Point& q : p.vertices()) v.push_back(q + by);
  return Polygon(std::move(v), Polygon::Check::orientation_only);
}

// ---------------------------------------------------------------------------
// JSON ("geom/1")

inline constexpr const char* kGeomSchema = "geom/1";

inline nlohmann::json points_to_json(std::span<const Point> pts) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Point& p : pts) arr.push_back({p.x, p.y});
  return arr;
}

inline std::vector<Point> points_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ValidationError("geom/1: points must be an array");
  std::vector<Point> pts;
  pts.reserve(j.size());
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2) throw ValidationError("geom/1: each point must be an [x, y] pair");
    pts.push_back({e[0].get<double>(), e[1].get<double>()});
  }
  return pts;
}

inline nlohmann::json to_json(const Polyline& c) {
  return {{"schema", kGeomSchema}, {"type", "polyline"}, {"closed", c.closed()}, {"points", points_to_json(c.points())}};
}

inline nlohmann::json to_json(const Polygon& p) {
  return {{"schema", kGeomSchema}, {"type", "polygon"}, {"closed", true}, {"points", points_to_json(p.vertices())}};
}

namespace detail {
inline void require_geom_schema(const nlohmann::json& j, const char* type) {
  if (j.value("schema", std::string{}) != kGeomSchema) throw ValidationError("expected schema geom/1");
  if (j.value("type", std::string{}) != type) throw ValidationError(std::string("expected geometry type ") + type);
}
}  // namespace detail

inline Polyline polyline_from_json(const nlohmann::json& j) {
  detail::require_geom_schema(j, "polyline");
  return Polyline(points_from_json(j.at("points")), j.value("closed", false));
}

inline Polygon polygon_from_json(const nlohmann::json& j) {
  detail::require_geom_schema(j, "polygon");
  return Polygon(points_from_json(j.at("points")));
}

}  // namespace lenslab
