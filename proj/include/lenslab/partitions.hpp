#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "lenslab/errors.hpp"
#include "lenslab/geometry.hpp"
#include "lenslab/graphs.hpp"
#include "lenslab/numerics.hpp"

namespace lenslab {

/// Lens-type 3-partition of the square window [-R, R]^2.
///
/// Chamber 1 is the bounded region between lowerArc and upperArc. Chamber 2
/// lies above interfaceLeft + upperArc + interfaceRight, chamber 3 below
/// interfaceLeft + lowerArc + interfaceRight. The interfaces run from the
/// left window side to the left junction and from the right junction to the
/// right window side.
class LensTypePartition {
 public:
  LensTypePartition(Polyline interfaceLeft, Polyline lowerArc, Polyline upperArc, Polyline interfaceRight,
                    double windowRadius, std::optional<GraphTriple> graphs = std::nullopt);

  const Polyline& interfaceLeft() const noexcept { return interfaceLeft_; }
  const Polyline& interfaceRight() const noexcept { return interfaceRight_; }
  const Polyline& lowerArc() const noexcept { return lowerArc_; }
  const Polyline& upperArc() const noexcept { return upperArc_; }
  const Polygon& finiteChamber() const noexcept { return finiteChamber_; }
  double windowRadius() const noexcept { return windowRadius_; }
  const std::optional<GraphTriple>& graphs() const noexcept { return graphs_; }

  /// Arc sample count, used to pick a matching reference lens.
  std::size_t arcIntervals() const noexcept { return upperArc_.size() - 1; }

  /// interfaceLeft + arc + interfaceRight as one chain (left to right).
  std::vector<Point> topChain() const { return chain(upperArc_); }
  std::vector<Point> bottomChain() const { return chain(lowerArc_); }

 private:
  std::vector<Point> chain(const Polyline& arc) const;

  Polyline interfaceLeft_;
  Polyline lowerArc_;
  Polyline upperArc_;
  Polyline interfaceRight_;
  double windowRadius_;
  std::optional<GraphTriple> graphs_;
  Polygon finiteChamber_;
};

inline std::vector<Point> LensTypePartition::chain(const Polyline& arc) const {
  std::vector<Point> out = interfaceLeft_.points();
  out.insert(out.end(), arc.points().begin() + 1, arc.points().end());
  out.insert(out.end(), interfaceRight_.points().begin() + 1, interfaceRight_.points().end());
  return out;
}

namespace detail {
inline Polygon chamber_from_arcs(const Polyline& lower, const Polyline& upper) {
  std::vector<Point> v = lower.points();
  const auto& u = upper.points();
  for (std::size_t k = u.size() - 2; k >= 1; --k) v.push_back(u[k]);
  return Polygon(std::move(v));
}
}  // namespace detail

inline LensTypePartition::LensTypePartition(Polyline interfaceLeft, Polyline lowerArc, Polyline upperArc,
                                            Polyline interfaceRight, double windowRadius,
                                            std::optional<GraphTriple> graphs)
    : interfaceLeft_(std::move(interfaceLeft)),
      lowerArc_(std::move(lowerArc)),
      upperArc_(std::move(upperArc)),
      interfaceRight_(std::move(interfaceRight)),
      windowRadius_(windowRadius),
      graphs_(std::move(graphs)),
      finiteChamber_(detail::chamber_from_arcs(lowerArc_, upperArc_)) {
  const double R = windowRadius_;
  if (!(R > 0.0)) throw ValidationError("window radius must be positive");
  if (!(lowerArc_.front() == upperArc_.front()) || !(lowerArc_.back() == upperArc_.back())) {
    throw ValidationError("chamber arcs do not share their junction points");
  }
  if (!(interfaceLeft_.back() == lowerArc_.front()) || !(interfaceRight_.front() == lowerArc_.back())) {
    throw ValidationError("interfaces do not end at the junction points");
  }
  const double tol = 1e-12 * std::max(1.0, R);
  if (std::abs(interfaceLeft_.front().x + R) > tol || std::abs(interfaceRight_.back().x - R) > tol) {
    throw ValidationError("interfaces do not reach the window boundary");
  }
  for (const Polyline* c : {&interfaceLeft_, &lowerArc_, &upperArc_, &interfaceRight_}) {
    for (const Point& p : c->points()) {
      if (std::abs(p.x) > R + tol || std::abs(p.y) >= R) throw ValidationError("partition leaves the window");
    }
  }
}

/// Partition built from a graph triple; interfaces are the graphs of g0.
inline LensTypePartition from_graphs(const GraphTriple& g) {
  g.validate();
  const std::size_t n = g.intervals();
  std::vector<Point> lower(n + 1), upper(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    lower[k] = {g.x[k], g.g2[k]};
    upper[k] = {g.x[k], g.g1[k]};
  }
  std::vector<Point> left = g.g0Left;
  std::vector<Point> right = g.g0Right;
  left.back() = lower.front();
  right.front() = lower.back();
  return LensTypePartition(Polyline(std::move(left)), Polyline(std::move(lower)), Polyline(std::move(upper)),
                           Polyline(std::move(right)), g.windowRadius, g);
}

/// The discrete lens partition used as reference (n arc intervals).
inline LensTypePartition lens_partition(const LensSpec& lens, double windowRadius, std::size_t n = 4096) {
  return from_graphs(lens_triple(lens, windowRadius, n));
}

/// Copy of p in a larger window; the interfaces are extended horizontally.
inline LensTypePartition with_window(const LensTypePartition& p, double R) {
  if (!(R >= p.windowRadius())) throw DomainError("with_window can only enlarge the window");
  if (R == p.windowRadius()) return p;
  if (p.graphs()) {
    GraphTriple g = *p.graphs();
    g.windowRadius = R;
    g.g0Left.insert(g.g0Left.begin(), Point{-R, 0.0});
    g.g0Right.push_back({R, 0.0});
    return from_graphs(g);
  }
  std::vector<Point> left = p.interfaceLeft().points();
  std::vector<Point> right = p.interfaceRight().points();
  left.insert(left.begin(), Point{-R, left.front().y});
  right.push_back({R, right.back().y});
  return LensTypePartition(Polyline(std::move(left)), p.lowerArc(), p.upperArc(), Polyline(std::move(right)), R);
}

// ---------------------------------------------------------------------------
// Perimeter and deficit

/// Length of chamber boundaries and interface inside the window.
inline double relative_perimeter(const LensTypePartition& p) {
  NeumaierSum s;
  s += polyline_length(p.interfaceLeft());
  s += polyline_length(p.lowerArc());
  s += polyline_length(p.upperArc());
  s += polyline_length(p.interfaceRight());
  return s.value();
}

inline constexpr double kAreaTolerance = 1e-6;

struct DeficitReport {
  double value = 0.0;
  double raw = 0.0;
  std::optional<double> graphFormula;
  double areaError = 0.0;
};

namespace detail {
// sqrt(1 + t^2) - sqrt(1 + s^2) without cancellation.
inline double length_gain(double t, double s) {
  return (t - s) * (t + s) / (std::sqrt(1.0 + t * t) + std::sqrt(1.0 + s * s));
}

inline double g0_excess(const std::vector<Point>& g) {
  NeumaierSum s;
  for (std::size_t k = 0; k + 1 < g.size(); ++k) {
    const double dx = g[k + 1].x - g[k].x;
    const double slope = (g[k + 1].y - g[k].y) / dx;
    s += length_gain(slope, 0.0) * dx;
  }
  return s.value();
}

inline double profile_length(const std::vector<double>& x, const std::vector<double>& y) {
  NeumaierSum s;
  for (std::size_t k = 0; k + 1 < x.size(); ++k) s += std::hypot(x[k + 1] - x[k], y[k + 1] - y[k]);
  return s.value();
}
}  // namespace detail

/// Deficit through the graph decomposition: flat-interface excess of g0,
/// arc excess of g_i over the dilated lens profiles, and the dilation term.
inline double graph_formula_deficit(const GraphTriple& g) {
  NeumaierSum s;
  s += detail::g0_excess(g.g0Left);
  s += detail::g0_excess(g.g0Right);
  const double h = g.step();
  for (int i = 1; i <= 2; ++i) {
    const auto& gi = i == 1 ? g.g1 : g.g2;
    for (std::size_t k = 0; k < g.intervals(); ++k) {
      const double t = (gi[k + 1] - gi[k]) / h;
      const double u = (g.utilde(i, k + 1) - g.utilde(i, k)) / h;
      s += detail::length_gain(t, u) * h;
    }
  }
  std::vector<double> x0(g.x.size());
  for (std::size_t k = 0; k < x0.size(); ++k) x0[k] = g.x[k] / (1.0 + g.sigma);
  const double baseLength = detail::profile_length(x0, g.base1) + detail::profile_length(x0, g.base2);
  s += g.sigma * (baseLength - 2.0 * g.lens.halfWidth);
  return s.value();
}

inline std::size_t reference_intervals(const LensTypePartition& p) {
  return p.graphs() ? p.graphs()->intervals() : p.arcIntervals();
}

/// Deficit against the discrete lens partition with the same arc resolution
/// and window. Throws ConstraintError when the chamber area is off by more
/// than 1e-6 m, and ValidationError when the graph formula and the raw
/// perimeter difference disagree.
inline DeficitReport deficit_report(const LensTypePartition& p, const LensSpec& spec) {
  DeficitReport r;
  const double area = polygon_area(p.finiteChamber());
  r.areaError = area - spec.mass;
  if (std::abs(r.areaError) > kAreaTolerance * spec.mass) {
    throw ConstraintError("finite chamber area " + std::to_string(area) + " differs from m = " +
                          std::to_string(spec.mass));
  }
  const LensTypePartition ref = lens_partition(spec, p.windowRadius(), reference_intervals(p));
  r.raw = relative_perimeter(p) - relative_perimeter(ref);
  r.value = r.raw;
  if (p.graphs()) {
    const double gf = graph_formula_deficit(*p.graphs());
    r.graphFormula = gf;
    if (std::abs(gf - r.raw) > 1e-6 * std::abs(gf) + 1e-12) {
      throw ValidationError("graph-formula deficit disagrees with the perimeter difference");
    }
    r.value = gf;
  }
  return r;
}

inline double deficit(const LensTypePartition& p, const LensSpec& spec) { return deficit_report(p, spec).value; }

// ---------------------------------------------------------------------------
// Distances

namespace detail {
namespace bg = boost::geometry;

inline BgMulti to_multi(const Polygon& p) {
  BgMulti m;
  m.push_back(to_bg(p.vertices()));
  return m;
}

inline double multi_symdiff(const BgMulti& a, const BgMulti& b) {
  BgMulti inter;
  bg::intersection(a, b, inter);
  return std::max(0.0, bg::area(a) + bg::area(b) - 2.0 * bg::area(inter));
}

inline Polygon upper_chamber(const std::vector<Point>& top, double R) {
  std::vector<Point> v = top;
  v.push_back({R, R});
  v.push_back({-R, R});
  return Polygon(std::move(v));
}

inline Polygon lower_chamber(const std::vector<Point>& bottom, double R) {
  std::vector<Point> v = bottom;
  v.push_back({R, -R});
  v.push_back({-R, -R});
  return Polygon(std::move(v));
}

/// The three chambers of p clipped to the window, as multipolygons.
inline std::array<BgMulti, 3> chambers(const LensTypePartition& p) {
  const double R = p.windowRadius();
  return {to_multi(p.finiteChamber()), to_multi(upper_chamber(p.topChain(), R)),
          to_multi(lower_chamber(p.bottomChain(), R))};
}

inline BgMulti window_square(double R) {
  return to_multi(Polygon({{-R, -R}, {R, -R}, {R, R}, {-R, R}}));
}

/// Chambers of T(q), where q lives in a larger window, clipped to [-R, R]^2.
inline std::array<BgMulti, 3> moved_chambers(const LensTypePartition& q, const Isometry& t, double R) {
  const double Rq = q.windowRadius();
  std::array<BgMulti, 3> out;
  const BgMulti window = window_square(R);
  const std::array<Polygon, 3> src = {q.finiteChamber(), upper_chamber(q.topChain(), Rq),
                                      lower_chamber(q.bottomChain(), Rq)};
  for (std::size_t i = 0; i < 3; ++i) {
    const std::vector<Point> moved = transform(src[i].vertices(), t);
    BgMulti m;
    m.push_back(to_bg(moved));
    bg::correct(m);
    BgMulti clipped;
    bg::intersection(m, window, clipped);
    out[i] = std::move(clipped);
  }
  return out;
}

inline double chamber_distance(const std::array<BgMulti, 3>& a, const std::array<BgMulti, 3>& b) {
  NeumaierSum s;
  for (std::size_t i = 0; i < 3; ++i) s += multi_symdiff(a[i], b[i]);
  return 0.5 * s.value();
}
}  // namespace detail

/// Half the summed chamber symmetric differences inside the common window,
/// computed with polygon booleans.
inline double partition_distance(const LensTypePartition& p, const LensTypePartition& q) {
  if (std::abs(p.windowRadius() - q.windowRadius()) > 1e-12 * std::max(1.0, p.windowRadius())) {
    throw DomainError("partitions live in different windows");
  }
  return detail::chamber_distance(detail::chambers(p), detail::chambers(q));
}

/// Distance between p and the image T(q). q must be given in a window large
/// enough that T(q) covers the window of p.
inline double moved_partition_distance(const LensTypePartition& p, const LensTypePartition& q, const Isometry& t) {
  return detail::chamber_distance(detail::chambers(p), detail::moved_chambers(q, t, p.windowRadius()));
}

/// Bottom and top thresholds of a partition whose chains are x-monotone.
/// On the vertical line through x the labels are 3 below bottom(x), 1
/// between, 2 above top(x). Vertical jumps are allowed.
struct SliceProfiles {
  std::vector<Point> bottom;
  std::vector<Point> top;
};

namespace detail {
inline bool monotone_in_x(const std::vector<Point>& c) {
  for (std::size_t k = 0; k + 1 < c.size(); ++k) {
    if (c[k + 1].x < c[k].x) return false;
  }
  return true;
}

/// Restricts an x-monotone chain to [-R, R], interpolating at the cuts.
inline std::vector<Point> clip_chain(const std::vector<Point>& c, double R) {
  std::vector<Point> out;
  out.reserve(c.size());
  auto lerp_at = [](Point a, Point b, double x) {
    const double f = (x - a.x) / (b.x - a.x);
    return Point{x, a.y + f * (b.y - a.y)};
  };
  for (std::size_t k = 0; k + 1 < c.size(); ++k) {
    const Point a = c[k];
    const Point b = c[k + 1];
    if (b.x < -R || a.x > R) continue;
    if (out.empty()) out.push_back(a.x < -R ? lerp_at(a, b, -R) : a);
    if (b.x > R) {
      out.push_back(lerp_at(a, b, R));
      break;
    }
    out.push_back(b);
  }
  return out;
}
}  // namespace detail

inline std::optional<SliceProfiles> slice_profiles(const LensTypePartition& p) {
  SliceProfiles s{p.bottomChain(), p.topChain()};
  if (!detail::monotone_in_x(s.bottom) || !detail::monotone_in_x(s.top)) return std::nullopt;
  return s;
}

/// Reference lens chains (no window restriction) for isometric images.
inline SliceProfiles lens_chains(const GraphTriple& lens, double reach) {
  SliceProfiles s;
  s.bottom.reserve(lens.x.size() + 2);
  s.top.reserve(lens.x.size() + 2);
  s.bottom.push_back({-reach, 0.0});
  s.top.push_back({-reach, 0.0});
  for (std::size_t k = 0; k < lens.x.size(); ++k) {
    s.bottom.push_back({lens.x[k], lens.g2[k]});
    s.top.push_back({lens.x[k], lens.g1[k]});
  }
  s.bottom.push_back({reach, 0.0});
  s.top.push_back({reach, 0.0});
  return s;
}

/// T applied to the chains, then restricted to x in [-R, R]. Requires a
/// rotation small enough (|theta| <= pi/6) to keep the chains x-monotone.
inline SliceProfiles moved_profiles(const SliceProfiles& chains, const Isometry& t, double R) {
  return {detail::clip_chain(transform(chains.bottom, t), R), detail::clip_chain(transform(chains.top, t), R)};
}

namespace detail {
inline double slice_mismatch(double b1, double t1, double b2, double t2) {
  return std::abs(b1 - b2) + std::abs(t1 - t2) - std::max(0.0, std::max(b1, b2) - std::min(t1, t2));
}

/// Exact integral of the mismatch over an x-interval of length w on which all
/// four (already clamped) thresholds are linear, with end values v[i][0/1].
inline double integrate_linear_piece(double w, const std::array<std::array<double, 2>, 4>& v) {
  std::array<double, 8> cuts{};
  std::size_t nc = 0;
  static constexpr std::array<std::array<int, 2>, 6> pairs = {{{0, 2}, {1, 3}, {0, 1}, {0, 3}, {2, 1}, {2, 3}}};
  for (const auto& pr : pairs) {
    const double d0 = v[pr[0]][0] - v[pr[1]][0];
    const double d1 = v[pr[0]][1] - v[pr[1]][1];
    if ((d0 < 0.0 && d1 > 0.0) || (d0 > 0.0 && d1 < 0.0)) cuts[nc++] = d0 / (d0 - d1);
  }
  auto at = [&](double u) {
    const double b1 = v[0][0] + u * (v[0][1] - v[0][0]);
    const double t1 = v[1][0] + u * (v[1][1] - v[1][0]);
    const double b2 = v[2][0] + u * (v[2][1] - v[2][0]);
    const double t2 = v[3][0] + u * (v[3][1] - v[3][0]);
    return slice_mismatch(b1, t1, b2, t2);
  };
  if (nc == 0) return 0.5 * w * (slice_mismatch(v[0][0], v[1][0], v[2][0], v[3][0]) +
                                 slice_mismatch(v[0][1], v[1][1], v[2][1], v[3][1]));
  std::sort(cuts.begin(), cuts.begin() + static_cast<std::ptrdiff_t>(nc));
  double total = 0.0;
  double u0 = 0.0;
  double f0 = at(0.0);
  for (std::size_t i = 0; i <= nc; ++i) {
    const double u1 = i < nc ? cuts[i] : 1.0;
    const double f1 = at(u1);
    total += 0.5 * (u1 - u0) * (f0 + f1);
    u0 = u1;
    f0 = f1;
  }
  return w * total;
}

/// As above but with raw values that may leave [-R, R]; splits at the clamp
/// points first.
inline double integrate_piece(double w, const std::array<std::array<double, 2>, 4>& v, double R) {
  bool inside = true;
  for (const auto& e : v) inside = inside && std::abs(e[0]) < R && std::abs(e[1]) < R;
  if (inside) return integrate_linear_piece(w, v);
  std::array<double, 10> cuts{};
  std::size_t nc = 0;
  for (const auto& e : v) {
    for (double level : {-R, R}) {
      const double d0 = e[0] - level;
      const double d1 = e[1] - level;
      if ((d0 < 0.0 && d1 > 0.0) || (d0 > 0.0 && d1 < 0.0)) cuts[nc++] = d0 / (d0 - d1);
    }
  }
  std::sort(cuts.begin(), cuts.begin() + static_cast<std::ptrdiff_t>(nc));
  double total = 0.0;
  double u0 = 0.0;
  for (std::size_t i = 0; i <= nc; ++i) {
    const double u1 = i < nc ? cuts[i] : 1.0;
    if (u1 > u0) {
      std::array<std::array<double, 2>, 4> c{};
      for (std::size_t j = 0; j < 4; ++j) {
        const double a = v[j][0] + u0 * (v[j][1] - v[j][0]);
        const double b = v[j][0] + u1 * (v[j][1] - v[j][0]);
        c[j] = {std::clamp(a, -R, R), std::clamp(b, -R, R)};
      }
      total += integrate_linear_piece(w * (u1 - u0), c);
    }
    u0 = u1;
  }
  return total;
}

class ChainCursor {
 public:
  explicit ChainCursor(const std::vector<Point>& c) : c_(c) {}
  /// Values of the segment covering [xa, xb] at both ends.
  std::array<double, 2> values(double xa, double xb) {
    while (i_ + 2 < c_.size() && c_[i_ + 1].x <= xa) ++i_;
    const Point a = c_[i_];
    const Point b = c_[i_ + 1];
    const double slope = (b.y - a.y) / (b.x - a.x);
    return {a.y + (xa - a.x) * slope, a.y + (xb - a.x) * slope};
  }

 private:
  const std::vector<Point>& c_;
  std::size_t i_ = 0;
};
}  // namespace detail

/// Measure of the set of window points where the two partitions assign
/// different chambers, integrated exactly slice by slice. Both profile sets
/// must span x in [-R, R].
inline double slice_distance(const SliceProfiles& p, const SliceProfiles& q, double R) {
  std::vector<double> knots;
  knots.reserve(p.bottom.size() + p.top.size() + q.bottom.size() + q.top.size());
  std::vector<double> tmp;
  auto merge_in = [&](const std::vector<Point>& c) {
    tmp.clear();
    std::size_t i = 0, j = 0;
    while (i < knots.size() || j < c.size()) {
      if (j == c.size() || (i < knots.size() && knots[i] <= c[j].x)) {
        tmp.push_back(knots[i++]);
      } else {
        tmp.push_back(c[j++].x);
      }
    }
    tmp.erase(std::unique(tmp.begin(), tmp.end()), tmp.end());
    knots.swap(tmp);
  };
  merge_in(p.bottom);
  merge_in(p.top);
  merge_in(q.bottom);
  merge_in(q.top);
  detail::ChainCursor cb1(p.bottom), ct1(p.top), cb2(q.bottom), ct2(q.top);
  NeumaierSum s;
  for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
    const double xa = std::max(knots[k], -R);
    const double xb = std::min(knots[k + 1], R);
    if (!(xb > xa)) continue;
    const std::array<std::array<double, 2>, 4> v = {cb1.values(xa, xb), ct1.values(xa, xb), cb2.values(xa, xb),
                                                     ct2.values(xa, xb)};
    if (v[0] == v[2] && v[1] == v[3]) continue;
    s += detail::integrate_piece(xb - xa, v, R);
  }
  return s.value();
}

/// Douglas-Peucker simplification of an open chain; keeps both endpoints.
inline std::vector<Point> simplify(const std::vector<Point>& c, double tol) {
  if (c.size() <= 2) return c;
  std::vector<char> keep(c.size(), 0);
  keep.front() = keep.back() = 1;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, c.size() - 1}};
  while (!stack.empty()) {
    const auto [i, j] = stack.back();
    stack.pop_back();
    if (j <= i + 1) continue;
    const Point a = c[i];
    const Point d = c[j] - a;
    const double len = norm(d);
    double worst = -1.0;
    std::size_t at = i;
    for (std::size_t k = i + 1; k < j; ++k) {
      const double dist = len > 0.0 ? std::abs(cross(d, c[k] - a)) / len : distance(c[k], a);
      if (dist > worst) {
        worst = dist;
        at = k;
      }
    }
    if (worst > tol) {
      keep[at] = 1;
      stack.push_back({i, at});
      stack.push_back({at, j});
    }
  }
  std::vector<Point> out;
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (keep[k]) out.push_back(c[k]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Asymmetry

/// Restricted isometry search. Translations (dx, dy) and rotations with
/// |theta| <= pi/6; mirror images are not searched (see README).
struct SearchConfig {
  std::uint64_t seed = 0;
  double translationSpan = 1.0;  // in units of the lens radius
  std::vector<double> rotationStarts = {-constants::pi / 6.0, 0.0, constants::pi / 6.0};
  int coarseEvaluations = 40;
  int fineEvaluations = 100;
  std::size_t coarseArcSamples = 256;
  double simplifyTolerance = 1e-5;  // relative to the lens radius
  std::size_t referenceSamples = 4096;
};

struct AsymmetryResult {
  double value = 0.0;
  double identityDistance = 0.0;
  Isometry best;
  int evaluations = 0;
};

namespace detail {
inline double clamp_rotation(double theta) { return std::clamp(theta, -constants::pi / 6.0, constants::pi / 6.0); }

inline Isometry isometry_from(std::span<const double> v) { return {v[0], v[1], clamp_rotation(v[2]), false}; }

inline double boolean_objective(const LensTypePartition& p, const LensTypePartition& bigLens, const Isometry& t) {
  return moved_partition_distance(p, bigLens, t);
}
}  // namespace detail

inline AsymmetryResult asymmetry_search(const LensTypePartition& p, const LensSpec& spec,
                                        const SearchConfig& cfg = {}) {
  const double R = p.windowRadius();
  const double r = spec.radius;
  const std::size_t n = p.graphs() ? p.graphs()->intervals() : cfg.referenceSamples;
  const double reach = 3.0 * R + 4.0 * r;
  const GraphTriple fineLens = lens_triple(spec, R, n);
  const GraphTriple coarseLens = lens_triple(spec, R, cfg.coarseArcSamples);
  const SliceProfiles fineChains = lens_chains(fineLens, reach);
  const SliceProfiles coarseChains = lens_chains(coarseLens, reach);

  AsymmetryResult out;
  const std::optional<SliceProfiles> prof = slice_profiles(p);

  std::function<double(std::span<const double>)> fine;
  std::function<double(std::span<const double>)> coarse;
  std::optional<LensTypePartition> bigLens;
  if (prof) {
    SliceProfiles simple{simplify(prof->bottom, cfg.simplifyTolerance * r),
                         simplify(prof->top, cfg.simplifyTolerance * r)};
    fine = [&, prof](std::span<const double> v) {
      return slice_distance(*prof, moved_profiles(fineChains, detail::isometry_from(v), R), R);
    };
    coarse = [&, simple](std::span<const double> v) {
      return slice_distance(simple, moved_profiles(coarseChains, detail::isometry_from(v), R), R);
    };
  } else {
    bigLens.emplace(lens_partition(spec, reach, n));
    fine = [&](std::span<const double> v) { return detail::boolean_objective(p, *bigLens, detail::isometry_from(v)); };
    coarse = fine;
  }

  const std::vector<double> zero = {0.0, 0.0, 0.0};
  out.identityDistance = fine(zero);
  out.evaluations = 1;
  out.value = out.identityDistance;
  out.best = {};
  if (out.identityDistance == 0.0) return out;

  Rng rng(cfg.seed);
  const double span = cfg.translationSpan * r;
  std::vector<double> bestX = zero;
  double bestCoarse = coarse(zero);
  ++out.evaluations;
  const std::array<double, 3> grid = {-span, 0.0, span};
  const std::vector<double> coarseSteps = {0.1 * r, 0.1 * r, 0.05};
  for (double theta : cfg.rotationStarts) {
    for (double gx : grid) {
      for (double gy : grid) {
        std::vector<double> x0 = {gx + rng.uniform(-0.02, 0.02) * r, gy + rng.uniform(-0.02, 0.02) * r, theta};
        const SimplexResult res = nelder_mead(coarse, x0, coarseSteps, cfg.coarseEvaluations);
        out.evaluations += res.evaluations;
        if (res.value < bestCoarse) {
          bestCoarse = res.value;
          bestX = res.x;
        }
      }
    }
  }
  bestX[2] = detail::clamp_rotation(bestX[2]);
  const double scale = std::max(1e-4, std::min(0.05, std::sqrt(out.identityDistance)));
  const std::vector<double> fineSteps = {scale * r * 0.1, scale * r * 0.1, scale * 0.1};
  const SimplexResult res = nelder_mead(fine, bestX, fineSteps, cfg.fineEvaluations, 1e-14, 1e-9);
  out.evaluations += res.evaluations;
  if (res.value < out.value) {
    out.value = res.value;
    out.best = detail::isometry_from(res.x);
  }
  return out;
}

/// Upper bound on the asymmetry from a restricted isometry search. Never
/// exceeds the distance to the untransformed lens.
inline double asymmetry(const LensTypePartition& p, const LensSpec& spec, const SearchConfig& cfg = {}) {
  return asymmetry_search(p, spec, cfg).value;
}

// ---------------------------------------------------------------------------
// Admissibility

struct Admissibility {
  bool admissible = true;
  std::vector<std::string> violations;
  double areaError = 0.0;
  explicit operator bool() const noexcept { return admissible; }
};

/// Area within 1e-6 m and every deviation from the flat interface, together
/// with the finite chamber, inside the ball of radius R.
inline Admissibility is_admissible(const LensTypePartition& p, const LensSpec& spec, double R) {
  Admissibility a;
  a.areaError = polygon_area(p.finiteChamber()) - spec.mass;
  if (std::abs(a.areaError) > kAreaTolerance * spec.mass) {
    a.admissible = false;
    a.violations.push_back("area mismatch");
  }
  bool outside = false;
  for (const Polyline* arc : {&p.lowerArc(), &p.upperArc()}) {
    for (const Point& q : arc->points()) outside = outside || norm(q) >= R;
  }
  for (const Polyline* c : {&p.interfaceLeft(), &p.interfaceRight()}) {
    const auto& pts = c->points();
    for (std::size_t k = 0; k < pts.size(); ++k) {
      const bool moved = pts[k].y != 0.0 || (k > 0 && pts[k - 1].y != 0.0) ||
                         (k + 1 < pts.size() && pts[k + 1].y != 0.0);
      if (moved && norm(pts[k]) >= R) outside = true;
    }
  }
  if (outside) {
    a.admissible = false;
    a.violations.push_back("support outside window");
  }
  return a;
}

// ---------------------------------------------------------------------------
// Records and serialization

struct StabilityRecord {
  std::string id;
  double sigma = 0.0;
  double deficit = 0.0;
  double asymmetry = 0.0;
  std::optional<double> ratio;
  std::optional<double> fugledeBound;
};

inline StabilityRecord make_record(std::string id, double sigma, double deficit, double asymmetry,
                                   std::optional<double> fugledeBound = std::nullopt) {
  StabilityRecord r{std::move(id), sigma, deficit, asymmetry, std::nullopt, fugledeBound};
  if (asymmetry > 0.0) r.ratio = deficit / (asymmetry * asymmetry);
  return r;
}

inline constexpr const char* kPartitionSchema = "partition/1";

inline nlohmann::json to_json(const GraphTriple& g) {
  return {{"sigma", g.sigma},         {"windowRadius", g.windowRadius}, {"mass", g.lens.mass},
          {"g0Left", points_to_json(g.g0Left)}, {"g0Right", points_to_json(g.g0Right)},
          {"x", g.x},                 {"g1", g.g1},                     {"g2", g.g2},
          {"base1", g.base1},         {"base2", g.base2}};
}

inline GraphTriple graph_triple_from_json(const nlohmann::json& j) {
  GraphTriple g;
  g.sigma = j.at("sigma").get<double>();
  g.windowRadius = j.at("windowRadius").get<double>();
  g.lens = LensSpec::from_mass(j.at("mass").get<double>());
  g.g0Left = points_from_json(j.at("g0Left"));
  g.g0Right = points_from_json(j.at("g0Right"));
  g.x = j.at("x").get<std::vector<double>>();
  g.g1 = j.at("g1").get<std::vector<double>>();
  g.g2 = j.at("g2").get<std::vector<double>>();
  g.base1 = j.at("base1").get<std::vector<double>>();
  g.base2 = j.at("base2").get<std::vector<double>>();
  g.validate();
  return g;
}

inline nlohmann::json to_json(const LensTypePartition& p) {
  nlohmann::json j = {{"schema", kPartitionSchema},
                      {"windowRadius", p.windowRadius()},
                      {"finiteChamber", to_json(p.finiteChamber())},
                      {"interfaceLeft", to_json(p.interfaceLeft())},
                      {"interfaceRight", to_json(p.interfaceRight())},
                      {"lowerArc", to_json(p.lowerArc())},
                      {"upperArc", to_json(p.upperArc())}};
  if (p.graphs()) j["graphs"] = to_json(*p.graphs());
  return j;
}

inline LensTypePartition partition_from_json(const nlohmann::json& j) {
  if (j.value("schema", std::string{}) != kPartitionSchema) throw ValidationError("expected schema partition/1");
  if (j.contains("graphs")) return from_graphs(graph_triple_from_json(j.at("graphs")));
  return LensTypePartition(polyline_from_json(j.at("interfaceLeft")), polyline_from_json(j.at("lowerArc")),
                           polyline_from_json(j.at("upperArc")), polyline_from_json(j.at("interfaceRight")),
                           j.at("windowRadius").get<double>());
}

}  // namespace lenslab
