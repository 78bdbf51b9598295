#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "lenslab/errors.hpp"
#include "lenslab/geometry.hpp"
#include "lenslab/numerics.hpp"

namespace lenslab {

/// Graph description of a lens-type perturbation.
///
/// The finite chamber lies between g2 (below) and g1 (above) on
/// I_sigma = [-a, a], a = (1 + sigma) * halfWidth. The interface between the
/// two unbounded chambers is the graph of g0 on [-R_w, -a] and [a, R_w].
/// g1, g2 are sampled on the uniform grid x_k = (1 + sigma) * x0_k; base1,
/// base2 hold the unit-area-corrected lens profiles on the undilated grid x0,
/// so that the dilated lens profiles are (1 + sigma) * base_i.
/// g0 is stored as explicit points and may use a non-uniform grid.
struct GraphTriple {
  double sigma = 0.0;
  double windowRadius = 0.0;
  LensSpec lens;
  std::vector<Point> g0Left;
  std::vector<Point> g0Right;
  std::vector<double> x;
  std::vector<double> g1;
  std::vector<double> g2;
  std::vector<double> base1;
  std::vector<double> base2;

  std::size_t intervals() const noexcept { return x.empty() ? 0 : x.size() - 1; }
  double junction() const noexcept { return (1.0 + sigma) * lens.halfWidth; }
  double step() const { return x[1] - x[0]; }
  double utilde(int which, std::size_t k) const {
    return (1.0 + sigma) * (which == 1 ? base1[k] : base2[k]);
  }

  /// Throws ValidationError when an invariant fails.
  void validate() const;
};

namespace detail {
inline bool close(double a, double b, double scale) {
  return std::abs(a - b) <= 1e-12 * std::max(1.0, scale);
}
}  // namespace detail

inline void GraphTriple::validate() const {
  const std::size_t n = intervals();
  if (n < 4) throw ValidationError("graph triple needs at least 4 intervals");
  if (g1.size() != x.size() || g2.size() != x.size() || base1.size() != x.size() || base2.size() != x.size()) {
    throw ValidationError("graph triple arrays differ in length");
  }
  const double a = junction();
  const double R = windowRadius;
  if (!detail::close(x.front(), -a, R) || !detail::close(x.back(), a, R)) {
    throw ValidationError("g1/g2 grid does not span I_sigma");
  }
  const double h = 2.0 * a / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (std::abs((x[k + 1] - x[k]) - h) > 1e-9 * h) throw ValidationError("g1/g2 grid is not uniform");
  }
  for (std::size_t k = 0; k <= n; ++k) {
    if (!std::isfinite(g1[k]) || !std::isfinite(g2[k])) throw ValidationError("non-finite graph sample");
    if (g1[k] < g2[k]) {
      throw ValidationError("g1 < g2 at x = " + std::to_string(x[k]));
    }
  }
  if (g0Left.size() < 2 || g0Right.size() < 2) throw ValidationError("g0 needs samples on both sides");
  auto check_side = [&](const std::vector<Point>& g, double from, double to) {
    if (!detail::close(g.front().x, from, R) || !detail::close(g.back().x, to, R)) {
      throw ValidationError("g0 samples do not span their interval");
    }
    for (std::size_t k = 0; k + 1 < g.size(); ++k) {
      if (!(g[k + 1].x > g[k].x)) throw ValidationError("g0 grid is not increasing");
    }
    for (const Point& p : g) {
      if (!std::isfinite(p.y)) throw ValidationError("non-finite g0 sample");
    }
  };
  check_side(g0Left, -R, -a);
  check_side(g0Right, a, R);
  if (std::abs(g0Left.front().y) > 1e-12 || std::abs(g0Right.back().y) > 1e-12) {
    throw ValidationError("g0 is not compactly supported in the window");
  }
  const double tol = 1e-12 * std::max(1.0, lens.radius);
  if (std::abs(g1.front() - g2.front()) > tol || std::abs(g1.front() - g0Left.back().y) > tol ||
      std::abs(g1.back() - g2.back()) > tol || std::abs(g1.back() - g0Right.front().y) > tol) {
    throw ValidationError("boundary matching of g0, g1, g2 fails at the junctions");
  }
}

/// Trapezoid integral of samples on a uniform grid with step h.
inline double trapezoid(const std::vector<double>& f, double h) {
  NeumaierSum s;
  for (std::size_t k = 0; k + 1 < f.size(); ++k) s += 0.5 * (f[k] + f[k + 1]);
  return s.value() * h;
}

/// Area between g1 and g2; equal to the shoelace area of the chamber polygon.
inline double chamber_area(const GraphTriple& g) {
  std::vector<double> d(g.x.size());
  for (std::size_t k = 0; k < d.size(); ++k) d[k] = g.g1[k] - g.g2[k];
  return trapezoid(d, g.step());
}

/// cos^2 bump vanishing at the ends of I_sigma.
inline std::vector<double> projection_profile(const GraphTriple& g) {
  const double L = 2.0 * g.junction();
  std::vector<double> phi(g.x.size());
  for (std::size_t k = 0; k < phi.size(); ++k) {
    const double c = std::cos(constants::pi * g.x[k] / L);
    phi[k] = c * c;
  }
  phi.front() = phi.back() = 0.0;
  return phi;
}

/// Adds c * phi to g1 so that the chamber area is exactly m on the grid.
/// Throws ProjectionError if that would push g1 below g2.
inline GraphTriple project_area(GraphTriple g, double m) {
  if (!(m > 0.0)) throw DomainError("project_area needs m > 0");
  const std::vector<double> phi = projection_profile(g);
  const double area = chamber_area(g);
  const double c = (m - area) / trapezoid(phi, g.step());
  if (c == 0.0) return g;
  for (std::size_t k = 0; k < phi.size(); ++k) {
    g.g1[k] += c * phi[k];
    if (k > 0 && k + 1 < phi.size() && g.g1[k] < g.g2[k]) {
      throw ProjectionError("area projection would push g1 below g2");
    }
  }
  return g;
}

/// g0 sample count on one side: spacing four arc steps, between 64 and 1024
/// intervals.
inline std::size_t default_g0_points(double from, double to, double arcStep) {
  const double n = std::ceil((to - from) / (4.0 * arcStep));
  return static_cast<std::size_t>(std::clamp(n, 64.0, 1024.0)) + 1;
}

/// Flat g0 samples on [from, to].
inline std::vector<Point> flat_samples(double from, double to, std::size_t count) {
  std::vector<Point> pts(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double f = static_cast<double>(k) / static_cast<double>(count - 1);
    pts[k] = {from + f * (to - from), 0.0};
  }
  pts.front().x = from;
  pts.back().x = to;
  return pts;
}

/// Lens profiles on a uniform x grid with n intervals, dilated by (1 + sigma),
/// g0 = 0. The base profiles are area-corrected so that the undilated
/// discrete chamber has area exactly m.
inline GraphTriple lens_triple(const LensSpec& lens, double windowRadius, std::size_t n = 4096,
                               double sigma = 0.0) {
  if (n < 8) throw DomainError("lens_triple needs at least 8 intervals");
  if (std::abs(sigma) > 0.5) throw DomainError("dilation parameter must satisfy |sigma| <= 0.5");
  const double a0 = lens.halfWidth;
  const double a = (1.0 + sigma) * a0;
  if (!(windowRadius > a + 1e-9)) throw DomainError("window does not contain the lens");

  GraphTriple base;
  base.sigma = 0.0;
  base.windowRadius = windowRadius;
  base.lens = lens;
  base.x.resize(n + 1);
  base.g1.resize(n + 1);
  base.g2.resize(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    const double xk = -a0 + 2.0 * a0 * static_cast<double>(k) / static_cast<double>(n);
    base.x[k] = xk;
    base.g1[k] = lens_upper_height(lens.radius, xk);
  }
  base.x.front() = -a0;
  base.x.back() = a0;
  if (n % 2 == 0) base.x[n / 2] = 0.0;
  base.g1.front() = base.g1.back() = 0.0;
  for (std::size_t k = 0; k <= n; ++k) base.g2[k] = -base.g1[k];
  base = project_area(std::move(base), lens.mass);

  GraphTriple g;
  g.sigma = sigma;
  g.windowRadius = windowRadius;
  g.lens = lens;
  g.base1 = base.g1;
  g.base2 = base.g2;
  g.x.resize(n + 1);
  g.g1.resize(n + 1);
  g.g2.resize(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    g.x[k] = (1.0 + sigma) * base.x[k];
    g.g1[k] = (1.0 + sigma) * base.g1[k];
    g.g2[k] = (1.0 + sigma) * base.g2[k];
  }
  const double h = 2.0 * a / static_cast<double>(n);
  g.g0Left = flat_samples(-windowRadius, -a, default_g0_points(-windowRadius, -a, h));
  g.g0Right = flat_samples(a, windowRadius, default_g0_points(a, windowRadius, h));
  return g;
}

}  // namespace lenslab
