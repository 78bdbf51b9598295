#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "lenslab/errors.hpp"
#include "lenslab/geometry.hpp"
#include "lenslab/numerics.hpp"

namespace lenslab {

struct RieszConfig {
  double exponent = 1.0;  // kernel |x - y|^{-exponent}
  double relTol = 1e-5;
  int maxDepth = 30;

  void validate() const {
    if (!(exponent > 0.0 && exponent < 2.0)) throw DomainError("Riesz exponent must lie in (0, 2)");
    if (!(relTol > 1e-6 - 1e-18 && relTol < 1e-1)) throw DomainError("relTol must lie in [1e-6, 1e-1)");
    if (maxDepth < 1) throw DomainError("maxDepth must be positive");
  }
};

struct RieszValue {
  double value = 0.0;
  double error = 0.0;
};

/// Edge-pair sums for the boundary form of the Riesz energy.
///
/// With beta = 2 - a, |z|^{-a} = beta^{-2} Laplacian |z|^beta in the plane,
/// and two applications of the divergence theorem give
///
///   int_E int_E |x - y|^{-a} dx dy = -beta^{-2} sum_{e,f} (e . f) J(e, f),
///   J(e, f) = int_0^1 int_0^1 |P_e(s) - P_f(t)|^beta ds dt,
///
/// over ordered pairs of boundary edges (edge vectors e, f). J is continuous,
/// so only adjacent edges need special treatment: self pairs are closed
/// form, pairs sharing a vertex reduce to one-dimensional integrals, and
/// the rest use nested Gauss-Legendre rules with bisection of the longer
/// edge when the rules disagree.
class RieszPairs {
 public:
  struct Sum {
    double value = 0.0;      // sum of (e . f) J with pair multiplicity
    double error = 0.0;      // sum of |e . f| * (quadrature error of J)
    double magnitude = 0.0;  // sum of |e . f| J
    Sum& operator+=(const Sum& o) {
      value += o.value;
      error += o.error;
      magnitude += o.magnitude;
      return *this;
    }
  };

  RieszPairs(double exponent, double rho, int maxDepth)
      : beta_(2.0 - exponent), halfBeta_(0.5 * (2.0 - exponent)), rho_(rho), maxDepth_(maxDepth) {}

  double beta() const noexcept { return beta_; }

  /// Ordered-pair total over all edges of the closed ring v.
  Sum total(std::span<const Point> v) const {
    const std::size_t n = v.size();
    std::vector<Sum> rows(n);
    parallel_for(n, [&](std::size_t i) {
      Sum s;
      for (std::size_t j = i; j < n; ++j) s += pair(v, i, j);
      rows[i] = s;
    });
    Sum out;
    NeumaierSum a, b, c;
    for (const Sum& r : rows) {
      a += r.value;
      b += r.error;
      c += r.magnitude;
    }
    out.value = a.value();
    out.error = b.value();
    out.magnitude = c.value();
    return out;
  }

  /// Part of total() from pairs with at least one edge in `edges` (sorted,
  /// distinct indices).
  Sum touching(std::span<const Point> v, std::span<const std::size_t> edges) const {
    const std::size_t n = v.size();
    Sum out;
    for (std::size_t k = 0; k < edges.size(); ++k) {
      const std::size_t i = edges[k];
      for (std::size_t j = 0; j < n; ++j) {
        // pairs inside `edges` are visited once, from the smaller index
        const bool inSet = std::binary_search(edges.begin(), edges.end(), j);
        if (inSet && j < i) continue;
        out += pair(v, std::min(i, j), std::max(i, j));
      }
    }
    return out;
  }

  /// Contribution of the unordered pair (i <= j), counted twice if i != j.
  Sum pair(std::span<const Point> v, std::size_t i, std::size_t j) const {
    const std::size_t n = v.size();
    const Point Ai = v[i];
    const Point ei = v[(i + 1) % n] - Ai;
    const Point Aj = v[j];
    const Point ej = v[(j + 1) % n] - Aj;
    const double c = dot(ei, ej);
    Sum s;
    if (c == 0.0) return s;
    double J = 0.0, err = 0.0;
    double mult = 2.0;
    if (i == j) {
      J = self(norm(ei));
      mult = 1.0;
    } else if (j == i + 1) {
      adjacent(ei, ej, J, err);
    } else if (i == 0 && j == n - 1) {
      adjacent(ej, ei, J, err);
    } else {
      separated(Ai, ei, Aj, ej, 0, J, err);
    }
    s.value = mult * c * J;
    s.error = mult * std::abs(c) * err;
    s.magnitude = mult * std::abs(c) * J;
    return s;
  }

 private:
  double powb(double d2) const { return halfBeta_ == 0.5 ? std::sqrt(d2) : std::pow(d2, halfBeta_); }

  double self(double len) const { return std::pow(len, beta_) * 2.0 / ((beta_ + 1.0) * (beta_ + 2.0)); }

  /// e ends where f starts.
  void adjacent(Point e, Point f, double& J, double& err) const {
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    auto g1 = [&](double w) { const Point d = e + w * f; return powb(dot(d, d)); };
    auto g2 = [&](double w) { const Point d = w * e + f; return powb(dot(d, d)); };
    double e1 = 0.0, e2 = 0.0;
    const double tol = std::max(1e-14, 0.1 * rho_);
    const double i1 = GK::integrate(g1, 0.0, 1.0, 15, tol, &e1);
    const double i2 = GK::integrate(g2, 0.0, 1.0, 15, tol, &e2);
    J = (i1 + i2) / (beta_ + 2.0);
    err = (std::abs(e1) + std::abs(e2)) / (beta_ + 2.0);
  }

  double product_rule(Point A, Point e, Point B, Point f, int order) const {
    const QuadRule& q = gauss_rule(order);
    const Point d0 = A - B;
    double s = 0.0;
    for (std::size_t a = 0; a < q.nodes.size(); ++a) {
      const Point p = d0 + q.nodes[a] * e;
      double inner = 0.0;
      for (std::size_t b = 0; b < q.nodes.size(); ++b) {
        const Point d = p - q.nodes[b] * f;
        inner += q.weights[b] * powb(dot(d, d));
      }
      s += q.weights[a] * inner;
    }
    return s;
  }

  void separated(Point A, Point e, Point B, Point f, int depth, double& J, double& err) const {
    double lo = product_rule(A, e, B, f, 2);
    double hi = lo, diff = 0.0;
    for (int order : {4, 8}) {
      hi = product_rule(A, e, B, f, order);
      diff = std::abs(hi - lo);
      if (diff <= rho_ * std::abs(hi)) break;
      lo = hi;
    }
    if (diff <= rho_ * std::abs(hi) || depth >= maxDepth_) {
      J = hi;
      err = diff;
      return;
    }
    double J1, J2, r1, r2;
    if (dot(e, e) >= dot(f, f)) {
      const Point h = 0.5 * e;
      separated(A, h, B, f, depth + 1, J1, r1);
      separated(A + h, h, B, f, depth + 1, J2, r2);
    } else {
      const Point h = 0.5 * f;
      separated(A, e, B, h, depth + 1, J1, r1);
      separated(A, e, B + h, h, depth + 1, J2, r2);
    }
    J = 0.5 * (J1 + J2);
    err = 0.5 * (r1 + r2);
  }

  double beta_;
  double halfBeta_;
  double rho_;
  int maxDepth_;
};

/// int_E int_E |x - y|^{-a} dx dy for a simple polygon E, with an error
/// estimate. A cheap first pass fixes the per-pair relative tolerance so the
/// summed error stays below relTol * |value|; AccuracyError (carrying the
/// best estimate) is thrown otherwise.
inline RieszValue riesz_energy(const Polygon& E, const RieszConfig& cfg = {}) {
  cfg.validate();
  const std::span<const Point> v(E.vertices());
  const RieszPairs first(cfg.exponent, cfg.relTol, cfg.maxDepth);
  const RieszPairs::Sum s0 = first.total(v);
  const double beta2 = first.beta() * first.beta();
  const double rho = std::max(1e-15, 0.25 * cfg.relTol * std::abs(s0.value) / s0.magnitude);
  const RieszPairs second(cfg.exponent, rho, cfg.maxDepth);
  const RieszPairs::Sum s = second.total(v);
  RieszValue out{-s.value / beta2, s.error / beta2};
  if (!(out.error <= cfg.relTol * std::abs(out.value))) {
    throw AccuracyError("Riesz quadrature did not reach the requested tolerance", out.value, out.error);
  }
  return out;
}

}  // namespace lenslab
