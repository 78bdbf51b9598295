#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <deque>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "lenslab/errors.hpp"
#include "lenslab/geometry.hpp"
#include "lenslab/numerics.hpp"
#include "lenslab/riesz.hpp"

namespace lenslab {

/// 2 sqrt(2 pi / 3 - sqrt(3) / 2): perimeter minus chord of the unit-area lens.
inline double mu0() { return 2.0 * std::sqrt(unit_lens_area); }

/// Length of the part of the horizontal axis lying in the closed polygon
/// (interior chords plus boundary edges on the axis).
inline double wetting_length(const Polygon& E) {
  const auto& v = E.vertices();
  const std::size_t n = v.size();
  std::vector<double> xs;
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = v[i];
    const Point b = v[(i + 1) % n];
    if (a.y == 0.0) xs.push_back(a.x);
    if ((a.y < 0.0 && b.y > 0.0) || (a.y > 0.0 && b.y < 0.0)) xs.push_back(a.x + (b.x - a.x) * a.y / (a.y - b.y));
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  NeumaierSum s;
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    if (contains(E, {0.5 * (xs[k] + xs[k + 1]), 0.0}, true)) s += xs[k + 1] - xs[k];
  }
  return s.value();
}

struct EnergyReport {
  double perimeter = 0.0;
  double wettingLength = 0.0;
  RieszValue riesz;
  double gamma = 0.0;
  double exponent = 0.0;
  double total = 0.0;
};

/// Perimeter - wetting length + gamma * Riesz energy. The Riesz term is
/// skipped (reported as 0) when gamma = 0.
inline EnergyReport f_gamma(const Polygon& E, double gamma, const RieszConfig& cfg = {}) {
  if (!(gamma >= 0.0)) throw DomainError("gamma must be nonnegative");
  EnergyReport r;
  r.gamma = gamma;
  r.exponent = cfg.exponent;
  r.perimeter = polygon_perimeter(E);
  r.wettingLength = wetting_length(E);
  if (gamma > 0.0) r.riesz = riesz_energy(E, cfg);
  r.total = r.perimeter - r.wettingLength + gamma * r.riesz.value;
  return r;
}

/// F_0(E) - P(E) / 2; nonnegative since the wetted part of the axis is
/// covered by the boundary from above and from below.
inline double check_half_perimeter(const Polygon& E) {
  return 0.5 * polygon_perimeter(E) - wetting_length(E);
}

/// Riesz energy of the unit-area lens polygon with `arcSamples` edges per
/// arc, cached per (exponent, relTol, arcSamples).
inline RieszValue unit_lens_riesz(const RieszConfig& cfg, std::size_t arcSamples = 512) {
  static std::mutex mutex;
  static std::map<std::tuple<double, double, std::size_t>, RieszValue> cache;
  const auto key = std::make_tuple(cfg.exponent, cfg.relTol, arcSamples);
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  const RieszValue v = riesz_energy(lens_polygon(LensSpec::from_mass(1.0), arcSamples), cfg);
  std::lock_guard lock(mutex);
  cache.emplace(key, v);
  return v;
}

/// F_gamma of the lens of area m, from the scaling laws
/// F_0(L_m) = mu0 sqrt(m) and riesz(L_m) = m^{(4 - a)/2} riesz(L_1).
inline double lens_upper_bound(double m, double gamma, const RieszConfig& cfg = {}) {
  if (!(m > 0.0)) throw DomainError("lens_upper_bound needs m > 0");
  double value = mu0() * std::sqrt(m);
  if (gamma > 0.0) value += gamma * std::pow(m, 0.5 * (4.0 - cfg.exponent)) * unit_lens_riesz(cfg).value;
  return value;
}

// ---------------------------------------------------------------------------
// Area-constrained descent on pinned graph pairs

struct OptimizerConfig {
  int nodes = 48;            // interior nodes per arc
  double tol = 1e-7;         // relative energy decrease regarded as stalled
  int patience = 3;
  int maxIterations = 1000;
  double fdStep = 1e-4;      // times sqrt(m)
  double pairTol = 1e-10;    // per-pair relative quadrature tolerance
  bool freeCheck = true;
  std::size_t referenceSamples = 4096;  // L_1 resolution for the asymmetry
};

struct FreeCheck {
  bool improvingDetachment = false;
  bool improvingVertexMove = false;
  double bestDetachmentGain = 0.0;  // negative if detaching raises the energy
  double bestVertexGain = 0.0;
};

struct OptResult {
  Polygon finalShape;
  std::vector<EnergyReport> energyTrace;
  bool converged = false;
  int iterations = 0;
  double rescaledAsymmetry = 0.0;
  std::optional<FreeCheck> freeCheck;
  std::string note;
};

namespace detail {

/// Upper graph u_j >= 0 and lower graph l_j <= 0 over nodes
/// x_j = w sin(phi_j) / sin(pi/3), phi_j uniform in (-pi/3, pi/3), pinned to
/// (-w, 0) and (w, 0).
struct PinnedShape {
  double w = 0.0;
  std::vector<double> u;
  std::vector<double> l;

  std::size_t nodes() const { return u.size(); }

  std::vector<double> node_x() const {
    const std::size_t K = nodes();
    std::vector<double> x(K);
    const double s3 = std::sin(constants::pi / 3.0);
    for (std::size_t j = 0; j < K; ++j) {
      const double phi = -constants::pi / 3.0 + 2.0 * constants::pi / 3.0 * static_cast<double>(j + 1) /
                                                    static_cast<double>(K + 1);
      x[j] = w * std::sin(phi) / s3;
    }
    return x;
  }

  /// CCW ring: (-w, 0), lower nodes, (w, 0), upper nodes right to left.
  std::vector<Point> vertices() const {
    const std::size_t K = nodes();
    const std::vector<double> x = node_x();
    std::vector<Point> v;
    v.reserve(2 * K + 2);
    v.push_back({-w, 0.0});
    for (std::size_t j = 0; j < K; ++j) v.push_back({x[j], l[j]});
    v.push_back({w, 0.0});
    for (std::size_t j = K; j-- > 0;) v.push_back({x[j], u[j]});
    return v;
  }

  std::size_t upper_index(std::size_t j) const { return 2 * nodes() + 1 - j; }
  std::size_t lower_index(std::size_t j) const { return j + 1; }
};

inline double ring_area(const std::vector<Point>& v) { return signed_area(v); }

inline double ring_perimeter(const std::vector<Point>& v) {
  NeumaierSum s;
  for (std::size_t i = 0; i < v.size(); ++i) s += distance(v[i], v[(i + 1) % v.size()]);
  return s.value();
}

inline void restore_area(PinnedShape& s, double m) {
  const double a = ring_area(s.vertices());
  const double f = m / a;
  for (double& y : s.u) y *= f;
  for (double& y : s.l) y *= f;
}

/// Solves the symmetric tridiagonal system (diag d, off-diagonal e) in place.
inline std::vector<double> solve_tridiagonal(std::vector<double> d, std::vector<double> e, std::vector<double> b) {
  const std::size_t n = d.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double f = e[i - 1] / d[i - 1];
    d[i] -= f * e[i - 1];
    b[i] -= f * b[i - 1];
  }
  b[n - 1] /= d[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) b[i] = (b[i] - e[i] * b[i + 1]) / d[i];
  return b;
}

/// Perimeter Hessian of a pinned chain with respect to the heights.
inline std::pair<std::vector<double>, std::vector<double>> chain_metric(double w, const std::vector<double>& x,
                                                                       const std::vector<double>& y) {
  const std::size_t K = x.size();
  std::vector<double> k(K + 1);
  for (std::size_t s = 0; s <= K; ++s) {
    const double x0 = s == 0 ? -w : x[s - 1];
    const double y0 = s == 0 ? 0.0 : y[s - 1];
    const double x1 = s == K ? w : x[s];
    const double y1 = s == K ? 0.0 : y[s];
    const double dx = x1 - x0;
    const double len = std::hypot(dx, y1 - y0);
    k[s] = dx * dx / (len * len * len);
  }
  std::vector<double> d(K), e(K > 0 ? K - 1 : 0);
  double kmax = 0.0;
  for (double v : k) kmax = std::max(kmax, v);
  for (std::size_t j = 0; j < K; ++j) d[j] = k[j] + k[j + 1] + 1e-8 * kmax;
  for (std::size_t j = 0; j + 1 < K; ++j) e[j] = -k[j + 1];
  return {d, e};
}

class PinnedEnergy {
 public:
  PinnedEnergy(double gamma, double exponent, double pairTol, int maxDepth)
      : gamma_(gamma), pairs_(exponent, pairTol, maxDepth) {}

  struct Eval {
    double perimeter = 0.0;
    double wetting = 0.0;
    RieszPairs::Sum riesz;
    double total = 0.0;
  };

  Eval evaluate(const std::vector<Point>& v, double w) const {
    Eval e;
    e.perimeter = ring_perimeter(v);
    e.wetting = 2.0 * w;
    if (gamma_ > 0.0) e.riesz = pairs_.total(v);
    e.total = e.perimeter - e.wetting + gamma_ * riesz_value(e.riesz);
    return e;
  }

  double riesz_value(const RieszPairs::Sum& s) const { return -s.value / (pairs_.beta() * pairs_.beta()); }
  double riesz_error(const RieszPairs::Sum& s) const { return s.error / (pairs_.beta() * pairs_.beta()); }
  double gamma() const { return gamma_; }
  const RieszPairs& pairs() const { return pairs_; }

 private:
  double gamma_;
  RieszPairs pairs_;
};

inline EnergyReport to_report(const PinnedEnergy& pe, const PinnedEnergy::Eval& e, double exponent) {
  EnergyReport r;
  r.perimeter = e.perimeter;
  r.wettingLength = e.wetting;
  r.riesz = {pe.riesz_value(e.riesz), pe.riesz_error(e.riesz)};
  r.gamma = pe.gamma();
  r.exponent = exponent;
  r.total = e.total;
  return r;
}

inline PinnedShape lens_start(double m, std::size_t K) {
  const LensSpec lens = LensSpec::from_mass(m);
  PinnedShape s;
  s.w = lens.halfWidth;
  s.u.resize(K);
  s.l.resize(K);
  const std::vector<double> x = s.node_x();
  for (std::size_t j = 0; j < K; ++j) {
    s.u[j] = lens_upper_height(lens.radius, x[j]);
    s.l[j] = -s.u[j];
  }
  restore_area(s, m);
  return s;
}
}  // namespace detail

/// Energy of E against small vertex moves and against detaching part of the
/// mass into a separate, far away lens. Heuristic; see README.
inline FreeCheck free_polygon_check(const Polygon& E, double m, double gamma, const RieszConfig& cfg,
                                    double pairTol = 1e-10) {
  FreeCheck fc;
  const detail::PinnedEnergy pe(gamma, cfg.exponent, pairTol, cfg.maxDepth);
  const std::vector<Point> v = E.vertices();
  auto energy = [&](const std::vector<Point>& ring) {
    double w = 0.0;
    const Polygon p(ring, Polygon::Check::orientation_only);
    w = wetting_length(p);
    NeumaierSum s;
    s += detail::ring_perimeter(ring);
    s += -w;
    if (gamma > 0.0) s += gamma * pe.riesz_value(pe.pairs().total(ring));
    return s.value();
  };
  const double base = energy(v);
  const double tol = 1e-9 * std::abs(base);

  fc.bestDetachmentGain = -std::numeric_limits<double>::infinity();
  for (double frac : {0.01, 0.05, 0.1}) {
    std::vector<Point> main = v;
    const double s = std::sqrt(1.0 - frac);
    for (Point& p : main) p = s * p;
    const double detached = energy(main) + lens_upper_bound(frac * m, gamma, cfg);
    fc.bestDetachmentGain = std::max(fc.bestDetachmentGain, base - detached);
  }
  fc.improvingDetachment = fc.bestDetachmentGain > tol;

  fc.bestVertexGain = -std::numeric_limits<double>::infinity();
  const double delta = 1e-3 * std::sqrt(m);
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (const Point d : {Point{delta, 0.0}, Point{-delta, 0.0}, Point{0.0, delta}, Point{0.0, -delta}}) {
      std::vector<Point> ring = v;
      ring[i] = ring[i] + d;
      const double a = detail::ring_area(ring);
      if (!(a > 0.0)) continue;
      for (Point& p : ring) p.y *= m / a;
      try {
        const Polygon check(ring);
        fc.bestVertexGain = std::max(fc.bestVertexGain, base - energy(ring));
      } catch (const ValidationError&) {
      }
    }
  }
  fc.improvingVertexMove = fc.bestVertexGain > tol;
  return fc;
}

namespace detail {

inline std::vector<double> pack(const PinnedShape& s) {
  std::vector<double> th;
  th.reserve(1 + 2 * s.nodes());
  th.push_back(s.w);
  th.insert(th.end(), s.u.begin(), s.u.end());
  th.insert(th.end(), s.l.begin(), s.l.end());
  return th;
}

/// Energy gradient g and area gradient a in the packed coordinates
/// (w, u_1..u_K, l_1..l_K); also returns the second difference in w.
inline double gradients(const PinnedEnergy& pe, const PinnedShape& shape, const std::vector<Point>& verts,
                        const PinnedEnergy::Eval& cur, double h, std::vector<double>& g, std::vector<double>& a) {
  const std::size_t K = shape.nodes();
  const std::size_t N = verts.size();
  g.assign(1 + 2 * K, 0.0);
  a.assign(1 + 2 * K, 0.0);
  PinnedShape sp = shape, sm = shape;
  sp.w += h;
  sm.w -= h;
  const double ep = pe.evaluate(sp.vertices(), sp.w).total;
  const double em = pe.evaluate(sm.vertices(), sm.w).total;
  g[0] = (ep - em) / (2.0 * h);
  a[0] = ring_area(verts) / shape.w;
  const bool nonlocal = pe.gamma() > 0.0;
  parallel_for(2 * K, [&](std::size_t idx) {
    const std::size_t q = idx < K ? shape.upper_index(idx) : shape.lower_index(idx - K);
    std::array<std::size_t, 2> edges = {(q + N - 1) % N, q};
    std::sort(edges.begin(), edges.end());
    const double rOld = nonlocal ? pe.pairs().touching(verts, edges).value : 0.0;
    double e[2];
    for (int side = 0; side < 2; ++side) {
      std::vector<Point> vv = verts;
      vv[q].y += side == 0 ? h : -h;
      double total = ring_perimeter(vv) - 2.0 * shape.w;
      if (nonlocal) {
        RieszPairs::Sum s;
        s.value = cur.riesz.value - rOld + pe.pairs().touching(vv, edges).value;
        total += pe.gamma() * pe.riesz_value(s);
      }
      e[side] = total;
    }
    g[1 + idx] = (e[0] - e[1]) / (2.0 * h);
    a[1 + idx] = 0.5 * (verts[(q + N - 1) % N].x - verts[(q + 1) % N].x);
  });
  return (ep - 2.0 * cur.total + em) / (h * h);
}

/// Block-diagonal metric: perimeter Hessian of each chain, and the second
/// difference of the energy in w.
struct ChainMetric {
  std::vector<double> du, eu, dl, el;
  double hww = 1.0;

  ChainMetric(const PinnedShape& s, double secondW) {
    const std::vector<double> x = s.node_x();
    std::tie(du, eu) = chain_metric(s.w, x, s.u);
    std::tie(dl, el) = chain_metric(s.w, x, s.l);
    double mean = 0.0;
    for (double v : du) mean += v / static_cast<double>(du.size());
    hww = secondW > 1e-6 * mean ? secondW : mean;
  }

  std::vector<double> inverse(const std::vector<double>& r) const {
    const std::size_t K = du.size();
    const auto mid = r.begin() + 1 + static_cast<std::ptrdiff_t>(K);
    const std::vector<double> su = solve_tridiagonal(du, eu, std::vector<double>(r.begin() + 1, mid));
    const std::vector<double> sl = solve_tridiagonal(dl, el, std::vector<double>(mid, r.end()));
    std::vector<double> out;
    out.reserve(r.size());
    out.push_back(r[0] / hww);
    out.insert(out.end(), su.begin(), su.end());
    out.insert(out.end(), sl.begin(), sl.end());
    return out;
  }
};

inline double dotv(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

struct DescentOutcome {
  int iterations = 0;
  bool converged = false;
  std::string note;
};

/// Limited-memory quasi-Newton descent on the area-constrained pinned
/// energy. The initial inverse Hessian is the chain metric; directions are
/// projected (in that metric) onto the tangent space of the area constraint.
inline DescentOutcome descend(const PinnedEnergy& pe, PinnedShape& shape, double m, double h, double tol,
                              int patience, int maxIterations, std::vector<EnergyReport>* trace, double exponent) {
  const std::size_t K = shape.nodes();
  const double floorY = 1e-9 * std::sqrt(m);
  constexpr std::size_t memory = 8;
  std::vector<Point> verts = shape.vertices();
  PinnedEnergy::Eval cur = pe.evaluate(verts, shape.w);
  if (trace) trace->push_back(to_report(pe, cur, exponent));

  std::deque<std::vector<double>> S, Y;
  std::vector<double> prevTheta, prevGp;
  DescentOutcome out;
  int stalled = 0;
  for (int iter = 0; iter < maxIterations; ++iter) {
    std::vector<double> g, a;
    const double secondW = gradients(pe, shape, verts, cur, h, g, a);
    const ChainMetric M(shape, secondW);
    const std::vector<double> Ma = M.inverse(a);
    const double aMa = dotv(a, Ma);
    auto project = [&](std::vector<double>& d) {
      const double c = dotv(a, d) / aMa;
      for (std::size_t i = 0; i < d.size(); ++i) d[i] -= c * Ma[i];
    };
    std::vector<double> gp = g;
    {
      const double lambda = dotv(a, M.inverse(g)) / aMa;
      for (std::size_t i = 0; i < gp.size(); ++i) gp[i] -= lambda * a[i];
    }
    const std::vector<double> theta = pack(shape);
    if (!prevTheta.empty()) {
      std::vector<double> s(theta.size()), y(theta.size());
      for (std::size_t i = 0; i < s.size(); ++i) {
        s[i] = theta[i] - prevTheta[i];
        y[i] = gp[i] - prevGp[i];
      }
      if (dotv(s, y) > 1e-12 * std::sqrt(dotv(s, s) * dotv(y, y))) {
        S.push_back(std::move(s));
        Y.push_back(std::move(y));
        if (S.size() > memory) {
          S.pop_front();
          Y.pop_front();
        }
      }
    }
    // two-loop recursion
    std::vector<double> q = gp;
    std::vector<double> alpha(S.size());
    for (std::size_t k = S.size(); k-- > 0;) {
      alpha[k] = dotv(S[k], q) / dotv(Y[k], S[k]);
      for (std::size_t i = 0; i < q.size(); ++i) q[i] -= alpha[k] * Y[k][i];
    }
    std::vector<double> d = M.inverse(q);
    for (std::size_t k = 0; k < S.size(); ++k) {
      const double beta = dotv(Y[k], d) / dotv(Y[k], S[k]);
      for (std::size_t i = 0; i < d.size(); ++i) d[i] += S[k][i] * (alpha[k] - beta);
    }
    for (double& v : d) v = -v;
    project(d);
    double pred = -dotv(g, d);
    if (!(pred > 0.0)) {
      S.clear();
      Y.clear();
      d = M.inverse(gp);
      for (double& v : d) v = -v;
      project(d);
      pred = -dotv(g, d);
    }
    if (!(pred > tol * std::abs(cur.total))) {
      out.converged = true;
      break;
    }

    bool accepted = false;
    double t = 1.0;
    PinnedShape trial;
    PinnedEnergy::Eval next;
    for (int ls = 0; ls < 40; ++ls, t *= 0.5) {
      trial = shape;
      trial.w = std::max(shape.w + t * d[0], 1e-3 * shape.w);
      for (std::size_t j = 0; j < K; ++j) {
        trial.u[j] = std::max(shape.u[j] + t * d[1 + j], floorY);
        trial.l[j] = std::min(shape.l[j] + t * d[1 + K + j], -floorY);
      }
      restore_area(trial, m);
      next = pe.evaluate(trial.vertices(), trial.w);
      if (next.total <= cur.total - 1e-4 * t * pred) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // no decrease at the resolution of the finite differences
      out.converged = pred < 1e3 * tol * std::abs(cur.total);
      if (!out.converged) out.note = "line search failed";
      break;
    }
    const double decrease = (cur.total - next.total) / std::abs(next.total);
    prevTheta = theta;
    prevGp = gp;
    shape = std::move(trial);
    verts = shape.vertices();
    cur = next;
    ++out.iterations;
    if (trace) trace->push_back(to_report(pe, cur, exponent));
    stalled = decrease < tol ? stalled + 1 : 0;
    if (stalled >= patience) {
      out.converged = true;
      break;
    }
  }
  if (!out.converged && out.note.empty()) out.note = "iteration limit reached";
  return out;
}

/// Inscribed lens polygon, relaxed to the minimizer of the local functional
/// within the pinned family (the discrete lens).
inline PinnedShape discrete_lens(double m, std::size_t K, double h) {
  PinnedShape s = lens_start(m, K);
  const PinnedEnergy local(0.0, 1.0, 1e-10, 1);
  descend(local, s, m, h, 1e-14, 5, 500, nullptr, 0.0);
  return s;
}
}  // namespace detail

/// Descent for min F_gamma(E), |E| = m, over pinned graph pairs starting
/// from the discrete lens. Central finite-difference gradients, quasi-Newton
/// directions tangent to the area constraint, area restored after each step
/// by vertical scaling, backtracking on the total energy.
inline OptResult optimize(double m, double gamma, const RieszConfig& cfg = {}, const OptimizerConfig& opt = {}) {
  cfg.validate();
  if (!(m > 0.0 && m <= 1.0)) throw DomainError("optimize requires 0 < m <= 1");
  if (!(gamma >= 0.0)) throw DomainError("gamma must be nonnegative");
  if (opt.nodes < 4) throw DomainError("optimizer needs at least 4 nodes per arc");
  const auto K = static_cast<std::size_t>(opt.nodes);
  const double h = opt.fdStep * std::sqrt(m);
  const detail::PinnedEnergy pe(gamma, cfg.exponent, opt.pairTol, cfg.maxDepth);

  detail::PinnedShape shape = detail::discrete_lens(m, K, h);
  OptResult res;
  const detail::DescentOutcome o =
      detail::descend(pe, shape, m, h, opt.tol, opt.patience, opt.maxIterations, &res.energyTrace, cfg.exponent);
  res.iterations = o.iterations;
  res.converged = o.converged;
  res.note = o.note;
  res.finalShape = Polygon(shape.vertices());
  const Polygon unit = lens_polygon(LensSpec::from_mass(1.0), opt.referenceSamples);
  res.rescaledAsymmetry = symmetric_difference_area(scaled(res.finalShape, 1.0 / std::sqrt(m)), unit);
  if (opt.freeCheck) res.freeCheck = free_polygon_check(res.finalShape, m, gamma, cfg, opt.pairTol);
  return res;
}

struct SweepRow {
  double m = 0.0;
  double gamma = 0.0;
  double exponent = 0.0;
  EnergyReport energy;
  double rescaledAsymmetry = 0.0;
  double energyGap = 0.0;  // lens_upper_bound - energy
  bool converged = false;
  bool failed = false;
  std::string note;
};

/// optimize() for each mass (decreasing, at most 1). Failures are reported
/// per row rather than thrown.
inline std::vector<SweepRow> small_mass_sweep(const std::vector<double>& ms, double gamma, const RieszConfig& cfg = {},
                                              const OptimizerConfig& opt = {}) {
  if (ms.empty()) throw DomainError("sweep needs at least one mass");
  if (ms.front() > 1.0) throw DomainError("masses must not exceed 1");
  for (std::size_t i = 0; i + 1 < ms.size(); ++i) {
    if (!(ms[i + 1] < ms[i])) throw DomainError("masses must decrease");
  }
  std::vector<SweepRow> rows(ms.size());
  parallel_for(ms.size(), [&](std::size_t i) {
    SweepRow r;
    r.m = ms[i];
    r.gamma = gamma;
    r.exponent = cfg.exponent;
    try {
      const OptResult o = optimize(ms[i], gamma, cfg, opt);
      r.energy = o.energyTrace.back();
      r.rescaledAsymmetry = o.rescaledAsymmetry;
      r.energyGap = lens_upper_bound(ms[i], gamma, cfg) - r.energy.total;
      r.converged = o.converged;
      r.note = o.note;
    } catch (const Error& e) {
      r.failed = true;
      r.note = e.what();
    }
    rows[i] = r;
  });
  return rows;
}

}  // namespace lenslab
