#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lenslab/errors.hpp"
#include "lenslab/geometry.hpp"
#include "lenslab/graphs.hpp"
#include "lenslab/numerics.hpp"
#include "lenslab/partitions.hpp"

namespace lenslab {

enum class PerturbationKind { randomC1, sawtooth, strip, dilation };

inline std::string to_string(PerturbationKind k) {
  switch (k) {
    case PerturbationKind::randomC1: return "randomC1";
    case PerturbationKind::sawtooth: return "sawtooth";
    case PerturbationKind::strip: return "strip";
    case PerturbationKind::dilation: return "dilation";
  }
  return "unknown";
}

inline PerturbationKind parse_kind(const std::string& s) {
  if (s == "randomC1" || s == "random" || s == "random-c1") return PerturbationKind::randomC1;
  if (s == "sawtooth") return PerturbationKind::sawtooth;
  if (s == "strip") return PerturbationKind::strip;
  if (s == "dilation") return PerturbationKind::dilation;
  throw ValidationError("unknown perturbation kind '" + s + "'");
}

struct PerturbationSpec {
  PerturbationKind kind = PerturbationKind::randomC1;
  double eps0 = 0.05;
  int modes = 6;
  std::uint64_t seed = 0;
  double s = 1.0;
  double t = 0.1;
  std::optional<double> center;
  double stripLength = 5.0;
  double sigma = 0.0;
  std::size_t samples = 4096;

  void validate() const {
    if (!(eps0 > 0.0 && eps0 < 1.0)) throw ValidationError("eps0 must lie in (0, 1)");
    if (modes < 1) throw ValidationError("modes must be at least 1");
    if (samples < 8) throw ValidationError("samples must be at least 8");
    if (kind == PerturbationKind::sawtooth && !(s > 0.0 && t >= 0.0)) {
      throw ValidationError("sawtooth needs s > 0 and t >= 0");
    }
    if (kind == PerturbationKind::strip && !(stripLength > 0.0)) throw ValidationError("strip length must be positive");
  }
};

inline constexpr const char* kPerturbSchema = "perturb/1";

inline nlohmann::json to_json(const PerturbationSpec& p) {
  nlohmann::json j = {{"schema", kPerturbSchema}, {"kind", to_string(p.kind)}, {"eps0", p.eps0},
                      {"modes", p.modes},          {"seed", p.seed},            {"s", p.s},
                      {"t", p.t},                  {"stripLength", p.stripLength}, {"sigma", p.sigma},
                      {"samples", p.samples}};
  if (p.center) j["center"] = *p.center;
  return j;
}

inline PerturbationSpec perturbation_from_json(const nlohmann::json& j) {
  if (j.contains("schema") && j.at("schema") != kPerturbSchema) throw ValidationError("expected schema perturb/1");
  PerturbationSpec p;
  if (j.contains("kind")) p.kind = parse_kind(j.at("kind").get<std::string>());
  p.eps0 = j.value("eps0", p.eps0);
  p.modes = j.value("modes", p.modes);
  p.seed = j.value("seed", p.seed);
  p.s = j.value("s", p.s);
  p.t = j.value("t", p.t);
  if (j.contains("center")) p.center = j.at("center").get<double>();
  p.stripLength = j.value("stripLength", p.stripLength);
  p.sigma = j.value("sigma", p.sigma);
  p.samples = j.value("samples", p.samples);
  p.validate();
  return p;
}

/// Discrete C^1 norm: sup |f| + sup |slope| over the samples.
inline double c1_norm(const std::vector<Point>& f) {
  double v = 0.0, d = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    v = std::max(v, std::abs(f[k].y));
    if (k + 1 < f.size()) d = std::max(d, std::abs((f[k + 1].y - f[k].y) / (f[k + 1].x - f[k].x)));
  }
  return v + d;
}

inline double c1_norm(const std::vector<double>& f, double h) {
  double v = 0.0, d = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    v = std::max(v, std::abs(f[k]));
    if (k + 1 < f.size()) d = std::max(d, std::abs(f[k + 1] - f[k]) / h);
  }
  return v + d;
}

/// Norms ||g0||, ||g1 - u1~||, ||g2 - u2~|| of a triple.
struct TripleNorms {
  double g0 = 0.0;
  double g1 = 0.0;
  double g2 = 0.0;
  double total() const { return g0 + g1 + g2; }
};

inline TripleNorms triple_norms(const GraphTriple& g) {
  TripleNorms n;
  n.g0 = std::max(c1_norm(g.g0Left), c1_norm(g.g0Right));
  std::vector<double> d1(g.x.size()), d2(g.x.size());
  for (std::size_t k = 0; k < d1.size(); ++k) {
    d1[k] = g.g1[k] - g.utilde(1, k);
    d2[k] = g.g2[k] - g.utilde(2, k);
  }
  n.g1 = c1_norm(d1, g.step());
  n.g2 = c1_norm(d2, g.step());
  return n;
}

/// Dilated lens triple (g0 = 0, g_i = u_i~). Not area-admissible unless
/// sigma = 0.
inline GraphTriple dilation_family(double sigma, const LensSpec& lens, double windowRadius, std::size_t n = 4096) {
  return lens_triple(lens, windowRadius, n, sigma);
}

namespace detail {
inline double sine_series(const std::vector<double>& c, double xi) {
  double s = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) s += c[k] * std::sin(static_cast<double>(k + 1) * constants::pi * xi);
  return s;
}
}  // namespace detail

/// Random lens-type competitor with discrete C^1 size controlled by eps0.
///
/// g0 on each side is yJ cos^2(pi xi / 2) + sum_k c_k sin(k pi xi) sin(pi xi)
/// with xi the normalized distance from the junction to supportRadius; the
/// arcs get yJ-matching end terms plus sum_k d_k sin(k pi eta). Coefficients
/// decay like 1/k^2. The whole perturbation, including sigma, is scaled by a
/// common factor chosen by bisection so that each norm stays <= eps0 and
/// their sum <= 2 eps0 after area projection.
inline GraphTriple random_c1(const PerturbationSpec& spec, const LensSpec& lens, double windowRadius,
                             std::optional<double> supportRadius = std::nullopt) {
  spec.validate();
  if (spec.eps0 > 0.1) throw DomainError("random_c1 requires eps0 <= 0.1");
  const double S = supportRadius.value_or(windowRadius - 0.5);
  const double a0 = lens.halfWidth;
  if (!(S > 1.5 * a0 + 0.1) || !(S < windowRadius)) throw DomainError("support radius incompatible with window");

  Rng rng(spec.seed);
  const auto modes = static_cast<std::size_t>(spec.modes);
  auto coeffs = [&] {
    std::vector<double> c(modes);
    for (std::size_t k = 0; k < modes; ++k) {
      const double kk = static_cast<double>(k + 1);
      c[k] = rng.uniform(-1.0, 1.0) / (kk * kk);
    }
    return c;
  };
  const double sigma0 = rng.uniform(-1.0, 1.0);
  const double yL = rng.uniform(-1.0, 1.0);
  const double yR = rng.uniform(-1.0, 1.0);
  const std::vector<double> cL = coeffs();
  const std::vector<double> cR = coeffs();
  const std::vector<double> d1 = coeffs();
  const std::vector<double> d2 = coeffs();

  const std::size_t n = spec.samples;
  std::vector<double> arcEnds(n + 1), arcSeries1(n + 1), arcSeries2(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    const double eta = static_cast<double>(k) / static_cast<double>(n);
    const double cl = std::cos(0.5 * constants::pi * eta);
    const double sr = std::sin(0.5 * constants::pi * eta);
    arcEnds[k] = yL * cl * cl + yR * sr * sr;
    arcSeries1[k] = detail::sine_series(d1, eta);
    arcSeries2[k] = detail::sine_series(d2, eta);
  }

  auto build = [&](double lambda) {
    const double sigma = lambda * spec.eps0 * sigma0;
    GraphTriple g = lens_triple(lens, windowRadius, spec.samples, sigma);
    const double a = g.junction();
    const double amp = lambda * spec.eps0;
    auto g0 = [&](double dist, double yJ, const std::vector<double>& c) {
      const double xi = dist / (S - a);
      if (xi >= 1.0) return 0.0;
      const double cj = std::cos(0.5 * constants::pi * xi);
      return amp * (yJ * cj * cj + detail::sine_series(c, xi) * std::sin(constants::pi * xi));
    };
    for (Point& p : g.g0Left) p.y = g0(-p.x - a, yL, cL);
    for (Point& p : g.g0Right) p.y = g0(p.x - a, yR, cR);
    g.g0Left.front().y = 0.0;
    g.g0Right.back().y = 0.0;
    for (std::size_t k = 0; k <= n; ++k) {
      g.g1[k] += amp * (arcEnds[k] + arcSeries1[k]);
      g.g2[k] += amp * (arcEnds[k] + arcSeries2[k]);
    }
    g.g1.front() = g.g2.front() = g.g0Left.back().y = amp * yL;
    g.g1.back() = g.g2.back() = g.g0Right.front().y = amp * yR;
    return project_area(std::move(g), lens.mass);
  };
  auto feasible = [&](const GraphTriple& g) {
    const TripleNorms nm = triple_norms(g);
    return nm.g0 <= spec.eps0 && nm.g1 <= spec.eps0 && nm.g2 <= spec.eps0 && nm.total() <= 2.0 * spec.eps0;
  };

  // Largest scale with all norm bounds satisfied; the norms are increasing
  // in lambda for the range that matters, so bisection is enough.
  double lo = 0.0, hi = 1.0;
  std::optional<GraphTriple> best;
  try {
    GraphTriple g = build(hi);
    if (feasible(g)) best = std::move(g);
  } catch (const ProjectionError&) {
  }
  if (!best) {
    for (int it = 0; it < 24; ++it) {
      const double mid = 0.5 * (lo + hi);
      bool ok = false;
      try {
        GraphTriple g = build(mid);
        ok = feasible(g);
        if (ok) best = std::move(g);
      } catch (const ProjectionError&) {
      }
      (ok ? lo : hi) = mid;
    }
  }
  if (!best) best = build(0.0);
  best->validate();
  return *best;
}

/// Lens triple with one triangular tooth of base s and height t on the right
/// interface, centered at `center` (default: halfWidth + s/2 + 0.5).
inline GraphTriple sawtooth(double s, double t, std::optional<double> center, const LensSpec& lens,
                            double windowRadius, std::size_t n = 4096) {
  if (!(s > 0.0) || !(t >= 0.0)) throw DomainError("sawtooth needs s > 0 and t >= 0");
  if (!(t < s)) throw DomainError("sawtooth needs t < s");
  const double c = center.value_or(lens.halfWidth + 0.5 * s + 0.5);
  const double lo = c - 0.5 * s;
  const double hi = c + 0.5 * s;
  if (!(lo > lens.halfWidth)) throw DomainError("tooth overlaps the lens vertices");
  if (!(hi < windowRadius)) throw DomainError("tooth leaves the window");
  GraphTriple g = lens_triple(lens, windowRadius, n);
  std::vector<Point> right;
  right.reserve(g.g0Right.size() + 3);
  bool placed = false;
  for (const Point& p : g.g0Right) {
    if (p.x >= lo && p.x <= hi) {
      if (!placed) {
        right.push_back({lo, 0.0});
        right.push_back({c, t});
        right.push_back({hi, 0.0});
        placed = true;
      }
      continue;
    }
    if (!placed && p.x > hi) {
      right.push_back({lo, 0.0});
      right.push_back({c, t});
      right.push_back({hi, 0.0});
      placed = true;
    }
    right.push_back(p);
  }
  g.g0Right = std::move(right);
  return g;
}

/// Strip competitor: the right interface is lifted to height 1 over a
/// segment of length R_s, joined by two unit vertical connectors.
inline LensTypePartition strip_translation(double stripLength, const LensSpec& lens, double windowRadius,
                                           std::size_t n = 4096) {
  if (!(stripLength > 0.0)) throw DomainError("strip length must be positive");
  const double x0 = lens.halfWidth + 1.0;
  if (!(x0 + stripLength + 0.5 < windowRadius) || !(windowRadius > 1.5)) {
    throw DomainError("strip does not fit in the window");
  }
  const LensTypePartition base = lens_partition(lens, windowRadius, n);
  const Point j = base.interfaceRight().front();
  std::vector<Point> right = {j, {x0, 0.0}, {x0, 1.0}, {x0 + stripLength, 1.0}, {x0 + stripLength, 0.0},
                              {windowRadius, 0.0}};
  return LensTypePartition(base.interfaceLeft(), base.lowerArc(), base.upperArc(), Polyline(std::move(right)),
                           windowRadius);
}

/// Competitor described by spec. Random and dilation triples are area
/// projected; sawtooth and strip leave the chamber untouched.
inline LensTypePartition make_competitor(const PerturbationSpec& spec, const LensSpec& lens, double windowRadius) {
  spec.validate();
  switch (spec.kind) {
    case PerturbationKind::randomC1: return from_graphs(random_c1(spec, lens, windowRadius));
    case PerturbationKind::sawtooth:
      return from_graphs(sawtooth(spec.s, spec.t, spec.center, lens, windowRadius, spec.samples));
    case PerturbationKind::strip: return strip_translation(spec.stripLength, lens, windowRadius, spec.samples);
    case PerturbationKind::dilation:
      return from_graphs(project_area(dilation_family(spec.sigma, lens, windowRadius, spec.samples), lens.mass));
  }
  throw ValidationError("unknown perturbation kind");
}

}  // namespace lenslab
