#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "lenslab/errors.hpp"
#include "lenslab/geometry.hpp"
#include "lenslab/graphs.hpp"
#include "lenslab/numerics.hpp"
#include "lenslab/partitions.hpp"
#include "lenslab/perturb.hpp"

namespace lenslab {

/// 2^{-5/2}
inline const double kG0Constant = 1.0 / std::pow(2.0, 2.5);
/// 1 / (2 * 5^{3/2})
inline const double kGraphConstant = 1.0 / (2.0 * std::pow(5.0, 1.5));

struct FugledeTerms {
  double g0Term = 0.0;
  double graphTerms = 0.0;
  double sigmaTerm = 0.0;
  double total = 0.0;
};

/// Quadratic lower bound on the deficit of a graph competitor. Slopes are
/// the chord slopes of the samples, so the integrals of squared slopes are
/// exact for the piecewise-linear interpolants. The dilation term is
/// (m / r) sigma^2 / (1 + sigma), which reduces to m sigma^2 / (1 + sigma)
/// for the unit-radius lens.
inline FugledeTerms fuglede_lower_bound(const GraphTriple& g, const LensSpec& lens) {
  const double tol = 1e-12;
  NeumaierSum s0;
  for (const auto* side : {&g.g0Left, &g.g0Right}) {
    for (std::size_t k = 0; k + 1 < side->size(); ++k) {
      const double dx = (*side)[k + 1].x - (*side)[k].x;
      const double slope = ((*side)[k + 1].y - (*side)[k].y) / dx;
      if (std::abs(slope) > 1.0 + tol) throw PreconditionError("|g0'| exceeds 1");
      s0 += slope * slope * dx;
    }
  }
  NeumaierSum s1;
  const double h = g.step();
  for (int i = 1; i <= 2; ++i) {
    const auto& gi = i == 1 ? g.g1 : g.g2;
    for (std::size_t k = 0; k < g.intervals(); ++k) {
      const double t = (gi[k + 1] - gi[k]) / h;
      const double u = (g.utilde(i, k + 1) - g.utilde(i, k)) / h;
      if (std::abs(t) > 2.0 + tol) throw PreconditionError("|g_i'| exceeds 2");
      if (std::abs(u) > constants::sqrt3 + tol) throw PreconditionError("|u_i'| exceeds sqrt(3)");
      s1 += (t - u) * (t - u) * h;
    }
  }
  FugledeTerms f;
  f.g0Term = kG0Constant * s0.value();
  f.graphTerms = kGraphConstant * s1.value();
  f.sigmaTerm = (lens.mass / lens.radius) * g.sigma * g.sigma / (1.0 + g.sigma);
  f.total = f.g0Term + f.graphTerms + f.sigmaTerm;
  return f;
}

struct AsymmetryBound {
  double linear = 0.0;        // int|g0| + sum int|g_i - u_i~| + |sigma|(sigma + 2) m
  double sumSquares = 0.0;    // sum_i int (g~_i - u~_i)^2 + sigma^2 m^2
  double constant = 0.0;      // C' in asymmetry^2 <= C' * sumSquares
  double squared = 0.0;       // C' * sumSquares
};

namespace detail {
/// Exact integral of |f| for f linear between (x0, f0) and (x1, f1).
inline double abs_linear(double dx, double f0, double f1) {
  if ((f0 >= 0.0 && f1 >= 0.0) || (f0 <= 0.0 && f1 <= 0.0)) return 0.5 * dx * std::abs(f0 + f1);
  return 0.5 * dx * (f0 * f0 + f1 * f1) / (std::abs(f0) + std::abs(f1));
}

inline double square_linear(double dx, double f0, double f1) { return dx * (f0 * f0 + f0 * f1 + f1 * f1) / 3.0; }
}  // namespace detail

/// Upper bounds on the asymmetry of a graph competitor. The squared form
/// follows from Cauchy-Schwarz with weights (L, L, (2 + |sigma|)^2), L the
/// length of the interval carrying the perturbation (at least 2(R + 1)).
inline AsymmetryBound asymmetry_upper_bound(const GraphTriple& g, const LensSpec& lens, double R) {
  NeumaierSum lin0, sq0, lin12, sq12;
  double extent = 0.0;
  for (const auto* side : {&g.g0Left, &g.g0Right}) {
    for (std::size_t k = 0; k + 1 < side->size(); ++k) {
      const Point a = (*side)[k];
      const Point b = (*side)[k + 1];
      lin0 += detail::abs_linear(b.x - a.x, a.y, b.y);
      sq0 += detail::square_linear(b.x - a.x, a.y, b.y);
      if (a.y != 0.0 || b.y != 0.0) extent = std::max({extent, std::abs(a.x), std::abs(b.x)});
    }
  }
  const double h = g.step();
  for (int i = 1; i <= 2; ++i) {
    const auto& gi = i == 1 ? g.g1 : g.g2;
    for (std::size_t k = 0; k < g.intervals(); ++k) {
      const double f0 = gi[k] - g.utilde(i, k);
      const double f1 = gi[k + 1] - g.utilde(i, k + 1);
      lin12 += detail::abs_linear(h, f0, f1);
      sq12 += detail::square_linear(h, f0, f1);
    }
  }
  const double m = lens.mass;
  const double sig = std::abs(g.sigma);
  AsymmetryBound b;
  b.linear = lin0.value() + lin12.value() + sig * (g.sigma + 2.0) * m;
  // g~_i equals g0 outside I_sigma for both i, hence the factor 2.
  b.sumSquares = 2.0 * sq0.value() + sq12.value() + g.sigma * g.sigma * m * m;
  const double L = std::max(2.0 * (R + 1.0), 2.0 * extent);
  b.constant = 2.0 * L + (2.0 + sig) * (2.0 + sig);
  b.squared = b.constant * b.sumSquares;
  return b;
}

struct ElementaryMargins {
  double first = std::numeric_limits<double>::infinity();   // min over |t| <= 1
  double firstAt = 0.0;
  double second = std::numeric_limits<double>::infinity();  // min over |s|, |t| <= 2
  double secondAtS = 0.0;
  double secondAtT = 0.0;
  std::size_t points = 0;
};

/// sqrt(1 + t^2) - 1 - t^2 / 2^{5/2}
inline double first_margin(double t) { return t * t / (std::sqrt(1.0 + t * t) + 1.0) - kG0Constant * t * t; }

/// sqrt(1 + t^2) - sqrt(1 + s^2) - s (t - s) / sqrt(1 + s^2) - (t - s)^2 / (2 5^{3/2}),
/// rearranged to avoid cancellation.
inline double second_margin(double s, double t) {
  const double d = t - s;
  if (d == 0.0) return 0.0;
  const double A = std::sqrt(1.0 + t * t);
  const double B = std::sqrt(1.0 + s * s);
  if (t * s > 0.0) {
    // t B - s A = d (t + s) / (t B + s A)
    const double q = (t + s) / (t * B + s * A);
    return d * d * (q / (B * (A + B)) - kGraphConstant);
  }
  return d * (t * B - s * A) / (B * (A + B)) - kGraphConstant * d * d;
}

/// Grid scan of both elementary inequalities with the given step.
inline ElementaryMargins check_elementary_inequalities(double step = 1e-3) {
  if (!(step > 0.0) || step > 1e-3) throw DomainError("grid step must lie in (0, 1e-3]");
  ElementaryMargins r;
  const auto n1 = static_cast<long>(std::floor(1.0 / step + 1e-9));
  for (long i = -n1; i <= n1; ++i) {
    const double t = static_cast<double>(i) * step;
    const double v = first_margin(t);
    ++r.points;
    if (v < r.first) {
      r.first = v;
      r.firstAt = t;
    }
  }
  const auto n2 = static_cast<long>(std::floor(2.0 / step + 1e-9));
  for (long i = -n2; i <= n2; ++i) {
    const double s = static_cast<double>(i) * step;
    for (long j = -n2; j <= n2; ++j) {
      const double t = static_cast<double>(j) * step;
      const double v = second_margin(s, t);
      ++r.points;
      if (v < r.second) {
        r.second = v;
        r.secondAtS = s;
        r.secondAtT = t;
      }
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Ensembles

struct EnsembleConfig {
  double mass = unit_lens_area;
  double windowRadius = 10.0;
  std::size_t randomCount = 500;
  double eps0 = 0.05;
  int modes = 6;
  std::uint64_t seed = 7;
  std::size_t samples = 4096;
  double sawtoothBase = 1.0;
  std::vector<double> sawtoothHeights;
  std::vector<double> dilations;
  std::vector<double> stripLengths;
  bool computeAsymmetry = true;
  SearchConfig search;
};

struct MemberResult {
  PerturbationSpec spec;
  StabilityRecord record;
  std::optional<FugledeTerms> fuglede;
  bool valid = true;
  bool excluded = false;
  std::string note;
};

struct KappaReport {
  std::size_t ensembleSize = 0;
  std::size_t excluded = 0;
  double minRatio = 0.0;
  double medianRatio = 0.0;
  PerturbationSpec argminSpec;
  std::string argminId;
  double windowRadius = 0.0;
  double minDeficit = 0.0;
  std::vector<MemberResult> members;
};

inline constexpr double kExcludedAsymmetry = 1e-8;

inline std::string member_id(const PerturbationSpec& p) {
  char buf[96];
  switch (p.kind) {
    case PerturbationKind::randomC1:
      std::snprintf(buf, sizeof buf, "random-%llu", static_cast<unsigned long long>(p.seed));
      break;
    case PerturbationKind::sawtooth: std::snprintf(buf, sizeof buf, "sawtooth-s%.6g-t%.6g", p.s, p.t); break;
    case PerturbationKind::strip: std::snprintf(buf, sizeof buf, "strip-%.6g", p.stripLength); break;
    case PerturbationKind::dilation: std::snprintf(buf, sizeof buf, "dilation-%.6g", p.sigma); break;
  }
  return buf;
}

/// Members of an ensemble in a fixed order: random (seeds seed .. seed+N-1),
/// sawtooth, dilation, strip.
inline std::vector<PerturbationSpec> ensemble_members(const EnsembleConfig& cfg) {
  std::vector<PerturbationSpec> out;
  for (std::size_t i = 0; i < cfg.randomCount; ++i) {
    PerturbationSpec p;
    p.kind = PerturbationKind::randomC1;
    p.eps0 = cfg.eps0;
    p.modes = cfg.modes;
    p.seed = cfg.seed + i;
    p.samples = cfg.samples;
    out.push_back(p);
  }
  for (double t : cfg.sawtoothHeights) {
    PerturbationSpec p;
    p.kind = PerturbationKind::sawtooth;
    p.s = cfg.sawtoothBase;
    p.t = t;
    p.samples = cfg.samples;
    out.push_back(p);
  }
  for (double s : cfg.dilations) {
    PerturbationSpec p;
    p.kind = PerturbationKind::dilation;
    p.sigma = s;
    p.samples = cfg.samples;
    out.push_back(p);
  }
  for (double L : cfg.stripLengths) {
    PerturbationSpec p;
    p.kind = PerturbationKind::strip;
    p.stripLength = L;
    p.samples = cfg.samples;
    out.push_back(p);
  }
  return out;
}

/// Deficit, asymmetry and (for graph competitors) the quadratic bound of one
/// member.
inline MemberResult evaluate_member(const PerturbationSpec& spec, const LensSpec& lens, double windowRadius,
                                    bool computeAsymmetry, SearchConfig search) {
  MemberResult r;
  r.spec = spec;
  const LensTypePartition p = make_competitor(spec, lens, windowRadius);
  const Admissibility adm = is_admissible(p, lens, windowRadius);
  if (!adm) {
    r.valid = false;
    r.note = adm.violations.front();
  }
  const double sigma = p.graphs() ? p.graphs()->sigma : 0.0;
  const double d = deficit(p, lens);
  std::optional<double> bound;
  if (p.graphs()) {
    try {
      r.fuglede = fuglede_lower_bound(*p.graphs(), lens);
      bound = r.fuglede->total;
    } catch (const PreconditionError& e) {
      r.note = e.what();
    }
  }
  double a = 0.0;
  if (computeAsymmetry) {
    search.seed = spec.seed;
    a = asymmetry(p, lens, search);
  }
  r.record = make_record(member_id(spec), sigma, d, a, bound);
  r.excluded = computeAsymmetry && a < kExcludedAsymmetry;
  return r;
}

/// Empirical estimate of the stability constant: min and median of
/// deficit / asymmetry^2 over the ensemble. The random part, if present,
/// must have at least 100 members. Without asymmetry only deficits (and
/// the quadratic bounds) are filled in; the ratio fields stay NaN.
inline KappaReport estimate_kappa(const EnsembleConfig& cfg) {
  if (cfg.randomCount != 0 && cfg.randomCount < 100) {
    throw DomainError("a random ensemble needs at least 100 members");
  }
  const LensSpec lens = LensSpec::from_mass(cfg.mass);
  const std::vector<PerturbationSpec> specs = ensemble_members(cfg);
  KappaReport rep;
  rep.ensembleSize = specs.size();
  rep.windowRadius = cfg.windowRadius;
  rep.members.resize(specs.size());
  parallel_for(specs.size(), [&](std::size_t i) {
    rep.members[i] = evaluate_member(specs[i], lens, cfg.windowRadius, cfg.computeAsymmetry, cfg.search);
  });
  std::vector<double> ratios;
  const MemberResult* argmin = nullptr;
  rep.minDeficit = std::numeric_limits<double>::infinity();
  for (const MemberResult& m : rep.members) rep.minDeficit = std::min(rep.minDeficit, m.record.deficit);
  if (!cfg.computeAsymmetry) {
    rep.minRatio = rep.medianRatio = std::numeric_limits<double>::quiet_NaN();
    return rep;
  }
  for (const MemberResult& m : rep.members) {
    if (m.excluded || !m.record.ratio) {
      ++rep.excluded;
      continue;
    }
    ratios.push_back(*m.record.ratio);
    if (!argmin || *m.record.ratio < *argmin->record.ratio ||
        (*m.record.ratio == *argmin->record.ratio && m.record.id < argmin->record.id)) {
      argmin = &m;
    }
  }
  if (ratios.empty()) throw EmptyEnsembleError("every ensemble member was excluded");
  rep.minRatio = *argmin->record.ratio;
  rep.medianRatio = median(ratios);
  rep.argminSpec = argmin->spec;
  rep.argminId = argmin->record.id;
  return rep;
}

struct SharpnessRow {
  double t = 0.0;
  double deficit = 0.0;
  double asymmetry = 0.0;
  double ratio = 0.0;
  double closedFormRatio = 0.0;
};

/// deficit / asymmetry^2 on the sawtooth family with base s; the closed form
/// is (2 sqrt(s^2/4 + t^2) - s) / (s t / 2)^2, with limit 8 / s^3.
inline double sawtooth_ratio(double s, double t) {
  const double d = 4.0 * t * t / (std::sqrt(s * s + 4.0 * t * t) + s);
  const double a = 0.5 * s * t;
  return d / (a * a);
}

inline std::vector<SharpnessRow> sharpness_sweep(double s, const std::vector<double>& ts, const LensSpec& lens,
                                                 double windowRadius, std::size_t n = 4096,
                                                 const SearchConfig& search = {}) {
  if (ts.empty()) throw DomainError("sharpness sweep needs heights");
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    if (!(ts[i + 1] < ts[i])) throw DomainError("heights must decrease");
  }
  if (ts.back() > 1e-3) throw DomainError("smallest height must be at most 1e-3");
  std::vector<SharpnessRow> rows(ts.size());
  parallel_for(ts.size(), [&](std::size_t i) {
    const double t = ts[i];
    const LensTypePartition p = from_graphs(sawtooth(s, t, std::nullopt, lens, windowRadius, n));
    SharpnessRow r;
    r.t = t;
    r.deficit = deficit(p, lens);
    r.asymmetry = asymmetry(p, lens, search);
    r.ratio = r.deficit / (r.asymmetry * r.asymmetry);
    r.closedFormRatio = sawtooth_ratio(s, t);
    rows[i] = r;
  });
  return rows;
}

}  // namespace lenslab
