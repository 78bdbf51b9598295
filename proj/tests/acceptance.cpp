// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Regression fixtures live in fixtures.hpp.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "lenslab/lenslab.hpp"

using namespace lenslab;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double budgetSeconds;
  std::function<Verdict()> body;
};

std::string fmt(const char* f, double a) {
  char b[128];
  std::snprintf(b, sizeof b, f, a);
  return b;
}

void check(Verdict& v, bool ok, const std::string& what) {
  if (!ok) {
    v.pass = false;
    v.detail += "[fail] ";
  }
  v.detail += what + "; ";
}

Verdict lens_geometry() {
  Verdict v;
  for (double m : {1.0, unit_lens_area, 0.05}) {
    const LensSpec lens = LensSpec::from_mass(m);
    const std::size_t n = 10000;
    const Polygon p = lens_polygon(lens, n);
    const double areaErr = std::abs(polygon_area(p) - m);
    auto [upper, lower] = lens_boundary(lens, n);
    const double arc = 2.0 * constants::pi / 3.0 * lens.radius;
    const double lenErr = std::max(std::abs(polyline_length(upper) - arc), std::abs(polyline_length(lower) - arc));
    double angErr = 0.0;
    const double target = 2.0 * constants::pi / 3.0;
    angErr = std::max(angErr, std::abs(std::abs(meeting_angle(upper, lens.p2)) - target));
    angErr = std::max(angErr, std::abs(std::abs(meeting_angle(lower, lens.p2)) - target));
    angErr = std::max(angErr, std::abs(std::abs(meeting_angle(upper, lens.p1)) - constants::pi / 3.0));
    angErr = std::max(angErr, std::abs(std::abs(meeting_angle(lower, lens.p1)) - constants::pi / 3.0));
    check(v, areaErr <= 1e-6 * m, "m=" + fmt("%g", m) + " area err " + fmt("%.2e", areaErr));
    check(v, lenErr <= 1e-6, "arc err " + fmt("%.2e", lenErr));
    check(v, angErr <= 1e-3, "angle err " + fmt("%.2e", angErr));
  }
  return v;
}

Verdict mu0_check() {
  Verdict v;
  const EnergyReport e = f_gamma(lens_polygon(LensSpec::from_mass(1.0), 10000), 0.0);
  const double err = std::abs(e.total - fixtures::kMu0);
  check(v, err <= 1e-4, "F0(L1) = " + fmt("%.9f", e.total) + ", err " + fmt("%.2e", err));
  return v;
}

Verdict strip_check() {
  Verdict v;
  const LensSpec lens = LensSpec::from_radius(1.0);
  for (double Rs : {1.0, 2.0, 5.0}) {
    const LensTypePartition p = strip_translation(Rs, lens, 10.0);
    const double d = deficit(p, lens);
    const double a = asymmetry(p, lens);
    check(v, std::abs(d - 2.0) <= 1e-12, "Rs=" + fmt("%g", Rs) + " deficit err " + fmt("%.1e", std::abs(d - 2.0)));
    check(v, std::abs(a - Rs) <= 1e-3, "asym " + fmt("%.6f", a) + " ratio " + fmt("%.4f", d / (a * a)));
  }
  return v;
}

Verdict sharpness_check() {
  Verdict v;
  const LensSpec lens = LensSpec::from_radius(1.0);
  for (double s : {1.0, 2.0}) {
    const auto rows = sharpness_sweep(s, {0.1, 0.01, 1e-3}, lens, 10.0);
    const double limit = 8.0 / (s * s * s);
    const double rel = std::abs(rows.back().ratio - limit) / limit;
    check(v, rel <= 1e-3, "s=" + fmt("%g", s) + " ratio(1e-3) " + fmt("%.6f", rows.back().ratio) + " rel err " +
                               fmt("%.1e", rel));
  }
  return v;
}

KappaReport ensemble(bool withAsymmetry) {
  EnsembleConfig cfg;
  cfg.computeAsymmetry = withAsymmetry;
  if (withAsymmetry) {
    cfg.sawtoothHeights = {0.1, 0.05, 0.01, 0.005, 0.001};
    cfg.dilations = {-0.05, -0.02, 0.02, 0.05};
  }
  return estimate_kappa(cfg);
}

Verdict fuglede_check() {
  Verdict v;
  const KappaReport rep = ensemble(false);
  std::size_t checked = 0, holds = 0;
  double minMargin = 1e300;
  for (const MemberResult& m : rep.members) {
    if (m.spec.kind != PerturbationKind::randomC1) continue;
    ++checked;
    if (!m.fuglede) continue;
    const double margin = m.record.deficit - m.fuglede->total;
    minMargin = std::min(minMargin, margin);
    if (margin >= -1e-9) ++holds;
  }
  check(v, checked == 500 && holds == checked,
        std::to_string(holds) + "/" + std::to_string(checked) + " hold, min margin " + fmt("%.3e", minMargin));
  const ElementaryMargins em = check_elementary_inequalities(1e-3);
  check(v, em.first >= 0.0 && em.second >= 0.0,
        "elementary margins " + fmt("%.2e", em.first) + ", " + fmt("%.2e", em.second) + " over " +
            std::to_string(em.points) + " points");
  return v;
}

Verdict stability_check() {
  Verdict v;
  const KappaReport rep = ensemble(true);
  check(v, rep.minDeficit >= -1e-9, "min deficit " + fmt("%.3e", rep.minDeficit));
  check(v, rep.minRatio > 0.0, "min ratio " + fmt("%.6f", rep.minRatio) + " at " + rep.argminId);
  check(v, rep.minRatio >= 0.95 * fixtures::kKappaMinRatio,
        "fixture " + fmt("%.6f", fixtures::kKappaMinRatio) + ", members " + std::to_string(rep.ensembleSize) +
            ", excluded " + std::to_string(rep.excluded));
  return v;
}

Verdict riesz_check() {
  Verdict v;
  std::vector<Point> disk;
  for (int k = 0; k < 256; ++k) {
    const double t = 2.0 * constants::pi * k / 256.0;
    disk.push_back({std::cos(t), std::sin(t)});
  }
  const RieszValue d = riesz_energy(Polygon(disk));
  check(v, std::abs(d.value - fixtures::kDiskRiesz) <= d.error,
        "disk " + fmt("%.10f", d.value) + " +- " + fmt("%.1e", d.error));
  check(v, std::abs(d.value - fixtures::kDiskMonteCarlo) <= 0.01 * fixtures::kDiskMonteCarlo,
        "MC " + fmt("%.4f", fixtures::kDiskMonteCarlo) + " rel diff " +
            fmt("%.1e", std::abs(d.value / fixtures::kDiskMonteCarlo - 1.0)));
  Rng rng(11);
  double worst = 0.0;
  for (int trial = 0; trial < 3; ++trial) {
    std::vector<Point> star;
    const int k = 12;
    for (int i = 0; i < k; ++i) {
      const double t = 2.0 * constants::pi * i / k;
      const double rad = rng.uniform(0.5, 1.5);
      star.push_back({rad * std::cos(t), rad * std::sin(t)});
    }
    const Polygon E(star);
    for (double a : {0.5, 1.0, 1.5}) {
      RieszConfig cfg;
      cfg.exponent = a;
      const RieszValue base = riesz_energy(E, cfg);
      for (double lambda : {0.5, 2.0}) {
        const RieszValue s = riesz_energy(scaled(E, lambda), cfg);
        const double expected = std::pow(lambda, 4.0 - a) * base.value;
        const double allowed = s.error + std::pow(lambda, 4.0 - a) * base.error;
        worst = std::max(worst, std::abs(s.value - expected) / allowed);
      }
    }
  }
  check(v, worst <= 1.0, "scaling law, worst |diff|/tolerance " + fmt("%.2e", worst));
  return v;
}

Verdict half_perimeter_check() {
  Verdict v;
  Rng rng(2024);
  double minMargin = 1e300;
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 6 + static_cast<int>(rng.uniform() * 20.0);
    const double cy = rng.uniform(-0.3, 0.3);
    std::vector<Point> star;
    for (int i = 0; i < k; ++i) {
      const double t = 2.0 * constants::pi * (i + rng.uniform(0.0, 0.8)) / k;
      const double rad = rng.uniform(0.4, 1.5);
      star.push_back({rad * std::cos(t), cy + rad * std::sin(t)});
    }
    minMargin = std::min(minMargin, check_half_perimeter(Polygon(star)));
  }
  check(v, minMargin >= -1e-9, "100 random star polygons, min margin " + fmt("%.4f", minMargin));
  return v;
}

Verdict minimality_check() {
  Verdict v;
  const RieszConfig cfg;
  for (double m : {0.05, 0.01}) {
    const OptResult r = optimize(m, 1.0, cfg);
    const double e = r.energyTrace.back().total;
    const double bound = lens_upper_bound(m, 1.0, cfg);
    check(v, r.converged && e <= bound + 1e-3 * std::sqrt(m),
          "m=" + fmt("%g", m) + " F=" + fmt("%.8f", e) + " lens " + fmt("%.8f", bound));
  }
  const double m1 = 0.05;
  const OptResult r0 = optimize(m1, 0.0, cfg);
  const double sd = symmetric_difference_area(r0.finalShape, lens_polygon(LensSpec::from_mass(m1), 4096));
  check(v, sd <= 1e-2, "gamma=0: |E delta L| " + fmt("%.2e", sd) + ", iterations " + std::to_string(r0.iterations));
  return v;
}

Verdict sweep_check() {
  Verdict v;
  OptimizerConfig opt;
  opt.freeCheck = false;
  const std::vector<SweepRow> rows = small_mass_sweep({0.2, 0.1, 0.05, 0.01}, 1.0, {}, opt);
  bool monotone = true;
  std::string table;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].failed) monotone = false;
    if (i > 0 && rows[i].rescaledAsymmetry > 1.1 * rows[i - 1].rescaledAsymmetry) monotone = false;
    table += fmt("%g:", rows[i].m) + fmt("%.3e ", rows[i].rescaledAsymmetry);
  }
  check(v, monotone, "non-increasing within 10%: " + table);
  check(v, rows.back().rescaledAsymmetry < rows.front().rescaledAsymmetry, "final below first");
  return v;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "lens geometry", 1.0, lens_geometry},
      {2, "mu0", 1.0, mu0_check},
      {3, "strip construction", 10.0, strip_check},
      {4, "sawtooth sharpness", 5.0, sharpness_check},
      {5, "Fuglede suite", 120.0, fuglede_check},
      {6, "empirical stability", 300.0, stability_check},
      {7, "Riesz quadrature", 120.0, riesz_check},
      {8, "half-perimeter inequality", 30.0, half_perimeter_check},
      {9, "nonlocal minimality", 600.0, minimality_check},
      {10, "small-mass convergence", 1800.0, sweep_check},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.body();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.budgetSeconds) {
      v.pass = false;
      v.detail += "[fail] runtime over budget; ";
    }
    if (!v.pass) ++failures;
    std::printf("%s %2d %-26s %8.2fs  %s\n", v.pass ? "PASS" : "FAIL", c.id, c.name, secs, v.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
