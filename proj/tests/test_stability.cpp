#include <cmath>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "lenslab/perturb.hpp"
#include "lenslab/stability.hpp"

using namespace lenslab;

namespace {

const LensSpec kLens = LensSpec::from_radius(1.0);

PerturbationSpec random_spec(std::uint64_t seed, double eps0 = 0.05) {
  PerturbationSpec p;
  p.seed = seed;
  p.eps0 = eps0;
  return p;
}

double saw_deficit(double s, double t) { return 2.0 * std::sqrt(0.25 * s * s + t * t) - s; }

}  // namespace

// ---------------------------------------------------------------------------
// Perturbations

TEST(RandomC1, VanishingAmplitudeGivesLens) {
  const GraphTriple g = random_c1(random_spec(5, 1e-12), kLens, 10.0);
  const GraphTriple L = lens_triple(kLens, 10.0);
  EXPECT_LT(triple_norms(g).total(), 1e-10);
  EXPECT_NEAR(deficit(from_graphs(g), kLens), 0.0, 1e-9);
  ASSERT_EQ(g.x.size(), L.x.size());
  for (std::size_t k = 0; k < g.x.size(); ++k) EXPECT_NEAR(g.g1[k], L.g1[k], 1e-10);
}

TEST(RandomC1, Deterministic) {
  const GraphTriple a = random_c1(random_spec(42), kLens, 10.0);
  const GraphTriple b = random_c1(random_spec(42), kLens, 10.0);
  EXPECT_EQ(a.g0Left, b.g0Left);
  EXPECT_EQ(a.g0Right, b.g0Right);
  EXPECT_EQ(a.g1, b.g1);
  EXPECT_EQ(a.g2, b.g2);
  EXPECT_EQ(a.sigma, b.sigma);
}

TEST(RandomC1, NormBudgetAndArea) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const GraphTriple g = random_c1(random_spec(seed), kLens, 10.0);
    const TripleNorms n = triple_norms(g);
    EXPECT_LE(n.g0, 0.05 + 1e-12) << seed;
    EXPECT_LE(n.total(), 0.1 + 1e-12) << seed;
    EXPECT_NEAR(chamber_area(g), kLens.mass, 1e-12) << seed;
  }
}

TEST(RandomC1, Seed42Regression) {
  const PerturbationSpec spec = random_spec(42);
  const LensTypePartition p = make_competitor(spec, kLens, 10.0);
  const double d = deficit(p, kLens);
  const double a = asymmetry(p, kLens);
  EXPECT_GE(d, 0.0);
  ASSERT_GT(a, 0.0);
  EXPECT_TRUE(std::isfinite(d / (a * a)));
  EXPECT_NEAR(d, fixtures::kSeed42Deficit, 1e-9 * std::max(1.0, d));
  EXPECT_NEAR(a, fixtures::kSeed42Asymmetry, 1e-4 * a);
}

TEST(RandomC1, RejectsLargeBudget) {
  EXPECT_THROW(random_c1(random_spec(1, 0.2), kLens, 10.0), DomainError);
  EXPECT_THROW(random_spec(1, 0.0).validate(), ValidationError);
}

TEST(ProjectArea, FeasibleTripleUnchanged) {
  const GraphTriple g = lens_triple(kLens, 10.0);
  const GraphTriple p = project_area(g, chamber_area(g));
  EXPECT_EQ(p.g1, g.g1);
}

TEST(ProjectArea, DilationRestoresMass) {
  const GraphTriple g = dilation_family(0.1, kLens, 10.0);
  EXPECT_NEAR(chamber_area(g), 1.21 * kLens.mass, 1e-9);
  const GraphTriple p = project_area(g, kLens.mass);
  EXPECT_NEAR(chamber_area(p), kLens.mass, 1e-12);
  EXPECT_NEAR(polygon_area(from_graphs(p).finiteChamber()), kLens.mass, 1e-9);
}

TEST(ProjectArea, CollapsedChamberGetsBump) {
  GraphTriple g = lens_triple(kLens, 10.0, 512);
  g.g1 = g.g2;
  const GraphTriple p = project_area(g, kLens.mass);
  EXPECT_NEAR(chamber_area(p), kLens.mass, 1e-12);
  const std::vector<double> phi = projection_profile(g);
  const double c = kLens.mass / trapezoid(phi, g.step());
  for (std::size_t k = 0; k < phi.size(); ++k) EXPECT_NEAR(p.g1[k] - p.g2[k], c * phi[k], 1e-12);
}

TEST(Sawtooth, ClosedForms) {
  const LensTypePartition flat = from_graphs(sawtooth(1.0, 0.0, std::nullopt, kLens, 10.0));
  EXPECT_NEAR(deficit(flat, kLens), 0.0, 1e-12);
  const LensTypePartition p = from_graphs(sawtooth(1.0, 0.1, std::nullopt, kLens, 10.0));
  const double d = deficit(p, kLens);
  const double a = asymmetry(p, kLens);
  EXPECT_NEAR(d, fixtures::kSawtoothDeficitS1T01, 1e-12);
  EXPECT_NEAR(a, 0.05, 1e-6);
  EXPECT_NEAR(d / (a * a), fixtures::kSawtoothRatioS1T01, 1e-3);
  EXPECT_NEAR(sawtooth_ratio(1.0, 1e-3), fixtures::kSawtoothRatioS1T0001, 1e-12);
  EXPECT_NEAR(sawtooth_ratio(2.0, 1e-3), fixtures::kSawtoothRatioS2T0001, 1e-12);
  EXPECT_THROW(sawtooth(1.0, 1.0, std::nullopt, kLens, 10.0), DomainError);
}

TEST(Strip, DeficitAsymmetryRatio) {
  for (double Rs : {1.0, 5.0}) {
    const LensTypePartition p = strip_translation(Rs, kLens, 10.0);
    const double d = deficit(p, kLens);
    const double a = asymmetry(p, kLens);
    EXPECT_NEAR(d, 2.0, 1e-12);
    EXPECT_NEAR(a, Rs, 1e-3);
    EXPECT_NEAR(d / (a * a), 2.0 / (Rs * Rs), 1e-3 * 2.0 / (Rs * Rs));
  }
}

TEST(Strip, RatioDecaysWithWindow) {
  double prev = 1e300;
  for (double Rs : {2.0, 8.0, 32.0}) {
    const LensTypePartition p = strip_translation(Rs, kLens, Rs + 4.0, 256);
    const double r = deficit(p, kLens) / std::pow(partition_distance(p, lens_partition(kLens, Rs + 4.0, 256)), 2);
    EXPECT_LT(r, prev);
    EXPECT_NEAR(r, 2.0 / (Rs * Rs), 1e-9);
    prev = r;
  }
}

TEST(Dilation, Family) {
  EXPECT_EQ(dilation_family(0.0, kLens, 10.0).g1, lens_triple(kLens, 10.0).g1);
  const GraphTriple p = project_area(dilation_family(0.1, kLens, 10.0), kLens.mass);
  const LensTypePartition part = from_graphs(p);
  EXPECT_TRUE(is_admissible(part, kLens, 10.0));
  EXPECT_GE(deficit(part, kLens), kLens.mass * 0.01 / 1.1 - 1e-9);
}

TEST(Competitors, GeneratedAreAdmissible) {
  for (std::uint64_t seed = 100; seed < 130; ++seed) {
    const LensTypePartition p = make_competitor(random_spec(seed), kLens, 10.0);
    const Admissibility a = is_admissible(p, kLens, 10.0);
    EXPECT_TRUE(a) << seed << ": " << (a.violations.empty() ? "" : a.violations[0]);
  }
  PerturbationSpec dil;
  dil.kind = PerturbationKind::dilation;
  dil.sigma = -0.05;
  EXPECT_TRUE(is_admissible(make_competitor(dil, kLens, 10.0), kLens, 10.0));
}

TEST(PerturbationJson, RoundTrip) {
  PerturbationSpec p;
  p.kind = PerturbationKind::sawtooth;
  p.s = 0.5;
  p.t = 0.01;
  p.center = 2.0;
  const PerturbationSpec q = perturbation_from_json(nlohmann::json::parse(to_json(p).dump()));
  EXPECT_EQ(q.kind, p.kind);
  EXPECT_EQ(q.s, p.s);
  EXPECT_EQ(q.t, p.t);
  EXPECT_EQ(q.center, p.center);
  EXPECT_THROW(parse_kind("bump"), ValidationError);
}

// ---------------------------------------------------------------------------
// Quadratic bounds

TEST(Fuglede, LensIsZero) {
  const FugledeTerms f = fuglede_lower_bound(lens_triple(kLens, 10.0), kLens);
  EXPECT_EQ(f.total, 0.0);
  EXPECT_EQ(f.g0Term, 0.0);
  EXPECT_EQ(f.graphTerms, 0.0);
  EXPECT_EQ(f.sigmaTerm, 0.0);
}

TEST(Fuglede, SawtoothG0Term) {
  const GraphTriple g = sawtooth(1.0, 0.05, std::nullopt, kLens, 10.0);
  const FugledeTerms f = fuglede_lower_bound(g, kLens);
  EXPECT_NEAR(f.g0Term, 0.01 / std::pow(2.0, 2.5), 1e-15);
  EXPECT_NEAR(f.g0Term, 1.7678e-3, 1e-7);
  const double d = deficit(from_graphs(g), kLens);
  EXPECT_NEAR(d, saw_deficit(1.0, 0.05), 1e-12);
  EXPECT_NEAR(d, 4.9876e-3, 1e-7);
  EXPECT_LE(f.total, d);
}

TEST(Fuglede, ProjectedDilation) {
  const GraphTriple g = project_area(dilation_family(0.02, kLens, 10.0), kLens.mass);
  const FugledeTerms f = fuglede_lower_bound(g, kLens);
  EXPECT_NEAR(f.sigmaTerm, kLens.mass * 0.0004 / 1.02, 1e-15);
  EXPECT_LE(f.total, deficit(from_graphs(g), kLens));
}

TEST(Fuglede, RandomCompetitors) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const GraphTriple g = random_c1(random_spec(seed), kLens, 10.0);
    EXPECT_GE(deficit(from_graphs(g), kLens), fuglede_lower_bound(g, kLens).total - 1e-9) << seed;
  }
}

TEST(AsymmetryBound, Elementary) {
  EXPECT_EQ(asymmetry_upper_bound(lens_triple(kLens, 10.0), kLens, 10.0).linear, 0.0);
  const AsymmetryBound saw = asymmetry_upper_bound(sawtooth(1.0, 0.1, std::nullopt, kLens, 10.0), kLens, 10.0);
  EXPECT_NEAR(saw.linear, 0.05, 1e-14);
  const AsymmetryBound dil = asymmetry_upper_bound(dilation_family(0.1, kLens, 10.0), kLens, 10.0);
  EXPECT_NEAR(dil.linear, 0.21 * kLens.mass, 1e-12);
}

TEST(AsymmetryBound, DominatesMeasuredAsymmetry) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const GraphTriple g = random_c1(random_spec(seed), kLens, 10.0);
    const double a = asymmetry(from_graphs(g), kLens);
    const AsymmetryBound b = asymmetry_upper_bound(g, kLens, 10.0);
    EXPECT_LE(a, b.linear + 1e-9) << seed;
    EXPECT_LE(a * a, b.squared + 1e-12) << seed;
  }
}

TEST(Elementary, Margins) {
  EXPECT_NEAR(first_margin(1.0), (std::sqrt(2.0) - 1.0) - 1.0 / std::pow(2.0, 2.5), 1e-15);
  EXPECT_NEAR(first_margin(1.0), 0.23744, 1e-5);
  for (double s : {-1.5, 0.0, 0.3, 2.0}) EXPECT_EQ(second_margin(s, s), 0.0);
  const ElementaryMargins m = check_elementary_inequalities(1e-3);
  EXPECT_GE(m.first, 0.0);
  EXPECT_GE(m.second, 0.0);
  EXPECT_EQ(m.points, 2001u + 4001u * 4001u);
  EXPECT_THROW(check_elementary_inequalities(0.01), DomainError);
}

// ---------------------------------------------------------------------------
// Ensembles

TEST(Ensemble, SawtoothFamily) {
  EnsembleConfig cfg;
  cfg.mass = kLens.mass;
  cfg.randomCount = 0;
  cfg.sawtoothHeights = {0.1, 0.01, 0.001};
  const KappaReport rep = estimate_kappa(cfg);
  EXPECT_EQ(rep.ensembleSize, 3u);
  EXPECT_EQ(rep.argminId, "sawtooth-s1-t0.1");
  EXPECT_NEAR(rep.minRatio, fixtures::kSawtoothRatioS1T01, 1e-3);
}

TEST(Ensemble, StripFamily) {
  EnsembleConfig cfg;
  cfg.randomCount = 0;
  cfg.stripLengths = {1.0, 2.0, 3.0, 4.0, 5.0};
  const KappaReport rep = estimate_kappa(cfg);
  EXPECT_NEAR(rep.minRatio, 2.0 / 25.0, 1e-4);
  EXPECT_EQ(rep.argminId, "strip-5");
}

TEST(Ensemble, WithoutAsymmetryKeepsDeficits) {
  EnsembleConfig cfg;
  cfg.randomCount = 100;
  cfg.computeAsymmetry = false;
  const KappaReport a = estimate_kappa(cfg);
  const KappaReport b = estimate_kappa(cfg);
  EXPECT_EQ(a.excluded, 0u);
  EXPECT_TRUE(std::isnan(a.minRatio));
  EXPECT_GE(a.minDeficit, 0.0);
  ASSERT_EQ(a.members.size(), 100u);
  for (std::size_t i = 0; i < a.members.size(); ++i) {
    EXPECT_EQ(a.members[i].record.deficit, b.members[i].record.deficit);
    ASSERT_TRUE(a.members[i].fuglede.has_value());
  }
  cfg.randomCount = 50;
  EXPECT_THROW(estimate_kappa(cfg), DomainError);
}

TEST(Sharpness, Limits) {
  for (double s : {1.0, 2.0}) {
    const auto rows = sharpness_sweep(s, {0.1, 0.01, 1e-3}, kLens, 10.0);
    const double limit = 8.0 / (s * s * s);
    EXPECT_NEAR(rows.back().ratio, limit, 1e-4 * limit);
    for (const SharpnessRow& r : rows) EXPECT_NEAR(r.ratio, r.closedFormRatio, 1e-3 * r.closedFormRatio);
  }
  // Largest tooth t = s / 2: closed form 16 (sqrt(2) - 1) / s^3.
  EXPECT_NEAR(sawtooth_ratio(1.0, 0.5), 16.0 * (std::sqrt(2.0) - 1.0), 1e-12);
  EXPECT_THROW(sharpness_sweep(1.0, {0.01, 0.1}, kLens, 10.0), DomainError);
}
