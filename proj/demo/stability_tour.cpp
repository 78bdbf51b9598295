// Deficit, asymmetry and quadratic bounds for a few competitors of the
// unit-radius lens partition in the window of radius 10.
//
//   ./stability_tour

#include <cstdio>

#include "lenslab/lenslab.hpp"

using namespace lenslab;

namespace {

void report(const char* name, const LensTypePartition& p, const LensSpec& lens) {
  const double d = deficit(p, lens);
  const double a = asymmetry(p, lens);
  std::printf("%-22s deficit %.6e  asymmetry %.6e  ratio %.5f", name, d, a, a > 0.0 ? d / (a * a) : 0.0);
  if (p.graphs()) std::printf("  quadratic bound %.6e", fuglede_lower_bound(*p.graphs(), lens).total);
  std::printf("\n");
}

}  // namespace

int main() {
  const LensSpec lens = LensSpec::from_radius(1.0);
  const double R = 10.0;

  report("lens", lens_partition(lens, R), lens);
  report("strip, length 1", strip_translation(1.0, lens, R), lens);
  report("strip, length 5", strip_translation(5.0, lens, R), lens);
  for (double t : {0.1, 0.01}) {
    char name[32];
    std::snprintf(name, sizeof name, "sawtooth, t = %g", t);
    report(name, from_graphs(sawtooth(1.0, t, std::nullopt, lens, R)), lens);
  }
  report("dilation 0.05", from_graphs(project_area(dilation_family(0.05, lens, R), lens.mass)), lens);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    PerturbationSpec spec;
    spec.seed = seed;
    char name[32];
    std::snprintf(name, sizeof name, "random, seed %llu", static_cast<unsigned long long>(seed));
    report(name, make_competitor(spec, lens, R), lens);
  }
  return 0;
}
