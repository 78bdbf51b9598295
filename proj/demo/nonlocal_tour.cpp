// Minimizes the wetting energy with a Riesz term at a few small masses and
// compares with the lens of the same area. Writes overlay-<m>.svg (optimized
// shape rescaled to unit area over the unit-area lens).
//
//   ./nonlocal_tour [gamma]

#include <cstdio>
#include <cstdlib>
#include <string>

#include "lenslab/lenslab.hpp"

using namespace lenslab;

int main(int argc, char** argv) {
  const double gamma = argc > 1 ? std::atof(argv[1]) : 1.0;
  const RieszConfig riesz;
  const Polygon unit = lens_polygon(LensSpec::from_mass(1.0), 512);
  std::printf("%8s %14s %14s %10s %6s\n", "m", "energy", "lens", "asym", "iters");
  for (double m : {0.2, 0.05, 0.01}) {
    const OptResult r = optimize(m, gamma, riesz);
    std::printf("%8g %14.9f %14.9f %10.3e %6d%s\n", m, r.energyTrace.back().total, lens_upper_bound(m, gamma, riesz),
                r.rescaledAsymmetry, r.iterations, r.converged ? "" : "  (not converged)");
    if (r.freeCheck && (r.freeCheck->improvingDetachment || r.freeCheck->improvingVertexMove)) {
      std::printf("         free-polygon check found an improving move\n");
    }
    char name[64];
    std::snprintf(name, sizeof name, "overlay-%g.svg", m);
    emit_svg(name, polygon_overlay_svg(unit, scaled(r.finalShape, 1.0 / std::sqrt(m)), 1.5));
  }
  return 0;
}
