// lenslab command line front end.
//
//   lenslab <command> [--config run.json] [flags]
//
// Flags override values read from --config. Exit codes: 0 ok, 1 usage,
// 2 validation, 3 constraint, 4 accuracy, 5 io.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lenslab/lenslab.hpp"

namespace {

struct Flags {
  std::string config;
  std::optional<double> mass, window, gamma, exponent, relTol;
  std::optional<std::string> output;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> count;
  std::optional<int> nodes;
  std::vector<double> masses, heights;
  std::optional<std::string> kind;
  std::optional<double> eps0, s, t, sigma, stripLen, center;
  std::optional<int> modes;
  std::optional<std::size_t> samples;
};

void add_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "run/1 JSON configuration")->check(CLI::ExistingFile);
  sub->add_option("--mass,-m", f.mass, "chamber area");
  sub->add_option("--window,-R", f.window, "window radius");
  sub->add_option("--gamma", f.gamma, "Riesz coupling");
  sub->add_option("--exponent", f.exponent, "Riesz exponent a in (0, 2)");
  sub->add_option("--rel-tol", f.relTol, "Riesz quadrature tolerance");
  sub->add_option("--output,-o", f.output, "output directory");
  sub->add_option("--seed", f.seed, "seed");
  sub->add_option("--count", f.count, "random ensemble size");
  sub->add_option("--nodes", f.nodes, "optimizer nodes per arc");
  sub->add_option("--masses", f.masses, "masses for nonlocal-sweep (decreasing)");
  sub->add_option("--heights", f.heights, "sawtooth heights (decreasing)");
  sub->add_option("--kind", f.kind, "perturbation kind")
      ->check(CLI::IsMember({"random-c1", "sawtooth", "strip", "dilation"}));
  sub->add_option("--eps0", f.eps0, "C1 budget of random perturbations");
  sub->add_option("--modes", f.modes, "Fourier modes of random perturbations");
  sub->add_option("--s", f.s, "sawtooth base");
  sub->add_option("--t", f.t, "sawtooth height");
  sub->add_option("--center", f.center, "sawtooth center");
  sub->add_option("--sigma", f.sigma, "dilation parameter");
  sub->add_option("--strip-len", f.stripLen, "strip length");
  sub->add_option("--samples", f.samples, "arc samples");
}

lenslab::RunConfig assemble(const std::string& command, const Flags& f) {
  lenslab::RunConfig c;
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw lenslab::IoError(f.config + ": cannot open");
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw lenslab::UsageError("config", e.what());
    }
    c = lenslab::run_config_from_json(j);
  }
  c.command = command;
  if (f.mass) c.mass = f.mass;
  if (f.window) c.windowRadius = *f.window;
  if (f.gamma) c.gamma = *f.gamma;
  if (f.exponent) c.exponent = *f.exponent;
  if (f.relTol) c.relTol = *f.relTol;
  if (f.output) c.output = *f.output;
  if (f.seed) c.seed = *f.seed;
  if (f.count) c.count = *f.count;
  if (f.nodes) c.nodes = *f.nodes;
  if (!f.masses.empty()) c.masses = f.masses;
  if (!f.heights.empty()) c.heights = f.heights;
  if (f.kind) c.ensemble.kind = lenslab::parse_kind(*f.kind);
  if (f.eps0) c.ensemble.eps0 = *f.eps0;
  if (f.modes) c.ensemble.modes = *f.modes;
  if (f.s) c.ensemble.s = *f.s;
  if (f.t) c.ensemble.t = *f.t;
  if (f.center) c.ensemble.center = *f.center;
  if (f.sigma) c.ensemble.sigma = *f.sigma;
  if (f.stripLen) c.ensemble.stripLength = *f.stripLen;
  if (f.samples) c.ensemble.samples = *f.samples;
  if (f.seed) c.ensemble.seed = *f.seed;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lens partition stability and nonlocal lens experiments"};
  app.set_version_flag("--version", std::string(LENSLAB_VERSION));
  app.require_subcommand(1);
  Flags flags;
  for (const std::string& name : lenslab::run_commands()) add_flags(app.add_subcommand(name), flags);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const lenslab::RunConfig cfg = assemble(command, flags);
    const lenslab::RunOutcome out = lenslab::run(cfg);
    std::cout << out.summary;
    for (const std::string& f : out.files) std::cout << "wrote " << f << "\n";
    return 0;
  } catch (const lenslab::AccuracyError& e) {
    std::cerr << e.what() << " (best " << e.best_estimate() << " +- " << e.error_estimate() << ")\n";
    return static_cast<int>(e.category());
  } catch (const lenslab::Error& e) {
    std::cerr << e.what() << "\n";
    return static_cast<int>(e.category());
  }
}
