#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lenslab/errors.hpp"
#include "lenslab/geometry.hpp"
#include "lenslab/io.hpp"
#include "lenslab/nonlocal.hpp"
#include "lenslab/partitions.hpp"
#include "lenslab/perturb.hpp"
#include "lenslab/stability.hpp"

#ifndef LENSLAB_VERSION
#define LENSLAB_VERSION "0.0.0"
#endif

namespace lenslab {

inline constexpr const char* kRunSchema = "run/1";

inline const std::vector<std::string>& run_commands() {
  static const std::vector<std::string> c = {"lens-info",        "stability-sweep",   "stability-fuglede", "sharpness",
                                             "nonlocal-optimize", "nonlocal-sweep",    "render"};
  return c;
}

/// Experiment configuration. Unset optional fields take per-command
/// defaults (see resolved()).
struct RunConfig {
  std::string command;
  std::optional<double> mass;
  double windowRadius = 10.0;
  double gamma = 1.0;
  double exponent = 1.0;
  double relTol = 1e-5;
  PerturbationSpec ensemble;
  std::string output = ".";
  std::uint64_t seed = 7;
  std::size_t count = 500;                           // random ensemble size
  std::vector<double> masses = {0.2, 0.1, 0.05, 0.01};  // nonlocal-sweep
  std::vector<double> heights = {0.1, 0.03, 0.01, 0.003, 0.001};  // sharpness
  int nodes = 48;

  double resolved_mass() const {
    if (mass) return *mass;
    if (command == "lens-info") return 1.0;
    if (command == "nonlocal-optimize") return 0.05;
    return unit_lens_area;
  }

  /// Throws UsageError naming the first offending field.
  void validate() const {
    const auto& cmds = run_commands();
    if (std::find(cmds.begin(), cmds.end(), command) == cmds.end()) throw UsageError("command", "'" + command + "'");
    const double m = resolved_mass();
    if (!(m > 0.0 && std::isfinite(m))) throw UsageError("mass", "must be positive");
    if ((command == "nonlocal-optimize") && m > 1.0) throw UsageError("mass", "nonlocal runs need m <= 1");
    if (!(windowRadius > 0.0)) throw UsageError("windowRadius", "must be positive");
    if (!(gamma >= 0.0)) throw UsageError("gamma", "must be nonnegative");
    if (!(exponent > 0.0 && exponent < 2.0)) throw UsageError("exponent", "must lie in (0, 2)");
    if (!(relTol >= 1e-6 && relTol < 1e-1)) throw UsageError("relTol", "must lie in [1e-6, 1e-1)");
    if (command == "stability-sweep" || command == "stability-fuglede") {
      if (count != 0 && count < 100) throw UsageError("count", "random ensembles need at least 100 members");
    }
    if (command == "nonlocal-sweep" && masses.empty()) throw UsageError("masses", "empty");
    if (command == "sharpness" && heights.empty()) throw UsageError("heights", "empty");
    if (nodes < 4 || nodes > 256) throw UsageError("nodes", "must lie in [4, 256]");
    try {
      ensemble.validate();
    } catch (const Error& e) {
      throw UsageError("ensemble", e.what());
    }
  }
};

inline nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j = {{"schema", kRunSchema},
                      {"command", c.command},
                      {"mass", c.resolved_mass()},
                      {"windowRadius", c.windowRadius},
                      {"gamma", c.gamma},
                      {"exponent", c.exponent},
                      {"relTol", c.relTol},
                      {"ensemble", to_json(c.ensemble)},
                      {"output", c.output},
                      {"seed", c.seed},
                      {"count", c.count},
                      {"masses", c.masses},
                      {"heights", c.heights},
                      {"nodes", c.nodes}};
  return j;
}

inline RunConfig run_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw UsageError("config", "expected a JSON object");
  if (j.contains("schema") && j.at("schema") != kRunSchema) throw UsageError("schema", "expected run/1");
  RunConfig c;
  try {
    c.command = j.value("command", c.command);
    if (j.contains("mass")) c.mass = j.at("mass").get<double>();
    c.windowRadius = j.value("windowRadius", c.windowRadius);
    c.gamma = j.value("gamma", c.gamma);
    c.exponent = j.value("exponent", c.exponent);
    c.relTol = j.value("relTol", c.relTol);
    if (j.contains("ensemble")) c.ensemble = perturbation_from_json(j.at("ensemble"));
    c.output = j.value("output", c.output);
    c.seed = j.value("seed", c.seed);
    c.count = j.value("count", c.count);
    c.masses = j.value("masses", c.masses);
    c.heights = j.value("heights", c.heights);
    c.nodes = j.value("nodes", c.nodes);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("config", e.what());
  } catch (const Error& e) {
    throw UsageError("ensemble", e.what());
  }
  return c;
}

struct RunOutcome {
  int exitCode = 0;
  std::string summary;             // human-readable report
  std::vector<std::string> files;  // relative to the output directory
};

namespace detail {

class Emitter {
 public:
  explicit Emitter(std::filesystem::path dir) : dir_(std::move(dir)) {}

  void csv(const std::string& name, const CsvTable& t) {
    emit_csv(dir_ / name, t);
    files_.push_back(name);
  }
  void json(const std::string& name, const nlohmann::json& j) {
    emit_json(dir_ / name, j);
    files_.push_back(name);
  }
  void svg(const std::string& name, const std::string& s) {
    emit_svg(dir_ / name, s);
    files_.push_back(name);
  }
  const std::vector<std::string>& files() const { return files_; }
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> files_;
};

inline EnsembleConfig ensemble_config(const RunConfig& c, bool computeAsymmetry) {
  EnsembleConfig e;
  e.mass = c.resolved_mass();
  e.windowRadius = c.windowRadius;
  e.randomCount = c.count;
  e.eps0 = c.ensemble.eps0;
  e.modes = c.ensemble.modes;
  e.seed = c.seed;
  e.samples = c.ensemble.samples;
  e.computeAsymmetry = computeAsymmetry;
  e.search.seed = c.seed;
  if (computeAsymmetry) {
    e.sawtoothBase = c.ensemble.s;
    e.sawtoothHeights = {0.1, 0.05, 0.01};
    e.dilations = {-0.05, -0.01, 0.01, 0.05};
  }
  return e;
}

inline void lens_info(const RunConfig& c, Emitter& out, std::ostringstream& log) {
  const double m = c.resolved_mass();
  const LensSpec lens = LensSpec::from_mass(m);
  const double arc = 2.0 * constants::pi / 3.0 * lens.radius;
  const nlohmann::json info = {{"mass", m},
                               {"radius", lens.radius},
                               {"halfWidth", lens.halfWidth},
                               {"arcLength", arc},
                               {"perimeter", 2.0 * arc},
                               {"chord", 2.0 * lens.halfWidth},
                               {"mu0SqrtM", mu0() * std::sqrt(m)}};
  log.precision(10);
  log << "radius     " << lens.radius << "\n"
      << "half-width " << lens.halfWidth << "\n"
      << "perimeter  " << 2.0 * arc << "\n"
      << "mu0*sqrt(m) " << mu0() * std::sqrt(m) << "\n";
  out.json("lens-info.json", info);
  out.json("lens.json", to_json(lens_polygon(lens, 512)));
  if (c.windowRadius > lens.halfWidth) {
    const LensTypePartition p = lens_partition(lens, c.windowRadius, 512);
    out.svg("lens.svg", partition_overlay_svg(p, p));
  }
}

inline void stability_sweep(const RunConfig& c, Emitter& out, std::ostringstream& log) {
  const KappaReport rep = estimate_kappa(ensemble_config(c, true));
  out.csv("ensemble.csv", ensemble_table(rep));
  out.json("kappa.json", {{"ensembleSize", rep.ensembleSize},
                          {"excluded", rep.excluded},
                          {"minRatio", rep.minRatio},
                          {"medianRatio", rep.medianRatio},
                          {"argmin", rep.argminId},
                          {"argminSpec", to_json(rep.argminSpec)},
                          {"windowRadius", rep.windowRadius},
                          {"minDeficit", rep.minDeficit}});
  const LensSpec lens = LensSpec::from_mass(c.resolved_mass());
  const LensTypePartition worst = make_competitor(rep.argminSpec, lens, c.windowRadius);
  out.svg("worst.svg", partition_overlay_svg(lens_partition(lens, c.windowRadius), worst));
  log.precision(10);
  log << "members " << rep.ensembleSize << " excluded " << rep.excluded << "\n"
      << "min ratio " << rep.minRatio << " (" << rep.argminId << ")\n"
      << "median ratio " << rep.medianRatio << "\n";
}

inline void stability_fuglede(const RunConfig& c, Emitter& out, std::ostringstream& log) {
  const KappaReport rep = estimate_kappa(ensemble_config(c, false));
  CsvTable t{{"id", "deficit", "fugledeTotal", "g0Terms", "graphTerms", "sigmaTerm", "margin"}, {}};
  std::size_t holds = 0, checked = 0;
  double minMargin = std::numeric_limits<double>::infinity();
  for (const MemberResult& m : rep.members) {
    std::vector<std::string> row = {m.record.id, format_number(m.record.deficit), "", "", "", "", ""};
    if (m.fuglede) {
      const double margin = m.record.deficit - m.fuglede->total;
      row[2] = format_number(m.fuglede->total);
      row[3] = format_number(m.fuglede->g0Term);
      row[4] = format_number(m.fuglede->graphTerms);
      row[5] = format_number(m.fuglede->sigmaTerm);
      row[6] = format_number(margin);
      ++checked;
      if (margin >= -1e-9) ++holds;
      minMargin = std::min(minMargin, margin);
    }
    t.rows.push_back(std::move(row));
  }
  out.csv("fuglede.csv", t);
  const ElementaryMargins em = check_elementary_inequalities(1e-3);
  out.json("fuglede.json", {{"members", rep.ensembleSize},
                            {"checked", checked},
                            {"holds", holds},
                            {"minMargin", minMargin},
                            {"elementaryFirst", em.first},
                            {"elementarySecond", em.second},
                            {"elementaryPoints", em.points}});
  log.precision(10);
  log << "bound holds for " << holds << " of " << checked << " members, min margin " << minMargin << "\n"
      << "elementary margins " << em.first << " " << em.second << "\n";
}

inline void sharpness(const RunConfig& c, Emitter& out, std::ostringstream& log) {
  const LensSpec lens = LensSpec::from_mass(c.resolved_mass());
  const double s = c.ensemble.s;
  SearchConfig search;
  search.seed = c.seed;
  const std::vector<SharpnessRow> rows = sharpness_sweep(s, c.heights, lens, c.windowRadius, c.ensemble.samples, search);
  out.csv("sharpness.csv", sharpness_table(s, rows));
  const LensTypePartition p = from_graphs(sawtooth(s, c.heights.front(), std::nullopt, lens, c.windowRadius,
                                                   c.ensemble.samples));
  out.svg("sawtooth.svg", partition_overlay_svg(lens_partition(lens, c.windowRadius), p));
  log.precision(10);
  for (const SharpnessRow& r : rows) log << "t " << r.t << " ratio " << r.ratio << " limit " << 8.0 / (s * s * s) << "\n";
}

inline void nonlocal_optimize(const RunConfig& c, Emitter& out, std::ostringstream& log) {
  const double m = c.resolved_mass();
  RieszConfig rc;
  rc.exponent = c.exponent;
  rc.relTol = c.relTol;
  OptimizerConfig oc;
  oc.nodes = c.nodes;
  const OptResult r = optimize(m, c.gamma, rc, oc);
  CsvTable t{kEnergyHeader, {energy_row(m, c.gamma, c.exponent, r.energyTrace.back(), r.rescaledAsymmetry, r.converged)}};
  out.csv("optimize.csv", t);
  CsvTable trace{{"iteration", "energy", "perimeter", "wetting", "riesz"}, {}};
  for (std::size_t i = 0; i < r.energyTrace.size(); ++i) {
    const EnergyReport& e = r.energyTrace[i];
    trace.rows.push_back({std::to_string(i), format_number(e.total), format_number(e.perimeter),
                          format_number(e.wettingLength), format_number(e.riesz.value)});
  }
  out.csv("trace.csv", trace);
  out.json("shape.json", to_json(r.finalShape));
  const Polygon rescaled = scaled(r.finalShape, 1.0 / std::sqrt(m));
  out.svg("overlay.svg", polygon_overlay_svg(lens_polygon(LensSpec::from_mass(1.0), 512), rescaled, 1.5));
  nlohmann::json summary = {{"iterations", r.iterations},
                            {"converged", r.converged},
                            {"energy", r.energyTrace.back().total},
                            {"lensUpperBound", lens_upper_bound(m, c.gamma, rc)},
                            {"rescaledAsymmetry", r.rescaledAsymmetry},
                            {"note", r.note}};
  if (r.freeCheck) {
    summary["freeCheck"] = {{"improvingDetachment", r.freeCheck->improvingDetachment},
                            {"improvingVertexMove", r.freeCheck->improvingVertexMove},
                            {"bestDetachmentGain", r.freeCheck->bestDetachmentGain},
                            {"bestVertexGain", r.freeCheck->bestVertexGain}};
  }
  out.json("optimize.json", summary);
  log.precision(10);
  log << "energy " << r.energyTrace.back().total << " (lens " << lens_upper_bound(m, c.gamma, rc) << ")\n"
      << "iterations " << r.iterations << (r.converged ? " converged" : " not converged") << "\n"
      << "rescaled asymmetry " << r.rescaledAsymmetry << "\n";
}

inline void nonlocal_sweep(const RunConfig& c, Emitter& out, std::ostringstream& log) {
  RieszConfig rc;
  rc.exponent = c.exponent;
  rc.relTol = c.relTol;
  OptimizerConfig oc;
  oc.nodes = c.nodes;
  oc.freeCheck = false;
  const std::vector<SweepRow> rows = small_mass_sweep(c.masses, c.gamma, rc, oc);
  out.csv("sweep.csv", sweep_table(rows));
  log.precision(10);
  for (const SweepRow& r : rows) {
    log << "m " << r.m << " asymmetry " << r.rescaledAsymmetry << " gap " << r.energyGap
        << (r.failed ? " FAILED " + r.note : "") << "\n";
  }
}

inline void render(const RunConfig& c, Emitter& out, std::ostringstream& log) {
  const LensSpec lens = LensSpec::from_mass(c.resolved_mass());
  const LensTypePartition p = make_competitor(c.ensemble, lens, c.windowRadius);
  out.svg("render.svg", partition_overlay_svg(lens_partition(lens, c.windowRadius), p));
  out.json("partition.json", to_json(p));
  log << "rendered " << member_id(c.ensemble) << "\n";
}
}  // namespace detail

/// Runs one experiment and writes its files plus manifest.json into
/// cfg.output. Errors propagate as lenslab::Error.
inline RunOutcome run(const RunConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  std::error_code ec;
  std::filesystem::create_directories(cfg.output, ec);
  if (ec) throw IoError(cfg.output + ": " + ec.message());
  detail::Emitter out(cfg.output);
  std::ostringstream log;
  const std::string& cmd = cfg.command;
  if (cmd == "lens-info") detail::lens_info(cfg, out, log);
  else if (cmd == "stability-sweep") detail::stability_sweep(cfg, out, log);
  else if (cmd == "stability-fuglede") detail::stability_fuglede(cfg, out, log);
  else if (cmd == "sharpness") detail::sharpness(cfg, out, log);
  else if (cmd == "nonlocal-optimize") detail::nonlocal_optimize(cfg, out, log);
  else if (cmd == "nonlocal-sweep") detail::nonlocal_sweep(cfg, out, log);
  else detail::render(cfg, out, log);

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const nlohmann::json manifest = {{"schema", "manifest/1"},
                                   {"toolkit", "lenslab"},
                                   {"version", LENSLAB_VERSION},
                                   {"command", cmd},
                                   {"seed", cfg.seed},
                                   {"config", to_json(cfg)},
                                   {"files", out.files()},
                                   {"wallTimeSeconds", wall}};
  emit_json(out.dir() / "manifest.json", manifest);
  RunOutcome o;
  o.summary = log.str();
  o.files = out.files();
  o.files.push_back("manifest.json");
  return o;
}

}  // namespace lenslab
