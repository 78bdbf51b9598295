#pragma once

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lenslab/errors.hpp"
#include "lenslab/geometry.hpp"
#include "lenslab/nonlocal.hpp"
#include "lenslab/partitions.hpp"
#include "lenslab/stability.hpp"

namespace lenslab {

/// Shortest round-trip decimal form (%.17g).
inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string format_optional(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

/// RFC 4180 quoting: fields holding a comma, quote, CR or LF are quoted,
/// quotes doubled.
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Header line plus one line per row, CRLF terminated.
inline std::string to_csv(const CsvTable& t) {
  if (t.rows.empty()) throw ValidationError("refusing to write a CSV file without rows");
  std::string out;
  auto line = [&](const std::vector<std::string>& fields) {
    if (fields.size() != t.header.size()) throw ValidationError("CSV row width differs from the header");
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out += ',';
      out += csv_field(fields[i]);
    }
    out += "\r\n";
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
  return out;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError(path.string() + ": " + std::strerror(errno));
  f << text;
  f.close();
  if (!f) throw IoError(path.string() + ": write failed");
}

inline void emit_csv(const std::filesystem::path& path, const CsvTable& t) { write_text(path, to_csv(t)); }

inline void emit_json(const std::filesystem::path& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

// ---------------------------------------------------------------------------
// Tables

inline CsvTable record_table(const std::vector<StabilityRecord>& records) {
  CsvTable t{{"id", "sigma", "deficit", "asymmetry", "ratio", "fugledeBound"}, {}};
  for (const StabilityRecord& r : records) {
    t.rows.push_back({r.id, format_number(r.sigma), format_number(r.deficit), format_number(r.asymmetry),
                      format_optional(r.ratio), format_optional(r.fugledeBound)});
  }
  return t;
}

inline CsvTable ensemble_table(const KappaReport& rep) {
  CsvTable t{{"id", "seed", "kind", "eps0", "sigma", "deficit", "asymmetry", "ratio", "fugledeTotal", "valid"}, {}};
  for (const MemberResult& m : rep.members) {
    t.rows.push_back({m.record.id, std::to_string(m.spec.seed), to_string(m.spec.kind), format_number(m.spec.eps0),
                      format_number(m.record.sigma), format_number(m.record.deficit),
                      format_number(m.record.asymmetry), m.excluded ? std::string() : format_optional(m.record.ratio),
                      format_optional(m.record.fugledeBound), m.valid ? "true" : "false"});
  }
  return t;
}

inline CsvTable sharpness_table(double s, const std::vector<SharpnessRow>& rows) {
  CsvTable t{{"s", "t", "deficit", "asymmetry", "ratio", "closedFormRatio", "limit"}, {}};
  for (const SharpnessRow& r : rows) {
    t.rows.push_back({format_number(s), format_number(r.t), format_number(r.deficit), format_number(r.asymmetry),
                      format_number(r.ratio), format_number(r.closedFormRatio), format_number(8.0 / (s * s * s))});
  }
  return t;
}

inline std::vector<std::string> energy_row(double m, double gamma, double exponent, const EnergyReport& e,
                                           double rescaledAsymmetry, bool converged) {
  return {format_number(m),
          format_number(gamma),
          format_number(exponent),
          format_number(e.total),
          format_number(e.perimeter),
          format_number(e.wettingLength),
          format_number(e.riesz.value),
          format_number(rescaledAsymmetry),
          converged ? "true" : "false"};
}

inline const std::vector<std::string> kEnergyHeader = {"m",         "gamma",  "exponent", "energy", "perimeter",
                                                       "wetting",   "riesz",  "rescaledAsymmetry",  "converged"};

inline CsvTable sweep_table(const std::vector<SweepRow>& rows) {
  CsvTable t{kEnergyHeader, {}};
  t.header.push_back("energyGap");
  t.header.push_back("failed");
  for (const SweepRow& r : rows) {
    auto line = energy_row(r.m, r.gamma, r.exponent, r.energy, r.rescaledAsymmetry, r.converged);
    line.push_back(format_number(r.energyGap));
    line.push_back(r.failed ? "true" : "false");
    t.rows.push_back(std::move(line));
  }
  return t;
}

// ---------------------------------------------------------------------------
// SVG

inline constexpr const char* kLensStroke = "#1f5fa8";
inline constexpr const char* kCompetitorStroke = "#c8372d";

/// Fixed 1000 x 1000 viewBox; [-R, R]^2 maps onto it with y up.
class SvgCanvas {
 public:
  explicit SvgCanvas(double windowRadius) : R_(windowRadius) {
    if (!(windowRadius > 0.0)) throw DomainError("SVG window radius must be positive");
  }

  void path(const std::vector<Point>& pts, bool closed, const std::string& stroke, double width = 2.0) {
    if (pts.size() < 2) throw ValidationError("SVG path needs at least two points");
    std::ostringstream d;
    d.precision(6);
    d << std::fixed;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      d << (i ? " L " : "M ") << px(pts[i].x) << ' ' << py(pts[i].y);
    }
    if (closed) d << " Z";
    body_ += "  <path d=\"" + d.str() + "\" fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"" +
             format_number(width) + "\"/>\n";
  }

  void partition(const LensTypePartition& p, const std::string& stroke) {
    path(p.topChain(), false, stroke);
    path(p.lowerArc().points(), false, stroke);
  }

  std::string str() const {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1000 1000\" width=\"1000\" height=\"1000\">\n"
           "  <rect x=\"0\" y=\"0\" width=\"1000\" height=\"1000\" fill=\"white\"/>\n" +
           body_ + "</svg>\n";
  }

 private:
  double px(double x) const { return 500.0 * (x / R_ + 1.0); }
  double py(double y) const { return 500.0 * (1.0 - y / R_); }

  double R_;
  std::string body_;
};

/// Lens partition (one stroke) under a competitor (another stroke).
inline std::string partition_overlay_svg(const LensTypePartition& lens, const LensTypePartition& competitor) {
  SvgCanvas c(lens.windowRadius());
  c.partition(lens, kLensStroke);
  c.partition(competitor, kCompetitorStroke);
  return c.str();
}

/// Two closed polygons in a window of radius R.
inline std::string polygon_overlay_svg(const Polygon& reference, const Polygon& shape, double R) {
  SvgCanvas c(R);
  c.path(reference.vertices(), true, kLensStroke);
  c.path(shape.vertices(), true, kCompetitorStroke);
  return c.str();
}

inline void emit_svg(const std::filesystem::path& path, const std::string& svg) { write_text(path, svg); }

}  // namespace lenslab
