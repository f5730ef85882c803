#pragma once

// Experiment configuration: one JSON document fully determines a run. The
// grammar is documented in docs/formats.md; unknown keys are rejected with
// the offending key named, and parse errors carry line/column positions.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "nwidth/errors.hpp"

namespace nwidth {

struct DirectionsConfig {
  std::string family = "bumps";  // bumps | constants | files
  int count = 0;                 // bumps
  double s = 2.0;                // bumps decay exponent
  double c = 0.5;                // bumps scale
  std::vector<double> values;    // constants
  std::vector<std::string> files;  // files (HWF1 coefficient arrays)
};

struct ProblemConfig {
  std::string kind = "affine";  // affine | semilinear
  int dim = 1;
  int N = 63;
  std::string load = "const1";  // preset name or file:<path>
  double abar = 1.0;
  DirectionsConfig directions;
};

struct TaylorConfig {
  bool present = false;
  std::string strategy = "degree";  // degree | weighted
  int max_degree = 4;
  double threshold = 0.0;  // weighted strategy prune level
};

struct WidthsConfig {
  bool present = false;
  std::string sampler = "random";  // random | tensor | halton
  int m = 50;
  int n_max = 40;
  int window_lo = 5;
  int window_hi = 40;
  double delta = 0.25;
  double s = -1.0;  // < 0: take the bumps family exponent
};

struct CoverConfig {
  bool present = false;
  double epsilon = 1.0;
  int j_cap = 6;
  int samples = 200;
};

struct SemilinearConfig {
  bool present = false;
  double tol = 1e-10;
  int max_iter = 30;
};

struct ExperimentConfig {
  std::uint64_t seed = 0;
  ProblemConfig problem;
  TaylorConfig taylor;
  TaylorConfig bounds;  // same shape as the taylor section
  WidthsConfig widths;
  CoverConfig cover;
  SemilinearConfig semilinear;
  std::filesystem::path base_dir;  // for resolving relative file references
  nlohmann::json echo;             // parsed document, re-emitted into artifacts
};

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& obj,
                                const std::set<std::string>& allowed,
                                const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key))
      throw ConfigError("unknown key \"" + key + "\" at " + where);
  }
}

template <class T>
T get_or(const nlohmann::json& obj, const std::string& key, T fallback,
         const std::string& where) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("bad value for \"" + key + "\" at " + where);
  }
}

template <class T>
T require(const nlohmann::json& obj, const std::string& key,
          const std::string& where) {
  if (!obj.contains(key))
    throw ConfigError("missing required key \"" + key + "\" at " + where);
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("bad value for \"" + key + "\" at " + where);
  }
}

inline std::pair<int, int> line_of_byte(const std::string& text,
                                        std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace detail

inline ExperimentConfig parse_config_text(const std::string& text,
                                          const std::filesystem::path& base_dir) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    auto [line, col] = detail::line_of_byte(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ConfigError("config parse error at line " + std::to_string(line) +
                      ", column " + std::to_string(col) + ": " + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config root must be an object");

  detail::reject_unknown_keys(
      doc, {"seed", "problem", "taylor", "bounds", "widths", "cover", "semilinear"},
      "/");

  ExperimentConfig cfg;
  cfg.base_dir = base_dir;
  cfg.echo = doc;
  cfg.seed = detail::require<std::uint64_t>(doc, "seed", "/");

  const nlohmann::json prob = detail::require<nlohmann::json>(doc, "problem", "/");
  if (!prob.is_object()) throw ConfigError("\"problem\" must be an object");
  detail::reject_unknown_keys(
      prob, {"kind", "dim", "N", "load", "abar", "directions"}, "/problem");
  cfg.problem.kind = detail::get_or<std::string>(prob, "kind", "affine", "/problem");
  if (cfg.problem.kind != "affine" && cfg.problem.kind != "semilinear")
    throw ConfigError("problem kind must be \"affine\" or \"semilinear\"");
  cfg.problem.dim = detail::get_or<int>(prob, "dim", 1, "/problem");
  cfg.problem.N = detail::require<int>(prob, "N", "/problem");
  if (cfg.problem.dim != 1 && cfg.problem.dim != 2)
    throw ConfigError("problem dim must be 1 or 2");
  if (cfg.problem.N < 2) throw ConfigError("problem N must be >= 2");
  cfg.problem.load = detail::get_or<std::string>(prob, "load", "const1", "/problem");
  cfg.problem.abar = detail::get_or<double>(prob, "abar", 1.0, "/problem");

  const nlohmann::json dirs =
      detail::require<nlohmann::json>(prob, "directions", "/problem");
  detail::reject_unknown_keys(dirs, {"family", "count", "s", "c", "values", "files"},
                              "/problem/directions");
  auto& d = cfg.problem.directions;
  d.family = detail::require<std::string>(dirs, "family", "/problem/directions");
  if (d.family == "bumps") {
    d.count = detail::require<int>(dirs, "count", "/problem/directions");
    d.s = detail::require<double>(dirs, "s", "/problem/directions");
    d.c = detail::require<double>(dirs, "c", "/problem/directions");
    if (d.count < 1) throw ConfigError("bumps count must be >= 1");
  } else if (d.family == "constants") {
    d.values = detail::require<std::vector<double>>(dirs, "values",
                                                    "/problem/directions");
    if (d.values.empty()) throw ConfigError("constants family needs values");
  } else if (d.family == "files") {
    d.files = detail::require<std::vector<std::string>>(dirs, "files",
                                                        "/problem/directions");
    if (d.files.empty()) throw ConfigError("files family needs file names");
  } else {
    throw ConfigError("unknown direction family \"" + d.family + "\"");
  }

  auto parse_lambda_section = [&](const char* name, TaylorConfig& out) {
    if (!doc.contains(name)) return;
    const nlohmann::json sec = doc.at(name);
    const std::string where = std::string("/") + name;
    detail::reject_unknown_keys(sec, {"strategy", "max_degree", "threshold"}, where);
    out.present = true;
    out.strategy = detail::get_or<std::string>(sec, "strategy", "degree", where);
    if (out.strategy != "degree" && out.strategy != "weighted")
      throw ConfigError("strategy must be \"degree\" or \"weighted\" at " + where);
    out.max_degree = detail::require<int>(sec, "max_degree", where);
    if (out.max_degree < 0) throw ConfigError("max_degree must be >= 0");
    out.threshold = detail::get_or<double>(sec, "threshold", 0.0, where);
  };
  parse_lambda_section("taylor", cfg.taylor);
  parse_lambda_section("bounds", cfg.bounds);

  if (doc.contains("widths")) {
    const nlohmann::json sec = doc.at("widths");
    detail::reject_unknown_keys(
        sec, {"sampler", "m", "n_max", "window", "delta", "s"}, "/widths");
    cfg.widths.present = true;
    cfg.widths.sampler =
        detail::get_or<std::string>(sec, "sampler", "random", "/widths");
    cfg.widths.m = detail::require<int>(sec, "m", "/widths");
    if (cfg.widths.m < 2) throw ConfigError("widths m must be >= 2");
    cfg.widths.n_max = detail::require<int>(sec, "n_max", "/widths");
    if (sec.contains("window")) {
      auto window = detail::require<std::vector<int>>(sec, "window", "/widths");
      if (window.size() != 2)
        throw ConfigError("widths window must be [n_min, n_max]");
      cfg.widths.window_lo = window[0];
      cfg.widths.window_hi = window[1];
    } else {
      cfg.widths.window_lo = 5;
      cfg.widths.window_hi = std::min(40, std::max(6, cfg.widths.m / 4));
    }
    if (cfg.widths.window_lo < 1 || cfg.widths.window_hi < cfg.widths.window_lo)
      throw ConfigError("widths window is empty or starts below 1");
    if (cfg.widths.window_hi > cfg.widths.n_max)
      throw ConfigError("widths window extends past n_max");
    cfg.widths.delta = detail::get_or<double>(sec, "delta", 0.25, "/widths");
    cfg.widths.s = detail::get_or<double>(sec, "s", -1.0, "/widths");
    if (cfg.widths.s < 0 && cfg.problem.directions.family != "bumps")
      throw ConfigError("widths needs \"s\" unless the bumps family provides it");
  }

  if (doc.contains("cover")) {
    const nlohmann::json sec = doc.at("cover");
    detail::reject_unknown_keys(sec, {"epsilon", "j_cap", "samples"}, "/cover");
    cfg.cover.present = true;
    cfg.cover.epsilon = detail::require<double>(sec, "epsilon", "/cover");
    if (!(cfg.cover.epsilon > 0)) throw ConfigError("cover epsilon must be > 0");
    cfg.cover.j_cap = detail::get_or<int>(sec, "j_cap", 6, "/cover");
    cfg.cover.samples = detail::get_or<int>(sec, "samples", 200, "/cover");
    if (cfg.cover.samples < 1) throw ConfigError("cover samples must be >= 1");
  }

  if (doc.contains("semilinear")) {
    const nlohmann::json sec = doc.at("semilinear");
    detail::reject_unknown_keys(sec, {"tol", "max_iter"}, "/semilinear");
    cfg.semilinear.present = true;
    cfg.semilinear.tol = detail::get_or<double>(sec, "tol", 1e-10, "/semilinear");
    cfg.semilinear.max_iter =
        detail::get_or<int>(sec, "max_iter", 30, "/semilinear");
  }

  if (cfg.problem.kind == "semilinear" && (cfg.taylor.present || cfg.bounds.present))
    throw ConfigError(
        "taylor/bounds studies need an affine problem; the semilinear "
        "coefficient enters through exp(a)");
  if (cfg.problem.kind == "affine" && cfg.semilinear.present)
    throw ConfigError("semilinear study requires problem kind \"semilinear\"");

  return cfg;
}

inline ExperimentConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path.string());
  std::string text((std::istreambuf_iterator<char>(is)),
                   std::istreambuf_iterator<char>());
  return parse_config_text(text, path.parent_path());
}

}  // namespace nwidth
