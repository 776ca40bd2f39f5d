#pragma once

// Experiment configuration: a key = value INI with [section] headers. The
// parser validates everything it can and reports every error at once, each
// with its line number. Analytic right-hand sides and variable-order kernel
// profiles come from small fixed catalogs rather than an expression language.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "nlelast/core.hpp"
#include "nlelast/diagnostics.hpp"
#include "nlelast/field.hpp"
#include "nlelast/geometry.hpp"
#include "nlelast/io.hpp"
#include "nlelast/kernels.hpp"

namespace nlelast {

struct ExperimentConfig {
  std::set<std::string> present;  // "section.key" for every key that appeared
  bool has(const std::string& dotted) const { return present.count(dotted) > 0; }

  // [kernel]
  std::string kernel_family;
  double s = 0.5;
  double r = kInfiniteRadius;
  double alpha = 0.1;        // mixed-order exponent offset
  double alpha1 = 1.0;       // modulus bounds
  double alpha2 = 1.0;
  std::vector<double> axis;  // cone axis (defaults to e1)
  double half_angle = M_PI;  // pi = full cone
  std::vector<double> halfcone_axis;
  double halfcone_angle = 0.5 * M_PI;
  std::string b_profile = "constant";
  double b_min = 1.0;
  double b_max = 1.0;
  std::string alpha_profile = "constant";
  double a_lo = 0.25;
  double a_hi = 0.25;

  // [grid]
  int d = 1;
  std::vector<int> n;
  std::vector<double> spacing;
  bool periodic = false;
  std::vector<double> origin;

  // [domain]
  std::string shape = "all";
  std::vector<double> lo, hi, center;
  double radius = 0.0;
  std::string g_kind = "skew";  // constraint data for solve-nonzero
  std::vector<double> g_amplitude{1.0};
  std::string g_file;

  // [rhs]
  std::string rhs_kind = "constant";
  std::vector<double> amplitude{1.0};
  std::vector<double> rhs_center;
  double width = 0.1;
  std::vector<double> mode;
  double phase = 0.0;
  double jump_at = 0.5;
  std::string rhs_file;

  // [run]
  double tol = 1e-10;
  int max_iter = 0;
  int levels = 3;
  double p = 2.0;
  bool lp_evidence = false;
  double beta = 0.0;
  std::uint64_t seed = 1;
  int threads = 0;  // 0: resolve via CLI flag / environment
  double radius_cap = kInfiniteRadius;
  int sphere_order = 24;
  std::vector<double> cutoff_center;
  double cutoff_r_in = 0.0;
  double cutoff_r_out = 0.0;
  int suite_count = 50;
  double band_min = 1.0;
  double band_max = 4.0;
  int xi_count = 20;
  double xi_max = 4.0;
  int probes = 5;

  // [output]
  std::string output_dir = "out";
};

namespace detail {

struct RawValue {
  std::string text;
  int line = 0;
};

struct ConfigErrors {
  std::vector<std::string> items;
  void add(int line, const std::string& msg) {
    items.push_back("line " + std::to_string(line) + ": " + msg);
  }
  void add(const RawValue& v, const std::string& msg) { add(v.line, msg); }
};

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline bool parse_double(const std::string& text, double& out) {
  const char* c = text.c_str();
  char* end = nullptr;
  out = std::strtod(c, &end);
  return end != c && *end == '\0';
}

inline bool parse_int(const std::string& text, long& out) {
  const char* c = text.c_str();
  char* end = nullptr;
  out = std::strtol(c, &end, 10);
  return end != c && *end == '\0';
}

inline bool parse_bool(const std::string& text, bool& out) {
  if (text == "true" || text == "1") return out = true, true;
  if (text == "false" || text == "0") return out = false, true;
  return false;
}

inline std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream ss(s);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

// Typed reads against the raw section map; every failure lands in errs.
class ConfigReader {
 public:
  ConfigReader(const std::map<std::string, std::map<std::string, RawValue>>& raw,
               ConfigErrors& errs, std::set<std::string>& present)
      : raw_(raw), errs_(errs), present_(present) {}

  bool fetch(const std::string& sec, const std::string& key, RawValue& out) {
    auto s = raw_.find(sec);
    if (s == raw_.end()) return false;
    auto k = s->second.find(key);
    if (k == s->second.end()) return false;
    present_.insert(sec + "." + key);
    out = k->second;
    return true;
  }

  void get_string(const std::string& sec, const std::string& key, std::string& dst) {
    RawValue v;
    if (fetch(sec, key, v)) dst = v.text;
  }

  void get_double(const std::string& sec, const std::string& key, double& dst) {
    RawValue v;
    if (!fetch(sec, key, v)) return;
    double x;
    if (parse_double(v.text, x))
      dst = x;
    else
      errs_.add(v, "key '" + key + "': not a number: '" + v.text + "'");
  }

  void get_int(const std::string& sec, const std::string& key, int& dst) {
    RawValue v;
    if (!fetch(sec, key, v)) return;
    long x;
    if (parse_int(v.text, x))
      dst = static_cast<int>(x);
    else
      errs_.add(v, "key '" + key + "': not an integer: '" + v.text + "'");
  }

  void get_u64(const std::string& sec, const std::string& key, std::uint64_t& dst) {
    RawValue v;
    if (!fetch(sec, key, v)) return;
    const char* c = v.text.c_str();
    char* end = nullptr;
    unsigned long long x = std::strtoull(c, &end, 10);
    if (end != c && *end == '\0')
      dst = x;
    else
      errs_.add(v, "key '" + key + "': not an unsigned integer: '" + v.text + "'");
  }

  void get_bool(const std::string& sec, const std::string& key, bool& dst) {
    RawValue v;
    if (!fetch(sec, key, v)) return;
    if (!parse_bool(v.text, dst))
      errs_.add(v, "key '" + key + "': expected true/false: '" + v.text + "'");
  }

  void get_doubles(const std::string& sec, const std::string& key,
                   std::vector<double>& dst) {
    RawValue v;
    if (!fetch(sec, key, v)) return;
    std::vector<double> vals;
    for (const std::string& tok : split_ws(v.text)) {
      double x;
      if (!parse_double(tok, x)) {
        errs_.add(v, "key '" + key + "': not a number: '" + tok + "'");
        return;
      }
      vals.push_back(x);
    }
    if (vals.empty()) {
      errs_.add(v, "key '" + key + "': empty list");
      return;
    }
    dst = vals;
  }

  void get_ints(const std::string& sec, const std::string& key, std::vector<int>& dst) {
    RawValue v;
    if (!fetch(sec, key, v)) return;
    std::vector<int> vals;
    for (const std::string& tok : split_ws(v.text)) {
      long x;
      if (!parse_int(tok, x)) {
        errs_.add(v, "key '" + key + "': not an integer: '" + tok + "'");
        return;
      }
      vals.push_back(static_cast<int>(x));
    }
    if (vals.empty()) {
      errs_.add(v, "key '" + key + "': empty list");
      return;
    }
    dst = vals;
  }

  int line_of(const std::string& sec, const std::string& key) const {
    auto s = raw_.find(sec);
    if (s == raw_.end()) return 0;
    auto k = s->second.find(key);
    return k == s->second.end() ? 0 : k->second.line;
  }

 private:
  const std::map<std::string, std::map<std::string, RawValue>>& raw_;
  ConfigErrors& errs_;
  std::set<std::string>& present_;
};

inline const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> k = {
      {"kernel",
       {"family", "s", "r", "alpha", "alpha1", "alpha2", "axis", "half_angle",
        "halfcone_axis", "halfcone_angle", "b_profile", "b_min", "b_max",
        "alpha_profile", "a_lo", "a_hi"}},
      {"grid", {"d", "n", "spacing", "periodic", "origin"}},
      {"domain",
       {"shape", "lo", "hi", "center", "radius", "g_kind", "g_amplitude", "g_file"}},
      {"rhs",
       {"kind", "amplitude", "center", "width", "mode", "phase", "jump_at", "file"}},
      {"run",
       {"tol", "max_iter", "levels", "p", "lp_evidence", "beta", "seed", "threads",
        "radius_cap", "sphere_order", "cutoff_center", "cutoff_r_in", "cutoff_r_out",
        "suite_count", "band_min", "band_max", "xi_count", "xi_max", "probes"}},
      {"output", {"dir"}},
  };
  return k;
}

}  // namespace detail

// Parses and validates; on any problem throws a usage error whose message
// lists every collected error with its line number.
inline ExperimentConfig parse_config(const std::string& text) {
  detail::ConfigErrors errs;
  std::map<std::string, std::map<std::string, detail::RawValue>> raw;

  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.resize(hash);
    std::string t = detail::trim(line);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']' || t.size() < 3) {
        errs.add(lineno, "malformed section header: '" + t + "'");
        continue;
      }
      section = detail::trim(t.substr(1, t.size() - 2));
      if (detail::known_keys().count(section) == 0)
        errs.add(lineno, "unknown section: '" + section + "'");
      continue;
    }
    std::size_t eq = t.find('=');
    if (eq == std::string::npos) {
      errs.add(lineno, "expected key = value: '" + t + "'");
      continue;
    }
    std::string key = detail::trim(t.substr(0, eq));
    std::string val = detail::trim(t.substr(eq + 1));
    if (section.empty()) {
      errs.add(lineno, "key outside any section: '" + key + "'");
      continue;
    }
    auto ks = detail::known_keys().find(section);
    if (ks != detail::known_keys().end() && ks->second.count(key) == 0) {
      errs.add(lineno, "unknown key in [" + section + "]: '" + key + "'");
      continue;
    }
    if (key.empty()) {
      errs.add(lineno, "empty key");
      continue;
    }
    auto& sec = raw[section];
    if (sec.count(key)) {
      errs.add(lineno, "duplicate key in [" + section + "]: '" + key + "'");
      continue;
    }
    sec[key] = {val, lineno};
  }

  ExperimentConfig cfg;
  detail::ConfigReader rd(raw, errs, cfg.present);

  rd.get_string("kernel", "family", cfg.kernel_family);
  rd.get_double("kernel", "s", cfg.s);
  rd.get_double("kernel", "r", cfg.r);
  rd.get_double("kernel", "alpha", cfg.alpha);
  rd.get_double("kernel", "alpha1", cfg.alpha1);
  rd.get_double("kernel", "alpha2", cfg.alpha2);
  rd.get_doubles("kernel", "axis", cfg.axis);
  rd.get_double("kernel", "half_angle", cfg.half_angle);
  rd.get_doubles("kernel", "halfcone_axis", cfg.halfcone_axis);
  rd.get_double("kernel", "halfcone_angle", cfg.halfcone_angle);
  rd.get_string("kernel", "b_profile", cfg.b_profile);
  rd.get_double("kernel", "b_min", cfg.b_min);
  rd.get_double("kernel", "b_max", cfg.b_max);
  rd.get_string("kernel", "alpha_profile", cfg.alpha_profile);
  rd.get_double("kernel", "a_lo", cfg.a_lo);
  rd.get_double("kernel", "a_hi", cfg.a_hi);

  rd.get_int("grid", "d", cfg.d);
  rd.get_ints("grid", "n", cfg.n);
  rd.get_doubles("grid", "spacing", cfg.spacing);
  rd.get_bool("grid", "periodic", cfg.periodic);
  rd.get_doubles("grid", "origin", cfg.origin);

  rd.get_string("domain", "shape", cfg.shape);
  rd.get_doubles("domain", "lo", cfg.lo);
  rd.get_doubles("domain", "hi", cfg.hi);
  rd.get_doubles("domain", "center", cfg.center);
  rd.get_double("domain", "radius", cfg.radius);
  rd.get_string("domain", "g_kind", cfg.g_kind);
  rd.get_doubles("domain", "g_amplitude", cfg.g_amplitude);
  rd.get_string("domain", "g_file", cfg.g_file);

  rd.get_string("rhs", "kind", cfg.rhs_kind);
  rd.get_doubles("rhs", "amplitude", cfg.amplitude);
  rd.get_doubles("rhs", "center", cfg.rhs_center);
  rd.get_double("rhs", "width", cfg.width);
  rd.get_doubles("rhs", "mode", cfg.mode);
  rd.get_double("rhs", "phase", cfg.phase);
  rd.get_double("rhs", "jump_at", cfg.jump_at);
  rd.get_string("rhs", "file", cfg.rhs_file);

  rd.get_double("run", "tol", cfg.tol);
  rd.get_int("run", "max_iter", cfg.max_iter);
  rd.get_int("run", "levels", cfg.levels);
  rd.get_double("run", "p", cfg.p);
  rd.get_bool("run", "lp_evidence", cfg.lp_evidence);
  rd.get_double("run", "beta", cfg.beta);
  rd.get_u64("run", "seed", cfg.seed);
  rd.get_int("run", "threads", cfg.threads);
  rd.get_double("run", "radius_cap", cfg.radius_cap);
  rd.get_int("run", "sphere_order", cfg.sphere_order);
  rd.get_doubles("run", "cutoff_center", cfg.cutoff_center);
  rd.get_double("run", "cutoff_r_in", cfg.cutoff_r_in);
  rd.get_double("run", "cutoff_r_out", cfg.cutoff_r_out);
  rd.get_int("run", "suite_count", cfg.suite_count);
  rd.get_double("run", "band_min", cfg.band_min);
  rd.get_double("run", "band_max", cfg.band_max);
  rd.get_int("run", "xi_count", cfg.xi_count);
  rd.get_double("run", "xi_max", cfg.xi_max);
  rd.get_int("run", "probes", cfg.probes);

  rd.get_string("output", "dir", cfg.output_dir);

  auto check = [&](bool ok, const std::string& sec, const std::string& key,
                   const std::string& msg) {
    if (!ok && cfg.has(sec + "." + key)) errs.add(rd.line_of(sec, key), msg);
  };

  static const std::set<std::string> families = {
      "fractional_cone", "example1", "example2", "mixed_order", "variable_order"};
  static const std::set<std::string> profiles = {"constant", "ramp", "sine"};
  static const std::set<std::string> shapes = {"all", "box", "ball"};
  static const std::set<std::string> rhs_kinds = {"constant", "gaussian", "mode",
                                                  "jump", "file"};

  check(families.count(cfg.kernel_family) > 0, "kernel", "family",
        "unknown kernel family: '" + cfg.kernel_family + "'");
  check(cfg.s > 0.0 && cfg.s < 1.0, "kernel", "s", "s must lie in (0,1)");
  check(cfg.r > 0.0, "kernel", "r", "r must be positive (or inf)");
  if (cfg.kernel_family == "mixed_order")
    check(cfg.alpha > 0.0 && cfg.alpha < 0.5 * cfg.s, "kernel", "alpha",
          "alpha must lie in (0, s/2)");
  check(cfg.alpha1 > 0.0 && cfg.alpha1 <= cfg.alpha2, "kernel", "alpha1",
        "need 0 < alpha1 <= alpha2");
  check(cfg.half_angle > 0.0 && cfg.half_angle <= M_PI, "kernel", "half_angle",
        "half_angle must lie in (0, pi]");
  check(cfg.halfcone_angle > 0.0 && cfg.halfcone_angle <= M_PI, "kernel",
        "halfcone_angle", "halfcone_angle must lie in (0, pi]");
  check(profiles.count(cfg.b_profile) > 0, "kernel", "b_profile",
        "unknown profile: '" + cfg.b_profile + "'");
  check(profiles.count(cfg.alpha_profile) > 0, "kernel", "alpha_profile",
        "unknown profile: '" + cfg.alpha_profile + "'");
  check(cfg.b_min > 0.0 && cfg.b_min <= cfg.b_max, "kernel", "b_min",
        "need 0 < b_min <= b_max");
  check(cfg.a_lo > 0.0 && cfg.a_lo <= cfg.a_hi && cfg.a_hi < 2.0, "kernel", "a_lo",
        "need 0 < a_lo <= a_hi < 2");

  check(cfg.d >= 1 && cfg.d <= kMaxDim, "grid", "d", "d must be 1, 2, or 3");
  bool d_ok = cfg.d >= 1 && cfg.d <= kMaxDim;
  auto check_len = [&](const std::vector<double>& v, const std::string& sec,
                       const std::string& key) {
    if (d_ok && cfg.has(sec + "." + key) &&
        v.size() != static_cast<std::size_t>(cfg.d) && v.size() != 1)
      errs.add(rd.line_of(sec, key),
               "key '" + key + "': expected 1 or d = " + std::to_string(cfg.d) +
                   " values");
  };
  if (cfg.has("grid.n")) {
    bool ok = cfg.n.size() == static_cast<std::size_t>(cfg.d) || cfg.n.size() == 1;
    if (d_ok && !ok)
      errs.add(rd.line_of("grid", "n"), "key 'n': expected 1 or d values");
    for (int v : cfg.n)
      if (v < 2) {
        errs.add(rd.line_of("grid", "n"), "key 'n': every count must be >= 2");
        break;
      }
  }
  if (cfg.has("grid.spacing")) {
    check_len(cfg.spacing, "grid", "spacing");
    for (double v : cfg.spacing)
      if (!(v > 0.0)) {
        errs.add(rd.line_of("grid", "spacing"), "key 'spacing': must be positive");
        break;
      }
  }
  check_len(cfg.origin, "grid", "origin");
  check_len(cfg.axis, "kernel", "axis");
  check_len(cfg.halfcone_axis, "kernel", "halfcone_axis");
  check_len(cfg.lo, "domain", "lo");
  check_len(cfg.hi, "domain", "hi");
  check_len(cfg.center, "domain", "center");
  check_len(cfg.amplitude, "rhs", "amplitude");
  check_len(cfg.rhs_center, "rhs", "center");
  check_len(cfg.mode, "rhs", "mode");
  check_len(cfg.cutoff_center, "run", "cutoff_center");

  check(shapes.count(cfg.shape) > 0, "domain", "shape",
        "unknown domain shape: '" + cfg.shape + "'");
  if (cfg.shape == "ball")
    check(cfg.radius > 0.0, "domain", "radius", "ball radius must be positive");
  static const std::set<std::string> g_kinds = {"skew", "constant", "file"};
  check(g_kinds.count(cfg.g_kind) > 0, "domain", "g_kind",
        "unknown constraint data kind: '" + cfg.g_kind + "'");
  check_len(cfg.g_amplitude, "domain", "g_amplitude");
  if (cfg.g_kind == "file" && cfg.has("domain.g_kind")) {
    if (!cfg.has("domain.g_file"))
      errs.add(rd.line_of("domain", "g_kind"),
               "constraint data kind 'file' requires key 'g_file'");
    else if (!std::filesystem::exists(cfg.g_file))
      errs.add(rd.line_of("domain", "g_file"),
               "referenced file does not exist: '" + cfg.g_file + "'");
  }

  check(rhs_kinds.count(cfg.rhs_kind) > 0, "rhs", "kind",
        "unknown rhs kind: '" + cfg.rhs_kind + "'");
  check(cfg.width > 0.0, "rhs", "width", "width must be positive");
  if (cfg.rhs_kind == "file") {
    if (!cfg.has("rhs.file"))
      errs.add(rd.line_of("rhs", "kind"), "rhs kind 'file' requires key 'file'");
    else if (!std::filesystem::exists(cfg.rhs_file))
      errs.add(rd.line_of("rhs", "file"),
               "referenced file does not exist: '" + cfg.rhs_file + "'");
  }

  check(cfg.tol > 0.0, "run", "tol", "tol must be positive");
  check(cfg.max_iter >= 0, "run", "max_iter", "max_iter must be >= 0");
  check(cfg.levels >= 1, "run", "levels", "levels must be >= 1");
  check(cfg.p >= 2.0, "run", "p", "p must be >= 2");
  check(cfg.beta >= 0.0, "run", "beta", "beta must be >= 0");
  check(cfg.threads >= 0, "run", "threads", "threads must be >= 0");
  check(cfg.radius_cap > 0.0, "run", "radius_cap", "radius_cap must be positive");
  check(cfg.sphere_order >= 4, "run", "sphere_order", "sphere_order must be >= 4");
  if (cfg.has("run.cutoff_r_in") || cfg.has("run.cutoff_r_out"))
    check(cfg.cutoff_r_out > cfg.cutoff_r_in && cfg.cutoff_r_in > 0.0, "run",
          "cutoff_r_in", "need 0 < cutoff_r_in < cutoff_r_out");
  check(cfg.suite_count >= 1, "run", "suite_count", "suite_count must be >= 1");
  check(cfg.band_min > 0.0 && cfg.band_min <= cfg.band_max, "run", "band_min",
        "need 0 < band_min <= band_max");
  check(cfg.xi_count >= 1, "run", "xi_count", "xi_count must be >= 1");
  check(cfg.xi_max > 0.0, "run", "xi_max", "xi_max must be positive");
  check(cfg.probes >= 1, "run", "probes", "probes must be >= 1");
  check(!cfg.output_dir.empty(), "output", "dir", "output dir must be nonempty");

  if (!errs.items.empty()) {
    std::string msg = "config errors:";
    for (const std::string& e : errs.items) msg += "\n  " + e;
    throw Error(ErrorKind::usage, msg);
  }
  return cfg;
}

inline ExperimentConfig parse_config_file(const std::string& path) {
  return parse_config(read_file_bytes(path));
}

namespace detail {

inline Vec to_vec(const std::vector<double>& v, int d, double fill = 0.0) {
  Vec out(d);
  if (v.empty()) {
    for (int a = 0; a < d; ++a) out[a] = fill;
  } else if (v.size() == 1) {
    for (int a = 0; a < d; ++a) out[a] = v[0];
  } else {
    for (int a = 0; a < d; ++a) out[a] = v[static_cast<std::size_t>(a)];
  }
  return out;
}

// Scalar profile catalog over the first coordinate, mapped into [lo, hi].
inline std::function<double(const Vec&)> profile_fn(const std::string& kind,
                                                    double lo, double hi) {
  if (kind == "constant") return [lo](const Vec&) { return lo; };
  if (kind == "ramp")
    return [lo, hi](const Vec& x) {
      double t = std::min(1.0, std::max(0.0, x[0]));
      return lo + (hi - lo) * t;
    };
  // sine
  return [lo, hi](const Vec& x) {
    double t = 0.5 + 0.5 * std::sin(2.0 * M_PI * x[0]);
    return lo + (hi - lo) * t;
  };
}

}  // namespace detail

inline Grid build_grid(const ExperimentConfig& cfg) {
  require(cfg.has("grid.d"), ErrorKind::usage, "config: [grid] d is required");
  require(cfg.has("grid.n"), ErrorKind::usage, "config: [grid] n is required");
  std::array<int, kMaxDim> n{1, 1, 1};
  for (int a = 0; a < cfg.d; ++a)
    n[static_cast<std::size_t>(a)] =
        cfg.n.size() == 1 ? cfg.n[0] : cfg.n[static_cast<std::size_t>(a)];
  std::array<double, kMaxDim> h{1.0, 1.0, 1.0};
  for (int a = 0; a < cfg.d; ++a) {
    if (cfg.spacing.empty())
      h[static_cast<std::size_t>(a)] = 1.0 / n[static_cast<std::size_t>(a)];
    else
      h[static_cast<std::size_t>(a)] =
          cfg.spacing.size() == 1 ? cfg.spacing[0] : cfg.spacing[static_cast<std::size_t>(a)];
  }
  return Grid(cfg.d, n, h, cfg.periodic, detail::to_vec(cfg.origin, cfg.d));
}

inline KernelSpec build_kernel(const ExperimentConfig& cfg) {
  require(cfg.has("kernel.family"), ErrorKind::usage,
          "config: [kernel] family is required");
  const int d = cfg.d;
  Vec axis = detail::to_vec(cfg.axis, d);
  if (norm(axis) == 0.0) axis[0] = 1.0;
  DoubleCone cone = cfg.half_angle >= M_PI - 1e-15
                        ? DoubleCone::full(d)
                        : DoubleCone{d, {make_cap(axis, cfg.half_angle)}};
  Vec haxis = detail::to_vec(cfg.halfcone_axis, d);
  if (norm(haxis) == 0.0) haxis[0] = 1.0;
  HalfConeSet halfcone{d, {make_cap(haxis, cfg.halfcone_angle)}};

  if (cfg.kernel_family == "fractional_cone")
    return fractional_cone_kernel(d, cfg.s, cone, cfg.r, {}, cfg.alpha1, cfg.alpha2);
  if (cfg.kernel_family == "example1")
    return example1_kernel(d, [](double) { return 1.0; }, cone,
                           std::isfinite(cfg.r) ? cfg.r : 1.0);
  if (cfg.kernel_family == "example2")
    return example2_kernel(d, [](double) { return 1.0; }, halfcone,
                           std::isfinite(cfg.r) ? cfg.r : 1.0);
  if (cfg.kernel_family == "mixed_order")
    return mixed_order_kernel(d, cfg.s, cfg.alpha, cone, halfcone);
  if (cfg.kernel_family == "variable_order")
    return variable_order_kernel(
        d, detail::profile_fn(cfg.b_profile, cfg.b_min, cfg.b_max), cfg.b_min,
        cfg.b_max, detail::profile_fn(cfg.alpha_profile, cfg.a_lo, cfg.a_hi),
        cfg.a_lo, cfg.a_hi);
  throw Error(ErrorKind::usage, "config: unknown kernel family " + cfg.kernel_family);
}

// Analytic right-hand-side catalog as a sampler; 'file' is not analytic and
// is rejected here (refinement studies must resample per level).
inline std::function<Vec(const Vec&)> build_rhs_fn(const ExperimentConfig& cfg, int d) {
  Vec amp = detail::to_vec(cfg.amplitude, d, 1.0);
  if (cfg.rhs_kind == "constant")
    return [amp](const Vec&) { return amp; };
  if (cfg.rhs_kind == "gaussian") {
    Vec c = detail::to_vec(cfg.rhs_center, d);
    double w2 = 2.0 * cfg.width * cfg.width;
    return [amp, c, w2](const Vec& x) {
      Vec dx = x - c;
      return std::exp(-dot(dx, dx) / w2) * amp;
    };
  }
  if (cfg.rhs_kind == "mode") {
    require(cfg.has("rhs.mode"), ErrorKind::usage,
            "config: rhs kind 'mode' requires key 'mode'");
    Vec xi = detail::to_vec(cfg.mode, d);
    double ph = cfg.phase;
    return [amp, xi, ph](const Vec& x) {
      return std::cos(2.0 * M_PI * dot(xi, x) + ph) * amp;
    };
  }
  if (cfg.rhs_kind == "jump") {
    double at = cfg.jump_at;
    return [amp, at](const Vec& x) { return (x[0] < at ? 1.0 : -1.0) * amp; };
  }
  throw Error(ErrorKind::usage,
              "config: rhs kind '" + cfg.rhs_kind + "' is not an analytic catalog entry");
}

inline GridField build_rhs(const ExperimentConfig& cfg, const Grid& g) {
  if (cfg.rhs_kind == "file") return read_nlfd(cfg.rhs_file, g.periodic, g.origin);
  return sample_field(g, g.d, build_rhs_fn(cfg, g.d));
}

// The mask shape as a point predicate, for per-level mask rebuilds.
inline std::function<bool(const Vec&)> build_interior_predicate(
    const ExperimentConfig& cfg, int d) {
  if (cfg.shape == "all") return [](const Vec&) { return true; };
  if (cfg.shape == "box") {
    require(cfg.has("domain.lo") && cfg.has("domain.hi"), ErrorKind::usage,
            "config: box domain requires lo and hi");
    Vec lo = detail::to_vec(cfg.lo, d), hi = detail::to_vec(cfg.hi, d);
    return [lo, hi, d](const Vec& x) {
      for (int a = 0; a < d; ++a)
        if (x[a] <= lo[a] || x[a] >= hi[a]) return false;
      return true;
    };
  }
  require(cfg.has("domain.center") && cfg.has("domain.radius"), ErrorKind::usage,
          "config: ball domain requires center and radius");
  Vec c = detail::to_vec(cfg.center, d);
  double rad = cfg.radius;
  return [c, rad](const Vec& x) { return norm(x - c) < rad; };
}

inline DomainMask build_mask(const ExperimentConfig& cfg, const Grid& g) {
  return DomainMask(g, build_interior_predicate(cfg, g.d));
}

// Constraint data for the nonzero-data problem: a skew-affine (rigid) field,
// a constant field, or an NLFD file.
inline GridField build_constraint_data(const ExperimentConfig& cfg, const Grid& g) {
  const int d = g.d;
  Vec amp = detail::to_vec(cfg.g_amplitude, d, 1.0);
  if (cfg.g_kind == "file") return read_nlfd(cfg.g_file, g.periodic, g.origin);
  if (cfg.g_kind == "constant")
    return sample_field(g, d, [amp](const Vec&) { return amp; });
  // skew: A x + b with A the elementary rotation generator scaled by amp[0]
  Mat A(d);
  if (d >= 2) {
    A(0, 1) = amp[0];
    A(1, 0) = -amp[0];
  }
  Vec b = amp;
  return sample_field(g, d, [A, b](const Vec& x) { return A * x + b; });
}

inline Cutoff build_cutoff(const ExperimentConfig& cfg, const Grid& g) {
  require(cfg.has("run.cutoff_r_in") && cfg.has("run.cutoff_r_out"), ErrorKind::usage,
          "config: cutoff radii are required for this command");
  Vec c = detail::to_vec(cfg.cutoff_center, g.d);
  return quintic_cutoff(c, cfg.cutoff_r_in, cfg.cutoff_r_out);
}

}  // namespace nlelast
