#pragma once

// Subcommand dispatch for the CLI: builds objects from a validated config,
// runs the requested computation, writes artifacts (NLFD fields, JSON
// reports, CSV tables, manifest.json), and maps error kinds to exit codes.
// Artifact bytes are deterministic; volatile measurements (wall time) go to
// stdout only.

#include <cstdint>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "nlelast/checks.hpp"
#include "nlelast/config.hpp"
#include "nlelast/diagnostics.hpp"
#include "nlelast/io.hpp"
#include "nlelast/solver.hpp"
#include "nlelast/symbol.hpp"
#include "nlelast/threads.hpp"

namespace nlelast {

struct RunOptions {
  std::string subcommand;
  std::string output_dir;  // overrides the config when nonempty
  int threads = 0;         // overrides the config when positive
  std::uint64_t seed = 0;  // overrides the config when seed_set
  bool seed_set = false;
};

inline int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::usage: return 1;
    case ErrorKind::hypothesis: return 2;
    case ErrorKind::nonconvergence: return 3;
    case ErrorKind::internal: return 4;
  }
  return 4;
}

namespace detail {

inline int resolve_threads(const ExperimentConfig& cfg, const RunOptions& opt) {
  if (opt.threads > 0) return opt.threads;
  if (cfg.threads > 0) return cfg.threads;
  return default_thread_count();
}

inline SolverOptions solver_options(const ExperimentConfig& cfg, int threads) {
  SolverOptions s;
  s.tol = cfg.tol;
  s.max_iter = cfg.max_iter;
  s.sphere_order = cfg.sphere_order;
  s.op.radius_cap = cfg.radius_cap;
  s.op.threads = threads;
  return s;
}

inline Json solve_report_json(const SolveReport& rep) {
  Json j;
  j["residual_norm"] = rep.residual_norm;
  j["iterations"] = rep.iterations;
  j["energy"] = rep.energy;
  j["seminorm"] = rep.seminorm;
  Json c;
  for (const auto& [key, value] : rep.constants) c[key] = value;
  j["constants"] = c;
  return j;
}

inline void finish_solve(ArtifactWriter& out, const SolveReport& rep,
                         const std::string& report_name) {
  out.write_field("solution.nlfd", rep.solution);
  out.write_json(report_name, solve_report_json(rep));
  out.write_manifest();
  std::cout << "wall_time_s=" << rep.wall_time << "\n";
  std::cout << "artifacts=" << out.dir() << "\n";
}

inline std::vector<Vec> sample_probes(const Grid& g, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Vec> probes;
  for (int i = 0; i < count; ++i) {
    Vec x(g.d);
    for (int a = 0; a < g.d; ++a) {
      std::uniform_real_distribution<double> u(
          g.origin[a], g.origin[a] + g.box_length(a));
      x[a] = u(rng);
    }
    probes.push_back(x);
  }
  return probes;
}

inline Vec random_frequency(int d, double ximax, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-ximax, ximax);
  Vec xi(d);
  do {
    for (int a = 0; a < d; ++a) xi[a] = u(rng);
  } while (norm(xi) < 1e-3 * ximax);
  return xi;
}

inline int run_dispatch(const ExperimentConfig& cfg, const RunOptions& opt) {
  const int threads = resolve_threads(cfg, opt);
  const std::uint64_t seed = opt.seed_set ? opt.seed : cfg.seed;
  const std::string outdir = opt.output_dir.empty() ? cfg.output_dir : opt.output_dir;
  const std::string& cmd = opt.subcommand;
  SolverOptions sopt = solver_options(cfg, threads);

  if (cmd == "check-kernel") {
    Grid g = build_grid(cfg);
    KernelSpec k = build_kernel(cfg);
    HypothesisReport rep = check_kernel(k, sample_probes(g, cfg.probes, seed));
    ArtifactWriter out(outdir);
    Json j;
    j["family"] = family_name(k);
    j["second_moment"] = rep.second_moment;
    Json c1, c2;
    for (const auto& [eps, v] : rep.c1) c1[format_double(eps)] = v;
    for (const auto& [eps, v] : rep.c2_min_eig) c2[format_double(eps)] = v;
    j["c1"] = c1;
    j["c2_min_eig"] = c2;
    j["a2"] = rep.a2;
    j["symmetric"] = rep.symmetric;
    j["pk_applicable"] = rep.pk_applicable;
    j["pk_note"] = rep.pk_note;
    j["notes"] = rep.notes;
    out.write_json("check_kernel.json", j);
    out.write_manifest();
    std::cout << "artifacts=" << out.dir() << "\n";
    return 0;
  }

  if (cmd == "symbol") {
    KernelSpec k = build_kernel(cfg);
    const int d = cfg.d;
    SymbolOptions so;
    so.sphere_order = cfg.sphere_order;
    std::mt19937_64 rng(seed);
    std::vector<std::string> header;
    for (int a = 0; a < d; ++a) header.push_back("xi" + std::to_string(a));
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        header.push_back("M" + std::to_string(a) + std::to_string(b));
    for (int a = 0; a < d; ++a) header.push_back("eig" + std::to_string(a));
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < cfg.xi_count; ++i) {
      Vec xi = random_frequency(d, cfg.xi_max, rng);
      Mat m = compute_symbol_matrix(k, xi, so);
      auto eig = sym_eigenvalues(m);
      std::vector<double> row;
      for (int a = 0; a < d; ++a) row.push_back(xi[a]);
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) row.push_back(m(a, b));
      for (int a = 0; a < d; ++a) row.push_back(eig[static_cast<std::size_t>(a)]);
      rows.push_back(row);
    }
    ArtifactWriter out(outdir);
    out.write_csv("symbol.csv", header, rows);
    Json j;
    j["family"] = family_name(k);
    j["d"] = d;
    j["s"] = k.s;
    j["count"] = cfg.xi_count;
    out.write_json("symbol.json", j);
    out.write_manifest();
    std::cout << "artifacts=" << out.dir() << "\n";
    return 0;
  }

  if (cmd == "solve-periodic") {
    Grid g = build_grid(cfg);
    require(g.periodic, ErrorKind::usage, "solve-periodic: grid must be periodic");
    KernelSpec k = build_kernel(cfg);
    GridField f = build_rhs(cfg, g);
    SolveReport rep = solve_periodic(k, f, sopt);
    ArtifactWriter out(outdir);
    finish_solve(out, rep, "report.json");
    return 0;
  }

  if (cmd == "solve-dirichlet" || cmd == "solve-shifted" || cmd == "solve-nonzero") {
    Grid g = build_grid(cfg);
    KernelSpec k = build_kernel(cfg);
    DomainMask mask = build_mask(cfg, g);
    GridField f = build_rhs(cfg, g);
    SolveReport rep;
    if (cmd == "solve-dirichlet") {
      rep = solve_dirichlet(k, f, mask, sopt);
    } else if (cmd == "solve-shifted") {
      require(cfg.beta > 0.0, ErrorKind::usage,
              "solve-shifted: [run] beta must be positive");
      rep = solve_dirichlet_shifted(k, cfg.beta, f, mask, sopt);
    } else {
      GridField gdata = build_constraint_data(cfg, g);
      rep = solve_nonzero_data(k, f, gdata, mask, sopt);
    }
    ArtifactWriter out(outdir);
    finish_solve(out, rep, "report.json");
    return 0;
  }

  if (cmd == "korn") {
    Grid g = build_grid(cfg);
    require(g.periodic, ErrorKind::usage, "korn: grid must be periodic");
    KernelSpec k = build_kernel(cfg);
    auto suite = korn_field_suite(g, cfg.suite_count, cfg.band_min, cfg.band_max, seed);
    OperatorOptions op;
    op.radius_cap = cfg.radius_cap;
    op.threads = threads;
    KornReport rep = korn_equivalence(k, suite, op);
    ArtifactWriter out(outdir);
    Json j;
    j["C1_est"] = rep.C1_est;
    j["C2_est"] = rep.C2_est;
    j["beta_r"] = rep.beta_r;
    j["fields_tested"] = rep.fields_tested;
    j["worst_case_field"] = rep.worst_case_field;
    out.write_json("korn.json", j);
    out.write_manifest();
    std::cout << "artifacts=" << out.dir() << "\n";
    return 0;
  }

  if (cmd == "pk") {
    Grid g = build_grid(cfg);
    KernelSpec k = build_kernel(cfg);
    DomainMask mask = build_mask(cfg, g);
    OperatorOptions op;
    op.radius_cap = cfg.radius_cap;
    op.threads = threads;
    double cp = pk_constant(k, mask, op);
    ArtifactWriter out(outdir);
    Json j;
    j["c_p"] = cp;
    j["interior_points"] = mask.interior_count;
    out.write_json("pk.json", j);
    out.write_manifest();
    std::cout << "artifacts=" << out.dir() << "\n";
    return 0;
  }

  if (cmd == "regularity") {
    Grid g = build_grid(cfg);
    require(!g.periodic, ErrorKind::usage, "regularity: grid must be bounded");
    KernelSpec k = build_kernel(cfg);
    RegularityStudyOptions ropt;
    ropt.levels = cfg.levels;
    ropt.lp_evidence = cfg.lp_evidence;
    ropt.solve = sopt;
    RegularityReport rep = interior_regularity_study(
        k, build_rhs_fn(cfg, g.d), build_interior_predicate(cfg, g.d),
        build_cutoff(cfg, g), cfg.p, g, ropt);
    ArtifactWriter out(outdir);
    std::vector<std::vector<double>> rows;
    for (const auto& lev : rep.levels)
      rows.push_back({static_cast<double>(lev.level), lev.h, lev.local_norm,
                      lev.f_norm, lev.ratio});
    out.write_csv("regularity.csv", {"level", "h", "local_norm", "f_norm", "ratio"},
                  rows);
    Json j;
    j["s"] = rep.s;
    j["p"] = rep.p;
    j["cutoff_id"] = rep.cutoff_id;
    j["local_norm"] = rep.local_norm;
    j["f_norm"] = rep.f_norm;
    j["ratio"] = rep.ratio;
    j["bounded"] = rep.bounded;
    out.write_json("regularity.json", j);
    out.write_manifest();
    std::cout << "artifacts=" << out.dir() << "\n";
    return 0;
  }

  throw Error(ErrorKind::usage, "unknown subcommand: " + cmd);
}

}  // namespace detail

// Runs one subcommand against a validated config. Errors are printed to
// stderr and mapped to exit codes: 1 usage, 2 hypothesis violation,
// 3 nonconvergence, 4 internal.
inline int run(const ExperimentConfig& cfg, const RunOptions& opt) {
  try {
    return detail::run_dispatch(cfg, opt);
  } catch (const Error& e) {
    std::cerr << "error (" << error_kind_name(e.kind()) << "): " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error (internal): " << e.what() << "\n";
    return exit_code_for(ErrorKind::internal);
  }
}

}  // namespace nlelast
