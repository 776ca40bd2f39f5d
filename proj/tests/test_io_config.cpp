#include <cstdlib>
#include <filesystem>
#include <string>

#include <gtest/gtest.h>

#include "nlelast/config.hpp"
#include "nlelast/io.hpp"
#include "nlelast/runner.hpp"

namespace nlelast {
namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag)
      : path(fs::temp_directory_path() / ("nlelast_" + tag)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str() const { return path.string(); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

TEST(Nlfd, RoundTripIsBitwise) {
  Grid g(2, {5, 4, 1}, {0.25, 0.5, 1.0}, false, Vec(2, -1.0, 2.0));
  GridField u(g, 2);
  double specials[] = {0.0, -0.0, 1e-308, -1e308, M_PI, 7.25};
  for (std::size_t i = 0; i < u.data.size(); ++i)
    u.data[i] = specials[i % 6] + static_cast<double>(i) * 1e-3;

  std::string bytes = encode_nlfd(u);
  GridField back = decode_nlfd(bytes, false, Vec(2, -1.0, 2.0));
  EXPECT_EQ(back.grid.d, 2);
  EXPECT_EQ(back.grid.n, g.n);
  EXPECT_EQ(back.grid.h, g.h);
  EXPECT_EQ(back.components, 2);
  EXPECT_DOUBLE_EQ(back.grid.origin[0], -1.0);
  EXPECT_FALSE(back.grid.periodic);
  EXPECT_EQ(back.data, u.data);
  // Re-encoding reproduces the identical byte stream.
  EXPECT_EQ(encode_nlfd(back), bytes);

  // Periodicity and origin are out-of-band: the caller supplies them.
  GridField per = decode_nlfd(bytes, true);
  EXPECT_TRUE(per.grid.periodic);
  EXPECT_DOUBLE_EQ(per.grid.origin[0], 0.0);
}

TEST(Nlfd, DecodeRejectsMalformedStreams) {
  Grid g(1, {4, 1, 1}, {0.25, 1.0, 1.0}, false);
  GridField u(g, 1);
  std::string good = encode_nlfd(u);

  std::string magic = good;
  magic[0] = 'X';
  EXPECT_THROW(decode_nlfd(magic), Error);

  std::string version = good;
  version[4] = 2;  // little-endian u32 version field
  EXPECT_THROW(decode_nlfd(version), Error);

  std::string dim = good;
  dim[8] = 4;
  EXPECT_THROW(decode_nlfd(dim), Error);

  EXPECT_THROW(decode_nlfd(good.substr(0, 10)), Error);
  EXPECT_THROW(decode_nlfd(good.substr(0, good.size() - 8)), Error);
  EXPECT_THROW(decode_nlfd(good + std::string(8, '\0')), Error);

  try {
    decode_nlfd("not a field");
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::usage);
  }
}

TEST(Nlfd, FileRoundTrip) {
  TempDir tmp("nlfd_file");
  Grid g(1, {6, 1, 1}, {0.2, 1.0, 1.0}, true);
  GridField u = random_field(g, 1, 11);
  write_nlfd(tmp.file("u.nlfd"), u);
  GridField back = read_nlfd(tmp.file("u.nlfd"), true);
  EXPECT_EQ(back.data, u.data);
  EXPECT_THROW(read_nlfd(tmp.file("missing.nlfd")), Error);
}

TEST(Hashing, Fnv1a64ReferenceVectors) {
  EXPECT_EQ(fnv1a64("", 0), 0xcbf29ce484222325ull);
  EXPECT_EQ(fnv1a64("a", 1), 0xaf63dc4c8601ec8cull);
  EXPECT_EQ(fnv1a64("foobar", 6), 0x85944171f73967e8ull);
  EXPECT_EQ(fnv1a64_hex(""), "cbf29ce484222325");
  // Zero padding keeps the hex width fixed.
  EXPECT_EQ(fnv1a64_hex("").size(), 16u);
}

TEST(Formatting, SeventeenDigitsRoundTrip) {
  for (double v : {1.0 / 3.0, 0.1, M_PI, -2.5e-308, 6.02e23, 2.0}) {
    std::string s = format_double(v);
    EXPECT_EQ(std::strtod(s.c_str(), nullptr), v) << s;
  }
  EXPECT_EQ(format_double(2.0), "2");
}

TEST(Artifacts, ManifestIsSortedAndDeterministic) {
  Grid g(1, {4, 1, 1}, {0.25, 1.0, 1.0}, false);
  GridField u(g, 1);
  u.at(0, 2) = 1.5;
  Json j;
  j["answer"] = 42;

  auto emit = [&](const std::string& dir) {
    ArtifactWriter out(dir);
    out.write_json("zeta.json", j);
    out.write_csv("alpha.csv", {"a", "b"}, {{1.0, 2.0}, {0.5, 1.0 / 3.0}});
    out.write_field("field.nlfd", u);
    out.write_manifest();
  };

  TempDir ta("manifest_a");
  TempDir tb("manifest_b");
  emit(ta.str());
  emit(tb.str());

  std::string ma = read_file_bytes(ta.file("manifest.json"));
  EXPECT_EQ(ma, read_file_bytes(tb.file("manifest.json")));

  Json m = Json::parse(ma);
  ASSERT_EQ(m["artifacts"].size(), 3u);
  EXPECT_EQ(m["artifacts"][0]["path"], "alpha.csv");
  EXPECT_EQ(m["artifacts"][1]["path"], "field.nlfd");
  EXPECT_EQ(m["artifacts"][2]["path"], "zeta.json");
  for (const auto& item : m["artifacts"]) {
    EXPECT_GT(item["bytes"].get<std::size_t>(), 0u);
    EXPECT_EQ(item["fnv1a64"].get<std::string>().size(), 16u);
  }

  ArtifactWriter bad(ta.str());
  EXPECT_THROW(bad.write_csv("bad.csv", {"a", "b"}, {{1.0}}), Error);
}

TEST(Config, HappyPathAndBuilders) {
  const std::string text = R"(# experiment
[kernel]
family = fractional_cone
s = 0.5            ; inline comment
r = 2.0
[grid]
d = 2
n = 24
spacing = 0.05
periodic = true
origin = -0.6
[rhs]
kind = mode
mode = 1 2
amplitude = 1.0 0.5
[run]
tol = 1e-8
seed = 99
[output]
dir = outdir
)";
  ExperimentConfig cfg = parse_config(text);
  EXPECT_TRUE(cfg.has("kernel.family"));
  EXPECT_TRUE(cfg.has("grid.periodic"));
  EXPECT_FALSE(cfg.has("run.beta"));
  EXPECT_DOUBLE_EQ(cfg.tol, 1e-8);
  EXPECT_EQ(cfg.seed, 99u);
  EXPECT_EQ(cfg.output_dir, "outdir");

  Grid g = build_grid(cfg);
  EXPECT_EQ(g.d, 2);
  EXPECT_EQ(g.n[0], 24);
  EXPECT_EQ(g.n[1], 24);  // scalar n broadcasts over axes
  EXPECT_DOUBLE_EQ(g.h[1], 0.05);
  EXPECT_DOUBLE_EQ(g.origin[1], -0.6);
  EXPECT_TRUE(g.periodic);

  KernelSpec k = build_kernel(cfg);
  EXPECT_EQ(k.family, KernelFamily::fractional_cone);
  EXPECT_DOUBLE_EQ(k.s, 0.5);
  EXPECT_DOUBLE_EQ(k.r, 2.0);

  GridField f = build_rhs(cfg, g);
  // f(x) = cos(2 pi (x0 + 2 x1)) (1, 0.5) at the origin sample point.
  std::size_t i0 = 0;
  Vec x0 = g.point(static_cast<int64_t>(i0));
  double expect = std::cos(2.0 * M_PI * (x0[0] + 2.0 * x0[1]));
  EXPECT_NEAR(f.at(0, i0), expect, 1e-15);
  EXPECT_NEAR(f.at(1, i0), 0.5 * expect, 1e-15);
}

TEST(Config, DefaultSpacingAndProfiles) {
  ExperimentConfig cfg = parse_config(R"(
[kernel]
family = variable_order
b_profile = ramp
b_min = 1.0
b_max = 2.0
alpha_profile = constant
a_lo = 0.5
a_hi = 0.5
[grid]
d = 1
n = 16
)");
  Grid g = build_grid(cfg);
  EXPECT_DOUBLE_EQ(g.h[0], 1.0 / 16.0);  // spacing defaults to 1/n
  KernelSpec k = build_kernel(cfg);
  EXPECT_EQ(k.family, KernelFamily::variable_order);
  EXPECT_DOUBLE_EQ(k.b(Vec(1, 0.25)), 1.25);
  EXPECT_DOUBLE_EQ(k.b(Vec(1, 2.0)), 2.0);  // ramp clamps outside [0,1]
  EXPECT_DOUBLE_EQ(k.alpha_x(Vec(1, 0.7)), 0.5);
}

TEST(Config, ErrorsAreCollectedWithLineNumbers) {
  const std::string text = R"([kernel]
family = fractional_cone
s = 1.5
bogus = 1
s = 0.5
[grid]
d = 1
n = 1
spacing = -0.5
[run]
p = 1.5
tol = abc
)";
  try {
    parse_config(text);
    FAIL() << "expected config errors";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::usage);
    std::string msg = e.what();
    EXPECT_NE(msg.find("line 3: "), std::string::npos) << msg;
    EXPECT_NE(msg.find("s must lie in (0,1)"), std::string::npos);
    EXPECT_NE(msg.find("line 4: "), std::string::npos);
    EXPECT_NE(msg.find("unknown key in [kernel]: 'bogus'"), std::string::npos);
    EXPECT_NE(msg.find("line 5: "), std::string::npos);
    EXPECT_NE(msg.find("duplicate key"), std::string::npos);
    EXPECT_NE(msg.find("line 8: "), std::string::npos);
    EXPECT_NE(msg.find(">= 2"), std::string::npos);
    EXPECT_NE(msg.find("line 9: "), std::string::npos);
    EXPECT_NE(msg.find("line 11: "), std::string::npos);
    EXPECT_NE(msg.find("line 12: "), std::string::npos);
    EXPECT_NE(msg.find("not a number: 'abc'"), std::string::npos);
  }
}

TEST(Config, StructuralAndSemanticRejections) {
  EXPECT_THROW(parse_config("[kernel\nfamily = example1\n"), Error);
  EXPECT_THROW(parse_config("key = 1\n"), Error);  // outside any section
  EXPECT_THROW(parse_config("[kernel]\njust a token\n"), Error);
  EXPECT_THROW(parse_config("[nonsense]\nx = 1\n"), Error);

  // Mixed-order exponent constraint alpha < s/2.
  EXPECT_THROW(parse_config(R"(
[kernel]
family = mixed_order
s = 0.5
alpha = 0.3
)"),
               Error);

  // rhs file reference must exist at parse time.
  EXPECT_THROW(parse_config(R"(
[rhs]
kind = file
file = /nonexistent/path.nlfd
)"),
               Error);

  // file kind without the file key.
  EXPECT_THROW(parse_config("[rhs]\nkind = file\n"), Error);

  // cutoff radii ordering.
  EXPECT_THROW(parse_config("[run]\ncutoff_r_in = 0.4\ncutoff_r_out = 0.2\n"), Error);

  // Vector length must be 1 or d.
  EXPECT_THROW(parse_config("[grid]\nd = 2\nn = 8 8 8\n"), Error);
}

TEST(Config, BuilderGuardsAndCatalog) {
  ExperimentConfig cfg = parse_config("[grid]\nd = 1\nn = 8\n");
  EXPECT_THROW(build_kernel(cfg), Error);  // family is required

  ExperimentConfig nogrid = parse_config("[kernel]\nfamily = example1\n");
  EXPECT_THROW(build_grid(nogrid), Error);

  ExperimentConfig jump = parse_config(R"(
[grid]
d = 1
n = 8
[rhs]
kind = jump
amplitude = 2.0
jump_at = 0.5
)");
  auto f = build_rhs_fn(jump, 1);
  EXPECT_DOUBLE_EQ(f(Vec(1, 0.2))[0], 2.0);
  EXPECT_DOUBLE_EQ(f(Vec(1, 0.8))[0], -2.0);

  ExperimentConfig nomode = parse_config("[rhs]\nkind = mode\n");
  EXPECT_THROW(build_rhs_fn(nomode, 1), Error);

  ExperimentConfig filerhs = parse_config("[grid]\nd = 1\nn = 8\n");
  filerhs.rhs_kind = "file";
  EXPECT_THROW(build_rhs_fn(filerhs, 1), Error);  // not analytic

  ExperimentConfig box = parse_config(R"(
[grid]
d = 1
n = 8
[domain]
shape = box
lo = 0.0
hi = 1.0
)");
  auto pred = build_interior_predicate(box, 1);
  EXPECT_TRUE(pred(Vec(1, 0.5)));
  EXPECT_FALSE(pred(Vec(1, 0.0)));  // strict inequality at the face
  EXPECT_FALSE(pred(Vec(1, 1.0)));

  ExperimentConfig skew = parse_config(R"(
[grid]
d = 2
n = 9
spacing = 0.125
[domain]
g_kind = skew
g_amplitude = 0.5
)");
  Grid g2 = build_grid(skew);
  GridField gd = build_constraint_data(skew, g2);
  EXPECT_TRUE(rigid_motion_test(gd, 1e-10).is_rigid);
  EXPECT_NEAR(gd.at(0, 0), 0.5 * g2.point(0)[1] + 0.5, 1e-15);

  ExperimentConfig nocut = parse_config("[grid]\nd = 1\nn = 8\n");
  EXPECT_THROW(build_cutoff(nocut, build_grid(nocut)), Error);
}

TEST(Runner, ExitCodeMapping) {
  EXPECT_EQ(exit_code_for(ErrorKind::usage), 1);
  EXPECT_EQ(exit_code_for(ErrorKind::hypothesis), 2);
  EXPECT_EQ(exit_code_for(ErrorKind::nonconvergence), 3);
  EXPECT_EQ(exit_code_for(ErrorKind::internal), 4);
}

TEST(Runner, CheckKernelSmoke) {
  TempDir tmp("runner_check");
  ExperimentConfig cfg = parse_config(R"(
[kernel]
family = example1
[grid]
d = 1
n = 16
[run]
probes = 2
)");
  RunOptions opt;
  opt.subcommand = "check-kernel";
  opt.output_dir = tmp.str();
  EXPECT_EQ(run(cfg, opt), 0);
  EXPECT_TRUE(fs::exists(tmp.path / "check_kernel.json"));
  EXPECT_TRUE(fs::exists(tmp.path / "manifest.json"));
  Json j = Json::parse(read_file_bytes(tmp.file("check_kernel.json")));
  EXPECT_EQ(j["family"], "integrable_cone");
  EXPECT_GT(j["second_moment"].get<double>(), 0.0);
  EXPECT_TRUE(j["symmetric"].get<bool>());

  opt.subcommand = "no-such-command";
  EXPECT_EQ(run(cfg, opt), 1);
}

TEST(Runner, SolvePeriodicArtifactsAreDeterministic) {
  const std::string text = R"(
[kernel]
family = fractional_cone
s = 0.5
[grid]
d = 1
n = 32
spacing = 0.03125
periodic = true
[rhs]
kind = mode
mode = 2
)";
  ExperimentConfig cfg = parse_config(text);
  TempDir ta("runner_sp_a");
  TempDir tb("runner_sp_b");
  RunOptions opt;
  opt.subcommand = "solve-periodic";
  opt.output_dir = ta.str();
  EXPECT_EQ(run(cfg, opt), 0);
  opt.output_dir = tb.str();
  EXPECT_EQ(run(cfg, opt), 0);

  for (const char* name : {"solution.nlfd", "report.json", "manifest.json"}) {
    ASSERT_TRUE(fs::exists(ta.path / name)) << name;
    EXPECT_EQ(read_file_bytes(ta.file(name)), read_file_bytes(tb.file(name))) << name;
  }
  Json rep = Json::parse(read_file_bytes(ta.file("report.json")));
  EXPECT_LE(rep["residual_norm"].get<double>(), 1e-10);
  EXPECT_EQ(rep["iterations"].get<int>(), 1);

  // The same command on a bounded grid is a usage error: exit code 1.
  ExperimentConfig bounded = parse_config(R"(
[kernel]
family = fractional_cone
s = 0.5
[grid]
d = 1
n = 32
spacing = 0.03125
[rhs]
kind = mode
mode = 2
)");
  TempDir tc("runner_sp_c");
  opt.output_dir = tc.str();
  EXPECT_EQ(run(bounded, opt), 1);
}

TEST(Runner, NonconvergenceMapsToExitThree) {
  TempDir tmp("runner_iter");
  ExperimentConfig cfg = parse_config(R"(
[kernel]
family = example1
[grid]
d = 1
n = 49
spacing = 0.0625
origin = -1.0
[domain]
shape = box
lo = 0.0
hi = 1.0
[rhs]
kind = mode
mode = 1
[run]
tol = 1e-14
max_iter = 1
)");
  RunOptions opt;
  opt.subcommand = "solve-dirichlet";
  opt.output_dir = tmp.str();
  EXPECT_EQ(run(cfg, opt), 3);
}

}  // namespace
}  // namespace nlelast
