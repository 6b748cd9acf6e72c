#include "doctest.h"

#include "mildns/harness.hpp"
#include "json.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace mildns;
namespace fs = std::filesystem;

namespace {

std::string parse_failure(const std::string& text) {
  try {
    parse_config(text);
  } catch (const std::invalid_argument& e) {
    return e.what();
  }
  return "";  // no throw: callers CHECK the message is non-empty
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "mildns-tests" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("config parsing fills every section") {
  const std::string text = R"({
    "domain": {"d": 2, "box_length": 6.283185307179586, "grid_points": 16},
    "time_grid": {"delta": 0.5, "segments": 10, "grading": 1.5},
    "picard": {"max_iterations": 9, "contraction_tolerance": 1e-8,
               "blowup_threshold": 50.0, "control": {"p": 4, "q": 4, "n": 1}},
    "initial_data": {"kind": "random_divfree", "amplitude": 0.2, "spectral_decay": 3.0, "seed": 77},
    "norms": [{"p": "inf", "q": 2, "delta": 0.25}, {"p": 4, "q": 4, "m": 1, "n": 2}],
    "rate_fits": [{"order": 1, "q": 2, "t_lo": 0.01, "t_hi": 0.4}],
    "march": {"t_final": 2.0, "steps": 64},
    "output_directory": "somewhere"
  })";
  const ExperimentConfig cfg = parse_config(text);
  CHECK(cfg.domain.d == 2);
  CHECK(cfg.domain.grid_points == 16);
  CHECK(cfg.solver.delta == 0.5);
  CHECK(cfg.solver.segments == 10);
  CHECK(cfg.solver.grading == 1.5);
  CHECK(cfg.solver.max_iterations == 9);
  CHECK(cfg.solver.contraction_tolerance == 1e-8);
  CHECK(cfg.solver.blowup_threshold == 50.0);
  CHECK(cfg.solver.control_p == 4.0);
  CHECK(cfg.solver.control_n == 1);
  REQUIRE(cfg.initial_data.has_value());
  const auto* rd = std::get_if<RandomDivfreeData>(&*cfg.initial_data);
  REQUIRE(rd != nullptr);
  CHECK(rd->amplitude == 0.2);
  CHECK(rd->spectral_decay == 3.0);
  CHECK(rd->seed == 77);
  REQUIRE(cfg.norm_specs.size() == 2);
  CHECK(cfg.norm_specs[0].p == inf);
  CHECK(cfg.norm_specs[0].delta == 0.25);
  CHECK(cfg.norm_specs[1].m == 1);
  CHECK(cfg.norm_specs[1].delta == 0.5);  // defaults to the solver horizon
  REQUIRE(cfg.rate_fits.size() == 1);
  CHECK(cfg.rate_fits[0].t_hi == 0.4);
  REQUIRE(cfg.march.has_value());
  CHECK(cfg.march->steps == 64);
  CHECK(cfg.output_directory == "somewhere");
}

TEST_CASE("config parsing is strict") {
  const std::string base = R"({"domain": {"d": 2, "box_length": 6.28, "grid_points": 16},
                               "initial_data": {"kind": "taylor_green"}})";
  CHECK(parse_config(base).norm_specs.empty());

  CHECK(contains(parse_failure(R"({"domain": {"d": 2, "box_length": 6.28, "grid_points": 16},
                                   "initial_data": {"kind": "taylor_green"}, "frobnicate": 1})"),
                 "unknown key 'frobnicate'"));
  CHECK(contains(parse_failure(R"({"domain": {"d": 2, "box_length": 6.28, "grid_points": 16}})"),
                 "initial_data"));
  CHECK(contains(parse_failure(R"({"domain": {"d": 2, "box_length": 6.28, "grid_points": 16},
                                   "initial_data": {"kind": "taylor_green", "seed": 3}})"),
                 "does not apply"));
  CHECK(contains(parse_failure(R"({"domain": {"d": 2, "box_length": 6.28, "grid_points": 16},
                                   "initial_data": {"kind": "warp_field"}})"),
                 "unknown initial_data kind"));
  CHECK(contains(parse_failure("{not json"), "parse error"));
  CHECK(contains(parse_failure(R"({"domain": {"d": 2, "box_length": 6.28},
                                   "initial_data": {"kind": "taylor_green"}})"),
                 "grid_points"));
}

TEST_CASE("trajectory files round trip bit exactly") {
  const fs::path dir = fresh_dir("io");
  const Domain dom(2, 4 * pi, 16);
  const TimeGrid grid(0.75, 5, 1.5);
  const Trajectory u =
      heat_trajectory(make_initial_data(dom, RandomDivfreeData{0.4, 2.0, 99}), grid);

  const std::string path = (dir / "u.traj").string();
  write_trajectory(path, u);
  const Trajectory v = read_trajectory(path);

  CHECK(v.dom() == dom);
  CHECK(v.grid.grading == grid.grading);
  REQUIRE(v.grid.nodes == grid.nodes);
  REQUIRE(v.nodes() == u.nodes());
  for (int i = 0; i < u.nodes(); ++i)
    for (int c = 0; c < dom.d; ++c) CHECK(v.states[i].comp[c] == u.states[i].comp[c]);

  // single fields ride the same format
  const std::string fpath = (dir / "a.field").string();
  write_field(fpath, u.states[0]);
  const VectorField b = read_field(fpath);
  CHECK(b.comp == u.states[0].comp);
  // a one-node file is not a usable trajectory
  CHECK_THROWS_AS(read_trajectory(fpath), std::runtime_error);
}

TEST_CASE("trajectory reader rejects corrupt files") {
  const fs::path dir = fresh_dir("io-bad");
  {
    std::ofstream os(dir / "garbage.traj", std::ios::binary);
    os << "NOTATRAJ and some more bytes to get past the header reads";
  }
  CHECK_THROWS_WITH_AS(read_trajectory((dir / "garbage.traj").string()),
                       "not a trajectory file (bad magic)", std::runtime_error);

  const Domain dom(2, 2 * pi, 16);
  const Trajectory u = heat_trajectory(make_initial_data(dom, RandomDivfreeData{0.4, 2.0, 1}),
                                       TimeGrid(0.5, 3, 1.0));
  write_trajectory((dir / "ok.traj").string(), u);
  const std::string whole = slurp(dir / "ok.traj");
  {
    std::ofstream os(dir / "cut.traj", std::ios::binary);
    os << whole.substr(0, whole.size() / 2);
  }
  CHECK_THROWS_AS(read_trajectory((dir / "cut.traj").string()), std::runtime_error);
  CHECK_THROWS_AS(read_trajectory((dir / "missing.traj").string()), std::runtime_error);
}

TEST_CASE("random data is deterministic in the seed") {
  const Domain dom(3, 2 * pi, 16);
  const VectorField a = make_initial_data(dom, RandomDivfreeData{0.3, 2.0, 5});
  const VectorField b = make_initial_data(dom, RandomDivfreeData{0.3, 2.0, 5});
  const VectorField c = make_initial_data(dom, RandomDivfreeData{0.3, 2.0, 6});
  CHECK(a.comp == b.comp);
  CHECK(a.comp != c.comp);
}

TEST_CASE("random data satisfies the advertised constraints") {
  for (int d : {2, 3}) {
    const Domain dom(d, 2 * pi, 16);
    const VectorField a = make_initial_data(dom, RandomDivfreeData{0.3, 2.0, 11});
    CHECK(divergence_linf_coeff(a) < 1e-13);
    CHECK(a.is_mean_free());
    CHECK(max_conjugate_asymmetry(a) < 1e-15);
    CHECK(lebesgue_norm(a, real(d)) == doctest::Approx(0.3).epsilon(1e-12));
    // unpaired planes carry nothing
    for_each_mode(dom, [&](std::size_t idx, const std::array<int, 3>& m) {
      if (m[0] == -8 || m[1] == -8 || (d == 3 && m[2] == -8))
        for (int cc = 0; cc < d; ++cc) CHECK(a.comp[cc][idx] == cplx(0.0, 0.0));
    });
  }
}

TEST_CASE("singular profile data") {
  const Domain dom(2, 2 * pi, 32);
  SingularLdData sd;
  sd.alpha = 0.9;
  sd.mollification_radius = 0.4;
  sd.amplitude = 0.8;
  sd.center = {2.0, 3.0, 0.0};
  const VectorField a = make_initial_data(dom, sd);

  CHECK(divergence_linf_coeff(a) < 1e-12);
  CHECK(a.is_mean_free());
  CHECK(max_conjugate_asymmetry(a) < 1e-13);
  CHECK(lebesgue_norm(a, 2.0) == doctest::Approx(0.8).epsilon(1e-12));

  // the magnitude peaks near the requested center
  const std::vector<real> mag = magnitude_samples(a);
  std::size_t best = 0;
  for (std::size_t i = 1; i < mag.size(); ++i)
    if (mag[i] > mag[best]) best = i;
  const int n = dom.grid_points;
  const real h = dom.spacing();
  const real x0 = real(best / n) * h, x1 = real(best % n) * h;
  auto dist = [&](real x, real c) {
    real r = std::fmod(std::abs(x - c), dom.box_length);
    return std::min(r, dom.box_length - r);
  };
  CHECK(dist(x0, 2.0) < 0.5);
  CHECK(dist(x1, 3.0) < 0.5);

  SingularLdData bad = sd;
  bad.alpha = 1.5;
  CHECK_THROWS_AS(make_initial_data(dom, bad), std::invalid_argument);
  bad = sd;
  bad.mollification_radius = 0.01;  // below the grid spacing
  CHECK_THROWS_AS(make_initial_data(dom, bad), std::invalid_argument);
}

TEST_CASE("experiment run produces a reproducible report") {
  const fs::path dir1 = fresh_dir("run1");
  const fs::path dir2 = fresh_dir("run2");
  auto config = [&](const fs::path& dir) {
    std::ostringstream ss;
    ss << R"({"domain": {"d": 2, "box_length": 6.283185307179586, "grid_points": 16},
              "time_grid": {"delta": 1.0, "segments": 8, "grading": 2.0},
              "initial_data": {"kind": "taylor_green"},
              "norms": [{"p": 4, "q": 4, "n": 1}],
              "rate_fits": [{"order": 1, "q": 2}],
              "output_directory": ")"
       << dir.string() << R"("})";
    return parse_config(ss.str());
  };

  const ExperimentOutcome out = run_experiment(config(dir1));
  CHECK(out.exit_code == 0);
  CHECK(out.status == SolveStatus::converged);
  CHECK(fs::exists(dir1 / "report.json"));
  CHECK(fs::exists(dir1 / "picard.csv"));
  CHECK(fs::exists(dir1 / "timeseries.csv"));
  CHECK(fs::exists(dir1 / "norms.csv"));
  CHECK(fs::exists(dir1 / "rates.csv"));

  const Trajectory u = read_trajectory((dir1 / "solution.traj").string());
  CHECK(u.nodes() == 9);

  const nlohmann::json report = nlohmann::json::parse(slurp(dir1 / "report.json"));
  CHECK(report["exit_code"] == 0);
  CHECK(report["status"] == "converged");
  CHECK(report["initial_data"]["kind"] == "taylor_green");
  CHECK(report["picard"]["iterations"].get<int>() >= 1);
  CHECK(report["norms"][0]["value"].get<real>() > 0.0);

  run_experiment(config(dir2));
  for (const char* f : {"report.json", "picard.csv", "timeseries.csv", "norms.csv", "rates.csv"})
    CHECK(slurp(dir1 / f) == slurp(dir2 / f));
}

TEST_CASE("experiment run reports failure modes in the exit code") {
  // no contraction at huge amplitude
  const fs::path dir = fresh_dir("run-big");
  ExperimentConfig cfg;
  cfg.domain = Domain(2, 2 * pi, 16);
  cfg.solver.segments = 8;
  cfg.solver.max_iterations = 6;
  cfg.initial_data = RandomDivfreeData{40.0, 1.0, 13};
  cfg.output_directory = dir.string();
  const ExperimentOutcome big = run_experiment(cfg);
  CHECK(big.exit_code == 2);
  CHECK(big.status != SolveStatus::converged);
  CHECK(fs::exists(dir / "report.json"));

  // invalid data parameters are a validation failure, not a crash
  const fs::path dir_bad = fresh_dir("run-bad");
  ExperimentConfig badcfg;
  badcfg.domain = Domain(2, 2 * pi, 16);
  badcfg.initial_data = SingularLdData{2.0, 0.4, 1.0, {0, 0, 0}};
  badcfg.output_directory = dir_bad.string();
  const ExperimentOutcome bad = run_experiment(badcfg);
  CHECK(bad.exit_code == 1);
  const nlohmann::json report = nlohmann::json::parse(slurp(dir_bad / "report.json"));
  CHECK(report["status"] == "invalid");

  // a norm spec that fails to evaluate is recorded per row, not fatal
  const fs::path dir_norm = fresh_dir("run-badnorm");
  ExperimentConfig ncfg;
  ncfg.domain = Domain(2, 2 * pi, 16);
  ncfg.solver.segments = 8;
  ncfg.initial_data = TaylorGreenData{};
  MixedNormSpec off;
  off.p = 4.0;
  off.q = 3.0;  // off the scaling line
  off.delta = 1.0;
  ncfg.norm_specs.push_back(off);
  ncfg.output_directory = dir_norm.string();
  const ExperimentOutcome nout = run_experiment(ncfg);
  CHECK(nout.exit_code == 0);
  const nlohmann::json nreport = nlohmann::json::parse(slurp(dir_norm / "report.json"));
  CHECK(nreport["norms"][0].contains("error"));
}

TEST_CASE("file-backed initial data") {
  const fs::path dir = fresh_dir("from-file");
  const Domain dom(2, 2 * pi, 16);
  const VectorField a = make_initial_data(dom, RandomDivfreeData{0.2, 2.0, 31});
  const std::string path = (dir / "a.field").string();
  write_field(path, a);

  const VectorField b = make_initial_data(dom, FromFileData{path});
  CHECK(b.comp == a.comp);

  const Domain other(2, 2 * pi, 32);
  CHECK_THROWS_AS(make_initial_data(other, FromFileData{path}), std::invalid_argument);
}
