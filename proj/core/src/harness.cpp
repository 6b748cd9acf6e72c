#include "mildns/harness.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mildns {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& msg) { throw std::invalid_argument("config: " + msg); }

const json& need(const json& j, const char* key, const char* where) {
  auto it = j.find(key);
  if (it == j.end()) bad(std::string("missing '") + key + "' in " + where);
  return *it;
}

void check_keys(const json& j, const char* where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) bad(std::string(where) + " must be an object");
  for (const auto& el : j.items()) {
    bool ok = false;
    for (const char* k : allowed)
      if (el.key() == k) {
        ok = true;
        break;
      }
    if (!ok) bad("unknown key '" + el.key() + "' in " + where);
  }
}

real number(const json& j, const char* what) {
  if (!j.is_number()) bad(std::string("'") + what + "' must be a number");
  return j.get<real>();
}

int integer(const json& j, const char* what) {
  if (!j.is_number_integer()) bad(std::string("'") + what + "' must be an integer");
  return j.get<int>();
}

InitialData parse_initial_data(const json& j) {
  check_keys(j, "initial_data",
             {"kind", "amplitude", "spectral_decay", "seed", "alpha", "mollification_radius",
              "center", "path"});
  const json& kj = need(j, "kind", "initial_data");
  if (!kj.is_string()) bad("'initial_data.kind' must be a string");
  const std::string kind = kj.get<std::string>();

  auto forbid = [&](std::initializer_list<const char*> keys) {
    for (const char* k : keys)
      if (j.contains(k)) bad("'" + std::string(k) + "' does not apply to initial_data kind '" + kind + "'");
  };

  if (kind == "taylor_green") {
    forbid({"amplitude", "spectral_decay", "seed", "alpha", "mollification_radius", "center", "path"});
    return TaylorGreenData{};
  }
  if (kind == "random_divfree") {
    forbid({"alpha", "mollification_radius", "center", "path"});
    RandomDivfreeData d;
    if (j.contains("amplitude")) d.amplitude = number(j["amplitude"], "amplitude");
    if (j.contains("spectral_decay")) d.spectral_decay = number(j["spectral_decay"], "spectral_decay");
    if (j.contains("seed")) {
      if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer()) bad("'seed' must be an integer");
      d.seed = j["seed"].get<std::uint64_t>();
    }
    return d;
  }
  if (kind == "singular_ld") {
    forbid({"spectral_decay", "seed", "path"});
    SingularLdData d;
    if (j.contains("amplitude")) d.amplitude = number(j["amplitude"], "amplitude");
    if (j.contains("alpha")) d.alpha = number(j["alpha"], "alpha");
    if (j.contains("mollification_radius"))
      d.mollification_radius = number(j["mollification_radius"], "mollification_radius");
    if (j.contains("center")) {
      const json& c = j["center"];
      if (!c.is_array() || c.size() > 3) bad("'center' must be an array of up to 3 coordinates");
      for (std::size_t i = 0; i < c.size(); ++i) d.center[i] = number(c[i], "center");
    }
    return d;
  }
  if (kind == "from_file") {
    forbid({"amplitude", "spectral_decay", "seed", "alpha", "mollification_radius", "center"});
    FromFileData d;
    d.path = need(j, "path", "initial_data").get<std::string>();
    return d;
  }
  bad("unknown initial_data kind '" + kind + "'");
}

json initial_data_echo(const InitialData& choice) {
  return std::visit(
      [](const auto& c) -> json {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, TaylorGreenData>) {
          return {{"kind", "taylor_green"}};
        } else if constexpr (std::is_same_v<T, RandomDivfreeData>) {
          return {{"kind", "random_divfree"},
                  {"amplitude", c.amplitude},
                  {"spectral_decay", c.spectral_decay},
                  {"seed", c.seed}};
        } else if constexpr (std::is_same_v<T, SingularLdData>) {
          return {{"kind", "singular_ld"},
                  {"alpha", c.alpha},
                  {"mollification_radius", c.mollification_radius},
                  {"amplitude", c.amplitude},
                  {"center", {c.center[0], c.center[1], c.center[2]}}};
        } else {
          return {{"kind", "from_file"}, {"path", c.path}};
        }
      },
      choice);
}

std::string fmt(real v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class Csv {
 public:
  Csv(const std::filesystem::path& path, std::initializer_list<const char*> columns) : os_(path) {
    if (!os_) throw std::runtime_error("cannot write " + path.string());
    bool first = true;
    for (const char* c : columns) {
      if (!first) os_ << ',';
      os_ << c;
      first = false;
    }
    os_ << '\n';
  }
  template <class... Ts>
  void row(const Ts&... vs) {
    bool first = true;
    ((os_ << (first ? "" : ","), cell(vs), first = false), ...);
    os_ << '\n';
  }

 private:
  void cell(real v) { os_ << fmt(v); }
  void cell(int v) { os_ << v; }
  void cell(const char* v) { os_ << v; }
  void cell(const std::string& v) { os_ << v; }
  std::ofstream os_;
};

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    bad(std::string("parse error: ") + e.what());
  }
  check_keys(j, "the top level",
             {"domain", "time_grid", "picard", "initial_data", "norms", "rate_fits", "march",
              "output_directory"});

  ExperimentConfig cfg;

  const json& dj = need(j, "domain", "the top level");
  check_keys(dj, "domain", {"d", "box_length", "grid_points"});
  cfg.domain = Domain(integer(need(dj, "d", "domain"), "d"),
                      number(need(dj, "box_length", "domain"), "box_length"),
                      integer(need(dj, "grid_points", "domain"), "grid_points"));

  if (j.contains("time_grid")) {
    const json& tj = j["time_grid"];
    check_keys(tj, "time_grid", {"delta", "segments", "grading"});
    if (tj.contains("delta")) cfg.solver.delta = number(tj["delta"], "delta");
    if (tj.contains("segments")) cfg.solver.segments = integer(tj["segments"], "segments");
    if (tj.contains("grading")) cfg.solver.grading = number(tj["grading"], "grading");
  }

  if (j.contains("picard")) {
    const json& pj = j["picard"];
    check_keys(pj, "picard",
               {"max_iterations", "contraction_tolerance", "blowup_threshold", "control"});
    if (pj.contains("max_iterations"))
      cfg.solver.max_iterations = integer(pj["max_iterations"], "max_iterations");
    if (pj.contains("contraction_tolerance"))
      cfg.solver.contraction_tolerance = number(pj["contraction_tolerance"], "contraction_tolerance");
    if (pj.contains("blowup_threshold"))
      cfg.solver.blowup_threshold = number(pj["blowup_threshold"], "blowup_threshold");
    if (pj.contains("control")) {
      const json& cj = pj["control"];
      check_keys(cj, "picard.control", {"p", "q", "m", "n"});
      if (cj.contains("p")) cfg.solver.control_p = number(cj["p"], "control.p");
      if (cj.contains("q")) cfg.solver.control_q = number(cj["q"], "control.q");
      if (cj.contains("m")) cfg.solver.control_m = integer(cj["m"], "control.m");
      if (cj.contains("n")) cfg.solver.control_n = integer(cj["n"], "control.n");
    }
  }

  if (!j.contains("initial_data")) bad("missing 'initial_data' (no default exists)");
  cfg.initial_data = parse_initial_data(j["initial_data"]);

  if (j.contains("norms")) {
    if (!j["norms"].is_array()) bad("'norms' must be an array");
    for (const json& nj : j["norms"]) {
      check_keys(nj, "norms[]", {"p", "q", "m", "n", "delta"});
      MixedNormSpec s;
      s.p = nj.contains("p") && nj["p"].is_string() && nj["p"] == "inf"
                ? inf
                : number(need(nj, "p", "norms[]"), "p");
      s.q = number(need(nj, "q", "norms[]"), "q");
      s.m = nj.contains("m") ? integer(nj["m"], "m") : 0;
      s.n = nj.contains("n") ? integer(nj["n"], "n") : 0;
      s.delta = nj.contains("delta") ? number(nj["delta"], "delta") : cfg.solver.delta;
      cfg.norm_specs.push_back(s);
    }
  }

  if (j.contains("rate_fits")) {
    if (!j["rate_fits"].is_array()) bad("'rate_fits' must be an array");
    for (const json& rj : j["rate_fits"]) {
      check_keys(rj, "rate_fits[]", {"order", "q", "t_lo", "t_hi"});
      ExperimentConfig::Rate r;
      r.order = integer(need(rj, "order", "rate_fits[]"), "order");
      r.q = number(need(rj, "q", "rate_fits[]"), "q");
      if (rj.contains("t_lo")) r.t_lo = number(rj["t_lo"], "t_lo");
      if (rj.contains("t_hi")) r.t_hi = number(rj["t_hi"], "t_hi");
      cfg.rate_fits.push_back(r);
    }
  }

  if (j.contains("march")) {
    const json& mj = j["march"];
    check_keys(mj, "march", {"t_final", "steps"});
    ExperimentConfig::March m;
    m.t_final = number(need(mj, "t_final", "march"), "t_final");
    m.steps = integer(need(mj, "steps", "march"), "steps");
    cfg.march = m;
  }

  if (j.contains("output_directory")) {
    if (!j["output_directory"].is_string()) bad("'output_directory' must be a string");
    cfg.output_directory = j["output_directory"].get<std::string>();
  }
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("config: cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

ExperimentOutcome run_experiment(const ExperimentConfig& cfg) {
  namespace fs = std::filesystem;
  ExperimentOutcome out;
  const fs::path dir(cfg.output_directory);

  json report;
  report["domain"] = {{"d", cfg.domain.d},
                      {"box_length", cfg.domain.box_length},
                      {"grid_points", cfg.domain.grid_points}};
  report["time_grid"] = {{"delta", cfg.solver.delta},
                         {"segments", cfg.solver.segments},
                         {"grading", cfg.solver.grading}};
  json tables = json::object();

  auto finish = [&](int code, const std::string& message) {
    out.exit_code = code;
    out.message = message;
    report["exit_code"] = code;
    report["message"] = message;
    report["tables"] = tables;
    std::error_code ec;
    fs::create_directories(dir, ec);
    const fs::path rp = dir / "report.json";
    std::ofstream os(rp);
    os << report.dump(2) << '\n';
    out.report_path = rp.string();
    return out;
  };

  try {
    fs::create_directories(dir);
    if (!cfg.initial_data) throw std::invalid_argument("config: missing 'initial_data' (no default exists)");
    report["initial_data"] = initial_data_echo(*cfg.initial_data);

    const VectorField a = make_initial_data(cfg.domain, *cfg.initial_data);
    const SolveResult solve = solve_mild(a, cfg.solver);
    out.status = solve.report.status;
    report["status"] = to_string(solve.report.status);
    report["picard"] = {{"iterations", solve.report.iterations},
                        {"heat_norm", solve.report.heat_norm},
                        {"residual", solve.report.residual}};

    {
      Csv csv(dir / "picard.csv", {"iteration", "iterate_norm", "correction_norm", "contraction_ratio"});
      for (std::size_t i = 0; i < solve.report.iterate_norm.size(); ++i)
        csv.row(int(i + 1), solve.report.iterate_norm[i], solve.report.correction_norm[i],
                solve.report.contraction_ratio[i]);
      tables["picard"] = "picard.csv";
    }
    {
      Csv csv(dir / "timeseries.csv", {"node", "t", "l2_norm", "grad_l2_norm"});
      const std::array<int, 3> dx[3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
      for (int i = 0; i < solve.u.nodes(); ++i) {
        real g2 = 0.0;
        for (int j = 0; j < cfg.domain.d; ++j) {
          const real v = l2_norm_coeff(derivative(solve.u.states[i], dx[j]));
          g2 += v * v;
        }
        csv.row(i, solve.u.grid.nodes[i], l2_norm_coeff(solve.u.states[i]), std::sqrt(g2));
      }
      tables["timeseries"] = "timeseries.csv";
    }

    write_trajectory((dir / "solution.traj").string(), solve.u);
    report["artifacts"] = {{"solution", "solution.traj"}};

    if (!cfg.norm_specs.empty()) {
      Csv csv(dir / "norms.csv", {"p", "q", "m", "n", "delta", "value"});
      json rows = json::array();
      for (const MixedNormSpec& s : cfg.norm_specs) {
        real v = std::nan("");
        std::string note;
        try {
          v = weighted_mixed_norm(solve.u, s);
        } catch (const std::exception& e) {
          note = e.what();
        }
        csv.row(s.p, s.q, s.m, s.n, s.delta, v);
        json row = {{"p", s.p}, {"q", s.q}, {"m", s.m}, {"n", s.n}, {"delta", s.delta}, {"value", v}};
        if (!note.empty()) row["error"] = note;
        rows.push_back(row);
      }
      tables["norms"] = "norms.csv";
      report["norms"] = rows;
    }

    if (!cfg.rate_fits.empty()) {
      Csv csv(dir / "rates.csv", {"order", "q", "t_lo", "t_hi", "slope", "r_squared"});
      json rows = json::array();
      const auto& t = solve.u.grid.nodes;
      for (const ExperimentConfig::Rate& r : cfg.rate_fits) {
        real lo = r.t_lo, hi = r.t_hi;
        if (!(lo > 0.0) || !(hi > lo)) {
          lo = t[2];
          hi = t[t.size() - 3];
        }
        RateFit fit{std::nan(""), std::nan("")};
        std::string note;
        try {
          fit = smoothing_rate_fit(solve.u, r.order, r.q, lo, hi);
        } catch (const std::exception& e) {
          note = e.what();
        }
        csv.row(r.order, r.q, lo, hi, fit.slope, fit.r_squared);
        json row = {{"order", r.order}, {"q", r.q},         {"t_lo", lo},
                    {"t_hi", hi},       {"slope", fit.slope}, {"r_squared", fit.r_squared}};
        if (!note.empty()) row["error"] = note;
        rows.push_back(row);
      }
      tables["rates"] = "rates.csv";
      report["rates"] = rows;
    }

    int code = solve.report.status == SolveStatus::converged ? 0 : 2;

    if (cfg.march) {
      const MarchResult mr = time_march(a, cfg.march->t_final, cfg.march->steps, cfg.solver);
      Csv csv(dir / "march.csv", {"node", "t", "l2_norm"});
      for (int i = 0; i < mr.u.nodes(); ++i)
        csv.row(i, mr.u.grid.nodes[i], l2_norm_coeff(mr.u.states[i]));
      tables["march"] = "march.csv";
      report["march"] = {{"t_final", cfg.march->t_final},
                         {"steps", cfg.march->steps},
                         {"status", to_string(mr.status)},
                         {"failed_step", mr.failed_step}};
      if (mr.status != SolveStatus::converged && code == 0) code = 2;
    }

    return finish(code, code == 0 ? "ok" : "solver did not converge");
  } catch (const std::invalid_argument& e) {
    out.status = SolveStatus::no_contraction;
    report["status"] = "invalid";
    return finish(1, e.what());
  } catch (const std::domain_error& e) {
    out.status = SolveStatus::no_contraction;
    report["status"] = "invalid";
    return finish(1, e.what());
  } catch (const std::exception& e) {
    out.status = SolveStatus::no_contraction;
    report["status"] = "internal_error";
    return finish(3, e.what());
  }
}

}  // namespace mildns
