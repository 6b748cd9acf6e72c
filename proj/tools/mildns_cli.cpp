// Command-line front end: run experiments from config files, generate initial
// data, evaluate norms on stored trajectories, run the acceptance suite.
//
// Exit codes: 0 success, 1 validation failure (bad config/arguments/file),
// 2 solver did not contract or blew up, 3 internal error.

#include "CLI11.hpp"

#include "mildns/accept.hpp"
#include "mildns/harness.hpp"

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

mildns::MixedNormSpec parse_spec(const std::string& text) {
  mildns::MixedNormSpec s;
  std::istringstream is(text);
  char c1 = 0, c2 = 0, c3 = 0, c4 = 0;
  std::string p;
  std::getline(is, p, ',');
  s.p = p == "inf" ? mildns::inf : std::stod(p);
  if (!(is >> s.q >> c1 >> s.m >> c2 >> s.n >> c3 >> s.delta) || c1 != ',' || c2 != ',' ||
      c3 != ',' || (is >> c4))
    throw std::invalid_argument("--spec wants p,q,m,n,delta (p may be 'inf'): got '" + text + "'");
  return s;
}

int run_cmd(const std::string& config_path) {
  const mildns::ExperimentConfig cfg = mildns::load_config_file(config_path);
  const mildns::ExperimentOutcome out = mildns::run_experiment(cfg);
  std::cout << "status: " << to_string(out.status) << "\n"
            << "report: " << out.report_path << "\n";
  if (!out.message.empty() && out.message != "ok") std::cout << out.message << "\n";
  return out.exit_code;
}

int accept_cmd(const std::string& level) {
  const mildns::AcceptanceReport report = mildns::acceptance_suite(level);
  return mildns::print_report(report, std::cout) == 0 ? 0 : 2;
}

int norms_cmd(const std::string& path, const std::vector<std::string>& specs) {
  const mildns::Trajectory u = mildns::read_trajectory(path);
  std::cout << "p,q,m,n,delta,value\n";
  for (const std::string& text : specs) {
    const mildns::MixedNormSpec s = parse_spec(text);
    char buf[160];
    std::snprintf(buf, sizeof buf, "%g,%g,%d,%d,%.17g,%.17g\n", s.p, s.q, s.m, s.n, s.delta,
                  mildns::weighted_mixed_norm(u, s));
    std::cout << buf;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mild-solution Navier-Stokes toolbox"};
  app.require_subcommand(1);

  std::string config_path;
  CLI::App* run = app.add_subcommand("run", "run an experiment from a JSON config");
  run->add_option("config", config_path, "config file")->required();

  std::string level = "full";
  CLI::App* accept = app.add_subcommand("accept", "run the acceptance suite");
  accept->add_option("--level", level, "quick or full")->check(CLI::IsMember({"quick", "full"}));

  CLI::App* data = app.add_subcommand("data", "generate an initial data field file");
  std::string kind, out_path = "data.field";
  int dd = 2, nn = 32;
  double box = 2.0 * mildns::pi, amplitude = 0.1, decay = 2.0, alpha = 0.9, radius = 0.5;
  std::uint64_t seed = 1;
  std::vector<double> center;
  data->add_option("kind", kind, "taylor_green | random_divfree | singular_ld")->required();
  data->add_option("--out", out_path, "output file");
  data->add_option("--d", dd, "dimension (2 or 3)");
  data->add_option("--box-length", box, "box length");
  data->add_option("--grid-points", nn, "grid points per axis");
  data->add_option("--amplitude", amplitude, "critical-norm amplitude");
  data->add_option("--decay", decay, "spectral decay exponent");
  data->add_option("--seed", seed, "rng seed");
  data->add_option("--alpha", alpha, "singularity exponent in (0,1)");
  data->add_option("--radius", radius, "mollification radius");
  data->add_option("--center", center, "singularity center")->expected(2, 3);

  CLI::App* norms = app.add_subcommand("norms", "weighted mixed norms of a stored trajectory");
  std::string traj_path;
  std::vector<std::string> specs;
  norms->add_option("trajectory", traj_path, "trajectory file")->required();
  norms->add_option("--spec", specs, "norm exponents p,q,m,n,delta (repeatable)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return run_cmd(config_path);
    if (*accept) return accept_cmd(level);
    if (*norms) return norms_cmd(traj_path, specs);

    mildns::InitialData choice;
    if (kind == "taylor_green") {
      choice = mildns::TaylorGreenData{};
    } else if (kind == "random_divfree") {
      choice = mildns::RandomDivfreeData{amplitude, decay, seed};
    } else if (kind == "singular_ld") {
      mildns::SingularLdData s;
      s.alpha = alpha;
      s.mollification_radius = radius;
      s.amplitude = amplitude;
      for (std::size_t i = 0; i < center.size(); ++i) s.center[i] = center[i];
      choice = s;
    } else {
      throw std::invalid_argument("unknown data kind '" + kind + "'");
    }
    const mildns::Domain dom(dd, box, nn);
    mildns::write_field(out_path, mildns::make_initial_data(dom, choice));
    std::cout << "wrote " << out_path << "\n";
    return 0;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
