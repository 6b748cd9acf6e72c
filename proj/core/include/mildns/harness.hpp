#pragma once

#include "mildns/norms.hpp"
#include "mildns/solver.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace mildns {

// ---- initial data ----------------------------------------------------------

struct TaylorGreenData {};

/// Divergence-free field with independent complex-Gaussian modes under the
/// envelope (1+|n|^2)^{-decay/2} (n the integer mode), projected and scaled so
/// the critical L^d norm equals `amplitude`.  Fully determined by the seed.
struct RandomDivfreeData {
  real amplitude = 0.1;
  real spectral_decay = 2.0;
  std::uint64_t seed = 1;
};

/// Mollified |x - center|^{-alpha} bump along e_1, Leray-projected, mean-freed
/// and scaled so the critical L^d norm equals `amplitude`.  alpha < 1 keeps the
/// profile inside L^d; the mollification radius must be resolved by the grid.
struct SingularLdData {
  real alpha = 0.9;
  real mollification_radius = 0.5;
  real amplitude = 1.0;
  std::array<real, 3> center = {0.0, 0.0, 0.0};  // box center when all zero
};

struct FromFileData {
  std::string path;
};

using InitialData = std::variant<TaylorGreenData, RandomDivfreeData, SingularLdData, FromFileData>;

VectorField make_initial_data(const Domain& dom, const InitialData& choice);

// ---- trajectory files ------------------------------------------------------

// Binary layout: magic "MNSTRAJ1"; u32 d; f64 box_length; u32 grid_points;
// u64 node_count; f64 grading; u32 endianness tag 0x01020304; then per node an
// f64 time followed by d coefficient blocks in row-major wavenumber order,
// 16-byte complex each.  Round trips are bit exact.
void write_trajectory(const std::string& path, const Trajectory& u);
Trajectory read_trajectory(const std::string& path);

/// Single field stored as a one-node trajectory at time 0.
void write_field(const std::string& path, const VectorField& a);
VectorField read_field(const std::string& path);

// ---- experiments -----------------------------------------------------------

struct ExperimentConfig {
  Domain domain;
  SolverConfig solver;
  std::optional<InitialData> initial_data;
  std::vector<MixedNormSpec> norm_specs;
  struct Rate {
    int order = 1;
    real q = 2.0;
    real t_lo = 0.0;  // 0 = whole usable window
    real t_hi = 0.0;
  };
  std::vector<Rate> rate_fits;
  struct March {
    real t_final = 1.0;
    int steps = 100;
  };
  std::optional<March> march;
  std::string output_directory = "out";
};

/// Parse a config document (strict: unknown keys are errors, initial_data is
/// required).  Throws std::invalid_argument with the offending field named.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

struct ExperimentOutcome {
  SolveStatus status = SolveStatus::converged;
  int exit_code = 0;  // 0 ok, 1 validation, 2 no contraction / blow-up, 3 internal
  std::string report_path;
  std::string message;
};

/// Runs the configured experiment and persists report.json plus flat CSV
/// tables under the output directory.  Solver failures become a failed-status
/// report, not an exception; identical config gives bit-identical tables.
ExperimentOutcome run_experiment(const ExperimentConfig& cfg);

}  // namespace mildns
