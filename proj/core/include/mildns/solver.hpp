#pragma once

#include "mildns/spectral.hpp"

#include <vector>

namespace mildns {

/// Velocity states on the nodes of a TimeGrid.  All states live on one domain,
/// are divergence-free and mean-free.
struct Trajectory {
  TimeGrid grid;
  std::vector<VectorField> states;

  const Domain& dom() const { return states.front().dom; }
  int nodes() const { return static_cast<int>(states.size()); }
};

/// Throws if sizes, domains or flags are inconsistent.
void validate_trajectory(const Trajectory& t);

enum class Dealias { two_thirds, none };

enum class SolveStatus { converged, max_iterations, no_contraction, blowup };

const char* to_string(SolveStatus s);

struct SolverConfig {
  real delta = 1.0;
  int segments = 16;
  real grading = 2.0;

  int max_iterations = 12;
  real contraction_tolerance = 1e-9;
  real blowup_threshold = 100.0;  // growth factor over the heat trajectory norm

  // Control norm: weighted mixed norm with these exponents and delta = horizon.
  // p = q = 0 means "use d+2".
  real control_p = 0.0;
  real control_q = 0.0;
  int control_m = 0;
  int control_n = 1;
};

struct PicardReport {
  SolveStatus status = SolveStatus::max_iterations;
  int iterations = 0;
  real heat_norm = 0.0;                 // control norm of the heat trajectory
  std::vector<real> iterate_norm;       // control norm of v_k after each update
  std::vector<real> correction_norm;    // control norm of v_{k+1} - v_k
  std::vector<real> contraction_ratio;  // correction / norm of the previous iterate
  real residual = 0.0;                  // control norm of u - U - B(u,u) at exit
};

struct SolveResult {
  Trajectory u;
  PicardReport report;
};

/// U(t_i) = e^{t_i Laplacian} a on the given grid.  a must be divergence-free
/// and mean-free.
Trajectory heat_trajectory(const VectorField& a, const TimeGrid& grid);

/// B(u,v)(t_i) = -int_0^{t_i} e^{(t_i-s) Laplacian} P d_j (u_j v)(s) ds, with the
/// projected divergence interpolated linearly in s between nodes and each cell
/// integrated exactly per mode.  On the leading cell (0, t_0] the interpolant is
/// anchored at the value extrapolated from the first two nodes.  The sign makes
/// the fixed-point equation read u = U + B(u,u).
Trajectory duhamel_bilinear(const Trajectory& u, const Trajectory& v,
                            Dealias policy = Dealias::two_thirds);

/// One Picard step T(v) = U + B(v,v).
Trajectory picard_iterate(const Trajectory& v, const Trajectory& U,
                          Dealias policy = Dealias::two_thirds);

/// Picard iteration from v_0 = U until the control-norm correction falls below
/// contraction_tolerance relative to the iterate norm.  Never throws on
/// non-convergence: the outcome is in the report status.
SolveResult solve_mild(const VectorField& a, const SolverConfig& config);

struct MarchResult {
  Trajectory u;
  SolveStatus status = SolveStatus::converged;
  int failed_step = -1;
};

/// Step-wise Duhamel update on a uniform grid: each step advances the mild
/// equation over one cell, iterating the cell's right-endpoint nonlinearity to
/// a fixed point.  On a shared grid this reproduces solve_mild's quadrature.
MarchResult time_march(const VectorField& a, real t_final, int steps,
                       const SolverConfig& config = {});

/// D_t^m along the flow, by the recursion
///   D_t^m u = Laplacian D_t^{m-1} u - P sum_j C(m-1,j) d_i((D_t^j u)_i D_t^{m-1-j} u),
/// applied node-wise with dealiased products.  m <= 3.
Trajectory time_derivative(const Trajectory& u, int m);

/// All levels 0..m of the recursion at once (level 0 is a copy of u).
std::vector<Trajectory> time_derivative_levels(const Trajectory& u, int m);

}  // namespace mildns
