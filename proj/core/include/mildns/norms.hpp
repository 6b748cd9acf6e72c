#pragma once

#include "mildns/solver.hpp"

#include <functional>
#include <vector>

namespace mildns {

/// Exponent tuple for the weighted space-time norm
///   sum_{j<=m} sum_{k<=n} || t^{j+k/2} D_t^j grad^k u ||_{L^q_x L^p_t(0,delta)}.
/// (p, q) must sit on the scaling line 2/p + d/q = 1 with p in [d+2, inf],
/// q in [d, d+2]; checked against the trajectory's dimension at evaluation.
struct MixedNormSpec {
  real p = 0.0;
  real q = 0.0;
  int m = 0;
  int n = 0;
  real delta = 1.0;
};

void validate_spec(const MixedNormSpec& spec, int d);

/// L^p(0,delta) quadrature of t^w phi(t) from node samples: product rule with
/// one cell per node (boundaries at neighbor midpoints, clipped to [0, delta])
/// and the power weight integrated exactly per cell.  p = inf takes the sup
/// over nodes.  Exact for constant phi and w = 0.
real weighted_time_lp(const TimeGrid& grid, const std::vector<real>& phi, real w, real p,
                      real delta);

real weighted_mixed_norm(const Trajectory& u, const MixedNormSpec& spec);

/// Same norm over states supplied by a callback (used for differences of
/// trajectories without materializing them).  Requires m = 0.
real weighted_mixed_norm(const Domain& dom, const TimeGrid& grid,
                         const std::function<VectorField(int)>& state, const MixedNormSpec& spec);

struct RateFit {
  real slope = 0.0;
  real r_squared = 0.0;
};

/// Least-squares slope of log sum_{|a|=order} ||D^a u(t)||_{L^q} against log t
/// over nodes with t in [t_lo, t_hi], always excluding the first and last two
/// nodes of the trajectory.  The window must span at least one decade.
RateFit smoothing_rate_fit(const Trajectory& u, int order, real q, real t_lo, real t_hi);

/// Ratio of || t^{m/2} ||u||_{W^{m,q}} ||_{L^p_t} to
/// (|| t^{n/2} ||u||_{W^{n,q}} ||_{L^p_t})^{m/n} (|| ||u||_{L^q} ||_{L^p_t})^{1-m/n}
/// with Bessel-multiplier Sobolev norms and 0 < m < n real.  At q = 2 the
/// inequality ratio <= 1 is exact in multiplier form.
real interpolation_check(const Trajectory& u, real m, real n, real q, real p, real delta);

/// || t^{(sum orders + k - 1)/2} prod_j |grad^{orders_j} u| ||_{L^q_x L^p_t(0,delta)}
/// for k = orders.size() >= 2 factors; |grad^n u|(x) is the Euclidean magnitude
/// over components and multi-indices of total order n.
real product_norm(const Trajectory& u, const std::vector<int>& orders, real q, real p, real delta);

}  // namespace mildns
