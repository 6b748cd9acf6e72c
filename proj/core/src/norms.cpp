#include "mildns/norms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mildns {

namespace {

void validate_scaling_pair(real p, real q, int d) {
  if (!(q >= d - 1e-12 && q <= d + 2 + 1e-12))
    throw std::invalid_argument("mixed norm: q outside [d, d+2]");
  if (!(p == inf || p >= d + 2 - 1e-12))
    throw std::invalid_argument("mixed norm: p outside [d+2, inf]");
  const real line = (p == inf ? 0.0 : 2.0 / p) + d / q;
  if (std::abs(line - 1.0) > 1e-12)
    throw std::invalid_argument("mixed norm: (p, q) violates the scaling line 2/p + d/q = 1");
}

std::vector<std::array<int, 3>> multi_indices(int d, int order) {
  std::vector<std::array<int, 3>> out;
  if (d == 2) {
    for (int a = 0; a <= order; ++a) out.push_back({order - a, a, 0});
  } else {
    for (int a = 0; a <= order; ++a)
      for (int b = 0; b <= order - a; ++b) out.push_back({a, b, order - a - b});
  }
  return out;
}

// sum over |alpha| = order of ||D^alpha f||_{L^q}
real derivative_shell_norm(const VectorField& f, int order, real q) {
  real acc = 0.0;
  for (const auto& alpha : multi_indices(f.dom.d, order))
    acc += lebesgue_norm(derivative(f, alpha), q);
  return acc;
}

void check_horizon(const TimeGrid& grid, real delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("mixed norm: delta must be positive");
  if (delta > grid.delta * (1.0 + 1e-12))
    throw std::invalid_argument("mixed norm: delta exceeds the trajectory horizon");
}

}  // namespace

void validate_spec(const MixedNormSpec& spec, int d) {
  validate_scaling_pair(spec.p, spec.q, d);
  if (spec.m < 0 || spec.n < 0) throw std::invalid_argument("mixed norm: negative order");
  if (!(spec.delta > 0.0)) throw std::invalid_argument("mixed norm: delta must be positive");
}

real weighted_time_lp(const TimeGrid& grid, const std::vector<real>& phi, real w, real p,
                      real delta) {
  const auto& t = grid.nodes;
  if (phi.size() != t.size()) throw std::invalid_argument("weighted_time_lp: size mismatch");

  if (p == inf) {
    real mx = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i)
      if (t[i] <= delta * (1.0 + 1e-12)) mx = std::max(mx, std::pow(t[i], w) * phi[i]);
    return mx;
  }

  const real wp = w * p;
  auto weight_mass = [&](real lo, real hi) {
    if (hi <= lo) return 0.0;
    if (wp == 0.0) return hi - lo;
    return (std::pow(hi, wp + 1.0) - std::pow(lo, wp + 1.0)) / (wp + 1.0);
  };

  real acc = 0.0;
  const std::size_t m1 = t.size();
  for (std::size_t i = 0; i < m1; ++i) {
    const real lo = i == 0 ? 0.0 : 0.5 * (t[i - 1] + t[i]);
    const real hi = i + 1 == m1 ? t[m1 - 1] : 0.5 * (t[i] + t[i + 1]);
    acc += std::pow(phi[i], p) * weight_mass(std::min(lo, delta), std::min(hi, delta));
  }
  return std::pow(acc, 1.0 / p);
}

namespace {

// Core of the mixed norm: per time-derivative level, per spatial order, take the
// L^q shell norm at each node and the weighted time L^p across nodes.
real mixed_norm_over_levels(const TimeGrid& grid, const std::vector<const Trajectory*>& levels,
                            const MixedNormSpec& spec) {
  real total = 0.0;
  for (std::size_t j = 0; j < levels.size(); ++j) {
    for (int k = 0; k <= spec.n; ++k) {
      std::vector<real> phi(grid.nodes.size());
      for (std::size_t i = 0; i < phi.size(); ++i)
        phi[i] = derivative_shell_norm(levels[j]->states[i], k, spec.q);
      total += weighted_time_lp(grid, phi, static_cast<real>(j) + 0.5 * k, spec.p, spec.delta);
    }
  }
  return total;
}

}  // namespace

real weighted_mixed_norm(const Trajectory& u, const MixedNormSpec& spec) {
  validate_trajectory(u);
  validate_spec(spec, u.dom().d);
  check_horizon(u.grid, spec.delta);

  std::vector<Trajectory> levels = time_derivative_levels(u, spec.m);
  std::vector<const Trajectory*> ptrs;
  for (const auto& l : levels) ptrs.push_back(&l);
  return mixed_norm_over_levels(u.grid, ptrs, spec);
}

real weighted_mixed_norm(const Domain& dom, const TimeGrid& grid,
                         const std::function<VectorField(int)>& state, const MixedNormSpec& spec) {
  validate_spec(spec, dom.d);
  check_horizon(grid, spec.delta);
  if (spec.m != 0) throw std::invalid_argument("mixed norm: callback form requires m = 0");

  real total = 0.0;
  std::vector<std::vector<real>> phi(spec.n + 1, std::vector<real>(grid.nodes.size()));
  for (std::size_t i = 0; i < grid.nodes.size(); ++i) {
    const VectorField s = state(static_cast<int>(i));
    for (int k = 0; k <= spec.n; ++k) phi[k][i] = derivative_shell_norm(s, k, spec.q);
  }
  for (int k = 0; k <= spec.n; ++k)
    total += weighted_time_lp(grid, phi[k], 0.5 * k, spec.p, spec.delta);
  return total;
}

RateFit smoothing_rate_fit(const Trajectory& u, int order, real q, real t_lo, real t_hi) {
  validate_trajectory(u);
  if (order < 0) throw std::invalid_argument("smoothing_rate_fit: negative order");
  if (!(t_lo > 0.0 && t_hi > t_lo)) throw std::invalid_argument("smoothing_rate_fit: bad window");

  const auto& t = u.grid.nodes;
  std::vector<real> lx, ly;
  for (std::size_t i = 2; i + 2 < t.size(); ++i) {
    if (t[i] < t_lo || t[i] > t_hi) continue;
    const real phi = derivative_shell_norm(u.states[i], order, q);
    if (!(phi > 0.0))
      throw std::invalid_argument("smoothing_rate_fit: vanishing norm inside the window");
    lx.push_back(std::log(t[i]));
    ly.push_back(std::log(phi));
  }
  if (lx.size() < 3) throw std::invalid_argument("smoothing_rate_fit: too few nodes in window");
  if (lx.back() - lx.front() < std::log(10.0) * (1.0 - 1e-9))
    throw std::invalid_argument("smoothing_rate_fit: window covers less than a decade");

  const std::size_t n = lx.size();
  real sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += lx[i];
    sy += ly[i];
  }
  const real mx = sx / n, my = sy / n;
  real sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

real interpolation_check(const Trajectory& u, real m, real n, real q, real p, real delta) {
  validate_trajectory(u);
  if (!(m > 0.0 && m < n)) throw std::invalid_argument("interpolation_check: need 0 < m < n");
  if (!(q >= 1.0)) throw std::invalid_argument("interpolation_check: q must be >= 1");
  if (!(p >= 1.0)) throw std::invalid_argument("interpolation_check: p must be >= 1");
  check_horizon(u.grid, delta);

  const std::size_t m1 = u.grid.nodes.size();
  std::vector<real> mid(m1), high(m1), base(m1);
  for (std::size_t i = 0; i < m1; ++i) {
    mid[i] = sobolev_norm(u.states[i], m, q);
    high[i] = sobolev_norm(u.states[i], n, q);
    base[i] = lebesgue_norm(u.states[i], q);
  }
  const real lhs = weighted_time_lp(u.grid, mid, 0.5 * m, p, delta);
  const real r1 = weighted_time_lp(u.grid, high, 0.5 * n, p, delta);
  const real r2 = weighted_time_lp(u.grid, base, 0.0, p, delta);
  const real rhs = std::pow(r1, m / n) * std::pow(r2, 1.0 - m / n);
  if (rhs == 0.0) return lhs == 0.0 ? 0.0 : inf;
  return lhs / rhs;
}

real product_norm(const Trajectory& u, const std::vector<int>& orders, real q, real p,
                  real delta) {
  validate_trajectory(u);
  const int k = static_cast<int>(orders.size());
  if (k < 2) throw std::invalid_argument("product_norm: need at least 2 factors");
  for (int o : orders)
    if (o < 0) throw std::invalid_argument("product_norm: negative order");
  validate_scaling_pair(p, q, u.dom().d);
  check_horizon(u.grid, delta);

  const Domain& dom = u.dom();
  const std::size_t nm = dom.modes();
  const real cell = std::pow(dom.spacing(), dom.d);

  int total_order = 0;
  for (int o : orders) total_order += o;
  const real w = 0.5 * (total_order + k - 1);

  std::vector<real> phi(u.grid.nodes.size());
  for (std::size_t i = 0; i < phi.size(); ++i) {
    // pointwise |grad^o u| per distinct order, then the product over factors
    std::vector<int> distinct = orders;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

    std::vector<std::vector<real>> mag(distinct.size(), std::vector<real>(nm, 0.0));
    for (std::size_t di = 0; di < distinct.size(); ++di) {
      for (const auto& alpha : multi_indices(dom.d, distinct[di])) {
        VectorField g = derivative(u.states[i], alpha);
        for (int c = 0; c < dom.d; ++c) {
          std::vector<cplx> ph = to_physical(dom, g.comp[c]);
          for (std::size_t x = 0; x < nm; ++x) mag[di][x] += std::norm(ph[x]);
        }
      }
      for (std::size_t x = 0; x < nm; ++x) mag[di][x] = std::sqrt(mag[di][x]);
    }

    std::vector<real> prod(nm, 1.0);
    for (int o : orders) {
      const std::size_t di =
          std::lower_bound(distinct.begin(), distinct.end(), o) - distinct.begin();
      for (std::size_t x = 0; x < nm; ++x) prod[x] *= mag[di][x];
    }
    real acc = 0.0;
    if (q == inf) {
      for (real v : prod) acc = std::max(acc, v);
      phi[i] = acc;
    } else {
      for (real v : prod) acc += std::pow(v, q);
      phi[i] = std::pow(acc * cell, 1.0 / q);
    }
  }
  return weighted_time_lp(u.grid, phi, w, p, delta);
}

}  // namespace mildns
