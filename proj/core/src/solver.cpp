#include "mildns/solver.hpp"

#include "mildns/norms.hpp"
#include "mildns/stokes.hpp"

#include <cmath>
#include <stdexcept>

namespace mildns {

void validate_trajectory(const Trajectory& t) {
  if (t.states.empty()) throw std::invalid_argument("Trajectory: no states");
  if (t.states.size() != t.grid.nodes.size())
    throw std::invalid_argument("Trajectory: state count differs from node count");
  const Domain& dom = t.states.front().dom;
  for (const auto& s : t.states)
    if (!(s.dom == dom)) throw std::invalid_argument("Trajectory: mixed domains");
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iterations: return "max_iterations";
    case SolveStatus::no_contraction: return "no_contraction";
    case SolveStatus::blowup: return "blowup";
  }
  return "unknown";
}

namespace {

std::vector<real> laplacian_table(const Domain& dom) {
  const real k0 = dom.fundamental();
  std::vector<real> lam(dom.modes());
  for_each_mode(dom, [&](std::size_t idx, const std::array<int, 3>& n) {
    lam[idx] = k0 * k0 *
               (static_cast<real>(n[0]) * n[0] + static_cast<real>(n[1]) * n[1] +
                static_cast<real>(n[2]) * n[2]);
  });
  return lam;
}

void check_data(const VectorField& a, const char* who) {
  real scale = 0.0;
  for (const auto& c : a.comp)
    for (const cplx& v : c) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return;  // zero data is fine
  const real k_big = a.dom.fundamental() * (a.dom.grid_points / 2);
  if (divergence_linf_coeff(a) > 1e-10 * scale * k_big)
    throw std::invalid_argument(std::string(who) + ": data is not divergence-free");
  if (!a.is_mean_free(1e-12 * scale))
    throw std::invalid_argument(std::string(who) + ": data is not mean-free");
}

// Exact integral of e^{-lambda(b-s)} times a linear interpolant over a cell of
// width h, split as ga*(J0-J1) + gb*J1.  Series branch keeps small lambda*h
// free of cancellation.
struct CellWeights {
  real decay;  // e^{-lambda h}
  real wa;     // weight of the left value
  real wb;     // weight of the right value
};

inline CellWeights cell_weights(real lambda, real h) {
  const real z = lambda * h;
  real decay, j0, j1;
  if (z < 1e-3) {
    decay = std::exp(-z);
    j0 = h * (1.0 - z / 2.0 + z * z / 6.0 - z * z * z / 24.0);
    j1 = h * (0.5 - z / 6.0 + z * z / 24.0 - z * z * z / 120.0);
  } else {
    const real em = std::expm1(-z);
    decay = 1.0 + em;
    j0 = -h * em / z;
    const real w = -z - em * (1.0 + z);  // 1 - e^{-z}(1+z)
    j1 = j0 - h * w / (z * z);
  }
  return {decay, j0 - j1, j1};
}

// P sum_j d_j(u_j v): inputs to physical (band-truncated unless policy is none),
// tensor products back to spectral, divergence and projection fused per mode.
VectorField projected_convection(const VectorField& u, const VectorField& v, Dealias policy) {
  const Domain& dom = u.dom;
  const int d = dom.d;
  const std::size_t nm = dom.modes();
  const int nyq = -dom.grid_points / 2;
  const real k0 = dom.fundamental();
  const int lim = dealias_limit(dom);
  const bool cut = policy == Dealias::two_thirds;

  auto physical = [&](const std::vector<cplx>& c) {
    if (!cut) return to_physical(dom, c);
    std::vector<cplx> t = c;
    for_each_mode(dom, [&](std::size_t idx, const std::array<int, 3>& n) {
      if (std::abs(n[0]) > lim || std::abs(n[1]) > lim || std::abs(n[2]) > lim) t[idx] = 0.0;
    });
    return to_physical(dom, t);
  };

  std::vector<std::vector<cplx>> up(d), vp(d);
  for (int j = 0; j < d; ++j) up[j] = physical(u.comp[j]);
  for (int i = 0; i < d; ++i) vp[i] = physical(v.comp[i]);

  VectorField g(dom);
  std::vector<cplx> prod(nm);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) {
      for (std::size_t m = 0; m < nm; ++m) prod[m] = up[j][m] * vp[i][m];
      std::vector<cplx> ph = to_spectral(dom, prod);
      for_each_mode(dom, [&](std::size_t idx, const std::array<int, 3>& n) {
        if (cut && (std::abs(n[0]) > lim || std::abs(n[1]) > lim || std::abs(n[2]) > lim)) return;
        if (n[j] == nyq) return;
        g.comp[i][idx] += cplx(0.0, k0 * n[j]) * ph[idx];
      });
    }
  return leray_project(g);
}

void apply_laplacian(VectorField& f, const std::vector<real>& lam) {
  for (auto& c : f.comp)
    for (std::size_t m = 0; m < c.size(); ++m) c[m] *= -lam[m];
}

// B_i = decay * B_{i-1} - (wa ga + wb gb), per mode.  Pass prev = nullptr for
// the leading cell.
void sweep_cell(const std::vector<real>& lam, real h, const VectorField* prev,
                const VectorField& ga, const VectorField& gb, VectorField& out) {
  const int d = out.dom.d;
  const std::size_t nm = out.dom.modes();
  for (std::size_t idx = 0; idx < nm; ++idx) {
    const CellWeights w = cell_weights(lam[idx], h);
    for (int c = 0; c < d; ++c) {
      cplx val = -(w.wa * ga.comp[c][idx] + w.wb * gb.comp[c][idx]);
      if (prev) val += w.decay * prev->comp[c][idx];
      out.comp[c][idx] = val;
    }
  }
}

MixedNormSpec control_spec(const SolverConfig& cfg, int d) {
  MixedNormSpec s;
  s.p = cfg.control_p > 0.0 ? cfg.control_p : static_cast<real>(d + 2);
  s.q = cfg.control_q > 0.0 ? cfg.control_q : static_cast<real>(d + 2);
  s.m = cfg.control_m;
  s.n = cfg.control_n;
  s.delta = cfg.delta;
  return s;
}

real control_norm_diff(const Trajectory& a, const Trajectory& b, const MixedNormSpec& spec) {
  return weighted_mixed_norm(
      a.dom(), a.grid, [&](int i) { return difference(a.states[i], b.states[i]); }, spec);
}

}  // namespace

Trajectory heat_trajectory(const VectorField& a, const TimeGrid& grid) {
  check_data(a, "heat_trajectory");
  Trajectory u;
  u.grid = grid;
  u.states.reserve(grid.nodes.size());
  for (real t : grid.nodes) u.states.push_back(heat_semigroup(a, t));
  return u;
}

Trajectory duhamel_bilinear(const Trajectory& u, const Trajectory& v, Dealias policy) {
  validate_trajectory(u);
  validate_trajectory(v);
  if (!(u.dom() == v.dom())) throw std::invalid_argument("duhamel_bilinear: domain mismatch");
  if (u.grid.nodes != v.grid.nodes) throw std::invalid_argument("duhamel_bilinear: grid mismatch");

  const auto& nodes = u.grid.nodes;
  const int m1 = static_cast<int>(nodes.size());
  const std::vector<real> lam = laplacian_table(u.dom());

  Trajectory B;
  B.grid = u.grid;
  B.states.assign(m1, VectorField(u.dom()));

  VectorField ga = projected_convection(u.states[0], v.states[0], policy);
  VectorField gb = projected_convection(u.states[1], v.states[1], policy);

  // Leading cell (0, t_0]: interpolant anchored at the linear extrapolation of
  // the first two nodes back to s = 0.
  VectorField anchor = ga;
  add_scaled(anchor, -nodes[0] / (nodes[1] - nodes[0]), difference(gb, ga));
  sweep_cell(lam, nodes[0], nullptr, anchor, ga, B.states[0]);

  for (int i = 1; i < m1; ++i) {
    if (i >= 2) {
      ga = std::move(gb);
      gb = projected_convection(u.states[i], v.states[i], policy);
    }
    sweep_cell(lam, nodes[i] - nodes[i - 1], &B.states[i - 1], ga, gb, B.states[i]);
  }
  return B;
}

Trajectory picard_iterate(const Trajectory& v, const Trajectory& U, Dealias policy) {
  Trajectory t = duhamel_bilinear(v, v, policy);
  for (int i = 0; i < t.nodes(); ++i) add_scaled(t.states[i], 1.0, U.states[i]);
  return t;
}

SolveResult solve_mild(const VectorField& a, const SolverConfig& cfg) {
  check_data(a, "solve_mild");
  if (cfg.max_iterations < 1) throw std::invalid_argument("solve_mild: max_iterations < 1");
  if (!(cfg.contraction_tolerance > 0.0))
    throw std::invalid_argument("solve_mild: contraction_tolerance must be positive");
  if (!(cfg.blowup_threshold > 1.0))
    throw std::invalid_argument("solve_mild: blowup_threshold must exceed 1");
  if (cfg.control_m != 0)
    throw std::invalid_argument("solve_mild: control norm must have m = 0");

  const MixedNormSpec ctrl = control_spec(cfg, a.dom.d);
  validate_spec(ctrl, a.dom.d);
  const TimeGrid grid(cfg.delta, cfg.segments, cfg.grading);

  SolveResult r;
  Trajectory U = heat_trajectory(a, grid);
  r.report.heat_norm = weighted_mixed_norm(U, ctrl);

  Trajectory v = U;
  real prev_norm = r.report.heat_norm;
  int bad_streak = 0;
  r.report.status = SolveStatus::max_iterations;

  for (int it = 1; it <= cfg.max_iterations; ++it) {
    Trajectory w = picard_iterate(v, U);
    const real corr = control_norm_diff(w, v, ctrl);
    const real wnorm = weighted_mixed_norm(w, ctrl);
    const real ratio = corr / std::max(prev_norm, 1e-300);

    r.report.iterations = it;
    r.report.iterate_norm.push_back(wnorm);
    r.report.correction_norm.push_back(corr);
    r.report.contraction_ratio.push_back(ratio);
    v = std::move(w);

    if (!std::isfinite(wnorm) ||
        wnorm > cfg.blowup_threshold * std::max(r.report.heat_norm, 1e-300)) {
      r.report.status = SolveStatus::blowup;
      break;
    }
    bad_streak = ratio > 1.0 ? bad_streak + 1 : 0;
    if (bad_streak >= 3) {
      r.report.status = SolveStatus::no_contraction;
      break;
    }
    if (ratio <= cfg.contraction_tolerance) {
      r.report.status = SolveStatus::converged;
      break;
    }
    prev_norm = wnorm;
  }

  if (r.report.status == SolveStatus::converged) {
    Trajectory w = picard_iterate(v, U);
    r.report.residual = control_norm_diff(w, v, ctrl);
  } else if (!r.report.correction_norm.empty()) {
    r.report.residual = r.report.correction_norm.back();
  }
  r.u = std::move(v);
  return r;
}

MarchResult time_march(const VectorField& a, real t_final, int steps, const SolverConfig& cfg) {
  check_data(a, "time_march");
  if (steps < 2) throw std::invalid_argument("time_march: need at least 2 steps");
  if (!(t_final > 0.0)) throw std::invalid_argument("time_march: t_final must be positive");

  const TimeGrid grid(t_final, steps, 1.0);
  const auto& nodes = grid.nodes;
  const int m1 = static_cast<int>(nodes.size());
  const std::vector<real> lam = laplacian_table(a.dom);
  const real a_l2 = l2_norm_coeff(a);

  MarchResult r;
  r.u.grid = grid;
  r.u.states.assign(m1, VectorField(a.dom));

  // Advance one cell [t_prev, t_i] from state `from`, iterating the right
  // endpoint of the interpolated nonlinearity to a fixed point.
  auto advance = [&](const VectorField& from, const VectorField& ga, real h, VectorField& out) {
    VectorField gb = ga;
    VectorField base(a.dom);
    for (int r2 = 0; r2 < 12; ++r2) {
      sweep_cell(lam, h, nullptr, ga, gb, base);
      // base currently holds -integral; add the transported state.
      const std::size_t nm = a.dom.modes();
      for (int c = 0; c < a.dom.d; ++c)
        for (std::size_t idx = 0; idx < nm; ++idx)
          base.comp[c][idx] += std::exp(-lam[idx] * h) * from.comp[c][idx];
      const real change = r2 == 0 ? inf : l2_norm_coeff(difference(base, out));
      out = base;
      if (r2 > 0 && change <= 1e-11 * std::max(a_l2, l2_norm_coeff(out))) break;
      gb = projected_convection(out, out, Dealias::two_thirds);
    }
    return out;
  };

  auto g_of = [&](const VectorField& s) {
    return projected_convection(s, s, Dealias::two_thirds);
  };

  // First two nodes get a second pass so the leading cell uses the same
  // extrapolated anchor as duhamel_bilinear.
  VectorField g_data = g_of(a);
  advance(a, g_data, nodes[0], r.u.states[0]);
  VectorField g0 = g_of(r.u.states[0]);
  advance(r.u.states[0], g0, nodes[1] - nodes[0], r.u.states[1]);
  VectorField g1 = g_of(r.u.states[1]);

  VectorField anchor = g0;
  add_scaled(anchor, -nodes[0] / (nodes[1] - nodes[0]), difference(g1, g0));
  advance(a, anchor, nodes[0], r.u.states[0]);
  g0 = g_of(r.u.states[0]);
  advance(r.u.states[0], g0, nodes[1] - nodes[0], r.u.states[1]);

  VectorField g_prev = g_of(r.u.states[1]);
  for (int i = 2; i < m1; ++i) {
    advance(r.u.states[i - 1], g_prev, nodes[i] - nodes[i - 1], r.u.states[i]);
    const real grown = l2_norm_coeff(r.u.states[i]);
    if (!std::isfinite(grown) || grown > cfg.blowup_threshold * std::max(a_l2, 1e-300)) {
      r.status = SolveStatus::blowup;
      r.failed_step = i;
      for (int j = i + 1; j < m1; ++j) r.u.states[j] = r.u.states[i];
      return r;
    }
    if (i + 1 < m1) g_prev = g_of(r.u.states[i]);
  }
  return r;
}

std::vector<Trajectory> time_derivative_levels(const Trajectory& u, int m) {
  validate_trajectory(u);
  if (m < 0 || m > 3) throw std::invalid_argument("time_derivative: m must be in [0, 3]");

  const std::vector<real> lam = laplacian_table(u.dom());
  const int lim = dealias_limit(u.dom());

  // Fraction of energy near the top of the resolved band; each level weights
  // the spectrum by |k|^2, so an unresolved request shows up here.
  auto band_top_fraction = [&](const VectorField& f) {
    const int edge = 2 * lim / 3;
    real top = 0.0, total = 0.0;
    for_each_mode(f.dom, [&](std::size_t idx, const std::array<int, 3>& n) {
      real e = 0.0;
      for (int c = 0; c < f.dom.d; ++c) e += std::norm(f.comp[c][idx]);
      total += e;
      const int ninf = std::max({std::abs(n[0]), std::abs(n[1]), std::abs(n[2])});
      if (ninf > edge) top += e;
    });
    return total > 0.0 ? top / total : 0.0;
  };

  static const int binom[3][3] = {{1, 0, 0}, {1, 1, 0}, {1, 2, 1}};

  std::vector<Trajectory> levels;
  levels.push_back(u);
  for (int lvl = 1; lvl <= m; ++lvl) {
    Trajectory dl;
    dl.grid = u.grid;
    dl.states.reserve(u.states.size());
    real worst = 0.0;
    for (int i = 0; i < u.nodes(); ++i) {
      VectorField acc = levels[lvl - 1].states[i];
      apply_laplacian(acc, lam);
      for (int j = 0; j <= lvl - 1; ++j) {
        VectorField conv = projected_convection(levels[j].states[i],
                                                levels[lvl - 1 - j].states[i], Dealias::two_thirds);
        add_scaled(acc, -static_cast<real>(binom[lvl - 1][j]), conv);
      }
      worst = std::max(worst, band_top_fraction(acc));
      dl.states.push_back(std::move(acc));
    }
    if (worst > 0.25)
      throw std::domain_error("time_derivative: level " + std::to_string(lvl) +
                              " not resolved on this grid (band-edge energy fraction " +
                              std::to_string(worst) + ")");
    levels.push_back(std::move(dl));
  }
  return levels;
}

Trajectory time_derivative(const Trajectory& u, int m) {
  return std::move(time_derivative_levels(u, m).back());
}

}  // namespace mildns
