#include "mildns/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <map>
#include <stdexcept>

namespace mildns {

Domain::Domain(int d_, real box_length_, int grid_points_)
    : d(d_), box_length(box_length_), grid_points(grid_points_) {
  if (d != 2 && d != 3) throw std::invalid_argument("Domain: d must be 2 or 3");
  if (!(box_length > 0.0) || box_length > 16.0 * pi + 1e-12)
    throw std::invalid_argument("Domain: box_length must lie in (0, 16*pi]");
  if (grid_points < 8 || grid_points % 2 != 0)
    throw std::invalid_argument("Domain: grid_points must be even and >= 8");
}

std::size_t Domain::modes() const {
  std::size_t m = 1;
  for (int j = 0; j < d; ++j) m *= static_cast<std::size_t>(grid_points);
  return m;
}

bool VectorField::is_mean_free(real tol) const {
  for (const auto& c : comp)
    if (std::abs(c[0]) > tol) return false;
  return true;
}

TimeGrid::TimeGrid(real delta_, int segments_, real grading_)
    : delta(delta_), segments(segments_), grading(grading_) {
  if (!(delta > 0.0)) throw std::invalid_argument("TimeGrid: delta must be positive");
  if (segments < 2) throw std::invalid_argument("TimeGrid: need at least 2 segments");
  if (!(grading >= 1.0)) throw std::invalid_argument("TimeGrid: grading must be >= 1");
  nodes.resize(segments + 1);
  nodes[0] = delta * std::pow(0.5 / segments, grading);
  for (int i = 1; i <= segments; ++i)
    nodes[i] = delta * std::pow(static_cast<real>(i) / segments, grading);
}

TimeGrid TimeGrid::from_nodes(std::vector<real> nodes_, real grading_tag) {
  if (nodes_.size() < 2) throw std::invalid_argument("TimeGrid: need at least 2 nodes");
  if (!(nodes_.front() > 0.0)) throw std::invalid_argument("TimeGrid: nodes must be positive");
  for (std::size_t i = 1; i < nodes_.size(); ++i)
    if (!(nodes_[i] > nodes_[i - 1]))
      throw std::invalid_argument("TimeGrid: nodes must be strictly increasing");
  TimeGrid g;
  g.delta = nodes_.back();
  g.segments = static_cast<int>(nodes_.size()) - 1;
  g.grading = grading_tag;
  g.nodes = std::move(nodes_);
  return g;
}

namespace {

// One cached c2c plan pair per (d, N).  Execution goes through a scratch buffer
// owned by the cache entry, so callers keep plain std::vector storage.
struct PlanEntry {
  fftw_complex* buf = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  std::size_t n = 0;
};

PlanEntry& plan_for(const Domain& dom) {
  static std::map<std::pair<int, int>, PlanEntry> cache;
  auto key = std::make_pair(dom.d, dom.grid_points);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  PlanEntry e;
  e.n = dom.modes();
  e.buf = fftw_alloc_complex(e.n);
  if (!e.buf) throw std::runtime_error("fftw_alloc_complex failed");
  int shape[3] = {dom.grid_points, dom.grid_points, dom.grid_points};
  e.fwd = fftw_plan_dft(dom.d, shape, e.buf, e.buf, FFTW_FORWARD, FFTW_ESTIMATE);
  e.bwd = fftw_plan_dft(dom.d, shape, e.buf, e.buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  if (!e.fwd || !e.bwd) throw std::runtime_error("fftw_plan_dft failed");
  return cache.emplace(key, e).first->second;
}

std::vector<cplx> run_plan(const Domain& dom, const std::vector<cplx>& in, bool forward) {
  if (in.size() != dom.modes()) throw std::invalid_argument("transform: size mismatch");
  PlanEntry& e = plan_for(dom);
  std::memcpy(e.buf, in.data(), e.n * sizeof(cplx));
  fftw_execute(forward ? e.fwd : e.bwd);
  std::vector<cplx> out(e.n);
  // std::complex<double> is layout-compatible with fftw_complex (double[2]).
  std::memcpy(static_cast<void*>(out.data()), e.buf, e.n * sizeof(cplx));
  return out;
}

void check_same_domain(const Domain& a, const Domain& b, const char* who) {
  if (!(a == b)) throw std::invalid_argument(std::string(who) + ": domain mismatch");
}

}  // namespace

std::vector<cplx> to_physical(const Domain& dom, const std::vector<cplx>& coeff) {
  return run_plan(dom, coeff, false);
}

std::vector<cplx> to_spectral(const Domain& dom, const std::vector<cplx>& samples) {
  std::vector<cplx> out = run_plan(dom, samples, true);
  const real s = 1.0 / static_cast<real>(dom.modes());
  for (auto& v : out) v *= s;
  return out;
}

ScalarField scalar_from_samples(const Domain& dom, const std::vector<cplx>& samples) {
  ScalarField f(dom);
  f.coeff = to_spectral(dom, samples);
  return f;
}

VectorField field_from_samples(const Domain& dom, const std::vector<std::vector<cplx>>& samples) {
  if (static_cast<int>(samples.size()) != dom.d)
    throw std::invalid_argument("field_from_samples: wrong component count");
  VectorField f(dom);
  for (int i = 0; i < dom.d; ++i) f.comp[i] = to_spectral(dom, samples[i]);
  return f;
}

std::vector<real> magnitude_samples(const VectorField& f) {
  const std::size_t n = f.dom.modes();
  std::vector<real> mag(n, 0.0);
  for (int i = 0; i < f.dom.d; ++i) {
    std::vector<cplx> phys = to_physical(f.dom, f.comp[i]);
    for (std::size_t m = 0; m < n; ++m) mag[m] += std::norm(phys[m]);
  }
  for (std::size_t m = 0; m < n; ++m) mag[m] = std::sqrt(mag[m]);
  return mag;
}

namespace {

// Per-axis derivative multiplier table.  Nyquist entries are zeroed for any
// differentiated axis; see header note on composition.
std::vector<cplx> axis_derivative_table(const Domain& dom, int order) {
  const int n = dom.grid_points;
  std::vector<cplx> t(n);
  for (int i = 0; i < n; ++i) {
    const int m = mode_of_index(i, n);
    if (order > 0 && m == -n / 2) {
      t[i] = 0.0;
      continue;
    }
    const cplx ik(0.0, dom.fundamental() * m);
    cplx v(1.0, 0.0);
    for (int p = 0; p < order; ++p) v *= ik;
    t[i] = v;
  }
  return t;
}

void derivative_in_place(const Domain& dom, std::vector<cplx>& c, const std::array<int, 3>& alpha) {
  std::array<std::vector<cplx>, 3> table;
  for (int j = 0; j < dom.d; ++j) table[j] = axis_derivative_table(dom, alpha[j]);
  const int n = dom.grid_points;
  std::size_t idx = 0;
  if (dom.d == 2) {
    for (int i0 = 0; i0 < n; ++i0) {
      const cplx m0 = table[0][i0];
      for (int i1 = 0; i1 < n; ++i1, ++idx) c[idx] *= m0 * table[1][i1];
    }
  } else {
    for (int i0 = 0; i0 < n; ++i0) {
      const cplx m0 = table[0][i0];
      for (int i1 = 0; i1 < n; ++i1) {
        const cplx m01 = m0 * table[1][i1];
        for (int i2 = 0; i2 < n; ++i2, ++idx) c[idx] *= m01 * table[2][i2];
      }
    }
  }
}

void validate_alpha(const Domain& dom, const std::array<int, 3>& alpha) {
  int total = 0;
  for (int j = 0; j < 3; ++j) {
    if (alpha[j] < 0) throw std::invalid_argument("derivative: negative order");
    if (j >= dom.d && alpha[j] != 0)
      throw std::invalid_argument("derivative: order along missing axis");
    total += alpha[j];
  }
  if (total > dom.grid_points / 3)
    throw std::invalid_argument("derivative: total order exceeds resolved band");
}

}  // namespace

ScalarField derivative(const ScalarField& f, const std::array<int, 3>& alpha) {
  validate_alpha(f.dom, alpha);
  ScalarField out = f;
  derivative_in_place(f.dom, out.coeff, alpha);
  return out;
}

VectorField derivative(const VectorField& f, const std::array<int, 3>& alpha) {
  validate_alpha(f.dom, alpha);
  VectorField out = f;
  for (auto& c : out.comp) derivative_in_place(f.dom, c, alpha);
  return out;
}

namespace {

void truncate_coeff(const Domain& dom, std::vector<cplx>& c) {
  const int lim = dealias_limit(dom);
  for_each_mode(dom, [&](std::size_t idx, const std::array<int, 3>& n) {
    if (std::abs(n[0]) > lim || std::abs(n[1]) > lim || std::abs(n[2]) > lim) c[idx] = 0.0;
  });
}

std::vector<cplx> truncated_physical(const Domain& dom, const std::vector<cplx>& c) {
  std::vector<cplx> t = c;
  truncate_coeff(dom, t);
  return to_physical(dom, t);
}

}  // namespace

void truncate_to_band(ScalarField& f) { truncate_coeff(f.dom, f.coeff); }

void truncate_to_band(VectorField& f) {
  for (auto& c : f.comp) truncate_coeff(f.dom, c);
}

ScalarField dealiased_product(const ScalarField& f, const ScalarField& g) {
  check_same_domain(f.dom, g.dom, "dealiased_product");
  const std::size_t n = f.dom.modes();
  std::vector<cplx> pf = truncated_physical(f.dom, f.coeff);
  std::vector<cplx> pg = truncated_physical(g.dom, g.coeff);
  for (std::size_t m = 0; m < n; ++m) pf[m] *= pg[m];
  ScalarField out(f.dom);
  out.coeff = to_spectral(f.dom, pf);
  truncate_coeff(f.dom, out.coeff);
  return out;
}

VectorField dealiased_product(const ScalarField& f, const VectorField& g) {
  check_same_domain(f.dom, g.dom, "dealiased_product");
  const std::size_t n = f.dom.modes();
  std::vector<cplx> pf = truncated_physical(f.dom, f.coeff);
  VectorField out(g.dom);
  for (int i = 0; i < g.dom.d; ++i) {
    std::vector<cplx> pg = truncated_physical(g.dom, g.comp[i]);
    for (std::size_t m = 0; m < n; ++m) pg[m] *= pf[m];
    out.comp[i] = to_spectral(g.dom, pg);
    truncate_coeff(g.dom, out.comp[i]);
  }
  return out;
}

VectorField raw_product(const ScalarField& f, const VectorField& g) {
  check_same_domain(f.dom, g.dom, "raw_product");
  const std::size_t n = f.dom.modes();
  std::vector<cplx> pf = to_physical(f.dom, f.coeff);
  VectorField out(g.dom);
  for (int i = 0; i < g.dom.d; ++i) {
    std::vector<cplx> pg = to_physical(g.dom, g.comp[i]);
    for (std::size_t m = 0; m < n; ++m) pg[m] *= pf[m];
    out.comp[i] = to_spectral(g.dom, pg);
  }
  return out;
}

namespace {

real grid_norm(const Domain& dom, const std::vector<real>& mag, real q) {
  if (!(q >= 1.0)) throw std::invalid_argument("lebesgue_norm: q must be >= 1");
  if (q == inf) {
    real mx = 0.0;
    for (real v : mag) mx = std::max(mx, v);
    return mx;
  }
  const real cell = std::pow(dom.spacing(), dom.d);
  real acc = 0.0;
  if (q == 2.0) {
    for (real v : mag) acc += v * v;
  } else {
    for (real v : mag) acc += std::pow(v, q);
  }
  return std::pow(acc * cell, 1.0 / q);
}

}  // namespace

real lebesgue_norm(const ScalarField& f, real q) {
  std::vector<cplx> phys = to_physical(f.dom, f.coeff);
  std::vector<real> mag(phys.size());
  for (std::size_t m = 0; m < phys.size(); ++m) mag[m] = std::abs(phys[m]);
  return grid_norm(f.dom, mag, q);
}

real lebesgue_norm(const VectorField& f, real q) {
  return grid_norm(f.dom, magnitude_samples(f), q);
}

real sobolev_norm(const VectorField& f, real s, real q) {
  VectorField g = f;
  const real k0 = f.dom.fundamental();
  std::vector<real> mult(f.dom.modes());
  for_each_mode(f.dom, [&](std::size_t idx, const std::array<int, 3>& n) {
    const real kk = k0 * k0 * (static_cast<real>(n[0]) * n[0] + static_cast<real>(n[1]) * n[1] +
                               static_cast<real>(n[2]) * n[2]);
    mult[idx] = std::pow(1.0 + kk, 0.5 * s);
  });
  for (auto& c : g.comp)
    for (std::size_t m = 0; m < c.size(); ++m) c[m] *= mult[m];
  return lebesgue_norm(g, q);
}

real l2_norm_coeff(const VectorField& f) {
  real acc = 0.0;
  for (const auto& c : f.comp)
    for (const cplx& v : c) acc += std::norm(v);
  return std::sqrt(acc * std::pow(f.dom.box_length, f.dom.d));
}

void scale(VectorField& f, real a) {
  for (auto& c : f.comp)
    for (auto& v : c) v *= a;
}

void add_scaled(VectorField& y, real a, const VectorField& x) {
  check_same_domain(y.dom, x.dom, "add_scaled");
  for (int i = 0; i < y.dom.d; ++i)
    for (std::size_t m = 0; m < y.comp[i].size(); ++m) y.comp[i][m] += a * x.comp[i][m];
}

VectorField sum(const VectorField& a, const VectorField& b) {
  VectorField out = a;
  add_scaled(out, 1.0, b);
  return out;
}

VectorField difference(const VectorField& a, const VectorField& b) {
  VectorField out = a;
  add_scaled(out, -1.0, b);
  return out;
}

void remove_mean(VectorField& f) {
  for (auto& c : f.comp) c[0] = 0.0;
}

ScalarField component(const VectorField& f, int i) {
  if (i < 0 || i >= f.dom.d) throw std::invalid_argument("component: index out of range");
  ScalarField out(f.dom);
  out.coeff = f.comp[i];
  return out;
}

real max_conjugate_asymmetry(const VectorField& f) {
  const int n = f.dom.grid_points;
  auto flip = [n](int i) { return i == 0 ? 0 : n - i; };
  real worst = 0.0;
  const int d = f.dom.d;
  for (int i = 0; i < d; ++i) {
    const auto& c = f.comp[i];
    if (d == 2) {
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          const std::size_t idx = static_cast<std::size_t>(a) * n + b;
          const std::size_t mir = static_cast<std::size_t>(flip(a)) * n + flip(b);
          worst = std::max(worst, std::abs(c[idx] - std::conj(c[mir])));
        }
    } else {
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          for (int g = 0; g < n; ++g) {
            const std::size_t idx = (static_cast<std::size_t>(a) * n + b) * n + g;
            const std::size_t mir = (static_cast<std::size_t>(flip(a)) * n + flip(b)) * n + flip(g);
            worst = std::max(worst, std::abs(c[idx] - std::conj(c[mir])));
          }
    }
  }
  return worst;
}

real divergence_linf_coeff(const VectorField& f) {
  const real k0 = f.dom.fundamental();
  real worst = 0.0;
  for_each_mode(f.dom, [&](std::size_t idx, const std::array<int, 3>& n) {
    cplx div = 0.0;
    for (int j = 0; j < f.dom.d; ++j) div += cplx(0.0, k0 * n[j]) * f.comp[j][idx];
    worst = std::max(worst, std::abs(div));
  });
  return worst;
}

real tail_energy_fraction(const VectorField& f) {
  const int lim = dealias_limit(f.dom);
  real tail = 0.0, total = 0.0;
  for_each_mode(f.dom, [&](std::size_t idx, const std::array<int, 3>& n) {
    real e = 0.0;
    for (int i = 0; i < f.dom.d; ++i) e += std::norm(f.comp[i][idx]);
    total += e;
    if (std::abs(n[0]) > lim || std::abs(n[1]) > lim || std::abs(n[2]) > lim) tail += e;
  });
  return total > 0.0 ? tail / total : 0.0;
}

}  // namespace mildns
