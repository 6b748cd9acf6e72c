#include "mildns/stokes.hpp"

#include <cmath>
#include <stdexcept>

namespace mildns {

VectorField heat_semigroup(const VectorField& f, real t) {
  if (!(t >= 0.0)) throw std::invalid_argument("heat_semigroup: t must be >= 0");
  VectorField out = f;
  const real k0 = f.dom.fundamental();
  std::vector<real> mult(f.dom.modes());
  for_each_mode(f.dom, [&](std::size_t idx, const std::array<int, 3>& n) {
    const real kk = k0 * k0 * (static_cast<real>(n[0]) * n[0] + static_cast<real>(n[1]) * n[1] +
                               static_cast<real>(n[2]) * n[2]);
    mult[idx] = std::exp(-t * kk);
  });
  for (auto& c : out.comp)
    for (std::size_t m = 0; m < c.size(); ++m) c[m] *= mult[m];
  return out;
}

VectorField leray_project(const VectorField& f) {
  VectorField out = f;
  const int d = f.dom.d;
  const int nyq = -f.dom.grid_points / 2;
  for_each_mode(f.dom, [&](std::size_t idx, const std::array<int, 3>& n) {
    // The off-diagonal part of the projector is odd in k, which has no real
    // representative on the unpaired Nyquist planes; drop them like the
    // derivative multipliers do.
    if (n[0] == nyq || n[1] == nyq || n[2] == nyq) {
      for (int j = 0; j < d; ++j) out.comp[j][idx] = 0.0;
      return;
    }
    const real kk = static_cast<real>(n[0]) * n[0] + static_cast<real>(n[1]) * n[1] +
                    static_cast<real>(n[2]) * n[2];
    if (kk == 0.0) return;  // mean mode: identity
    cplx kdotv = 0.0;
    for (int j = 0; j < d; ++j) kdotv += static_cast<real>(n[j]) * f.comp[j][idx];
    kdotv /= kk;
    for (int j = 0; j < d; ++j) out.comp[j][idx] -= static_cast<real>(n[j]) * kdotv;
  });
  return out;
}

VectorField stokes_semigroup(const VectorField& f, real t) {
  return heat_semigroup(leray_project(f), t);
}

OseenKernelSlice::OseenKernelSlice(const Domain& dom_, real s_) : dom(dom_), s(s_) {
  if (!(s > 0.0)) throw std::invalid_argument("OseenKernelSlice: s must be positive");
  // The Gaussian must decay inside the resolved band, otherwise the slice is a
  // ringing band-limited spike rather than a kernel.
  const real kmax = dom.fundamental() * (dom.grid_points / 2);
  if (s * kmax * kmax < 12.0)
    throw std::invalid_argument("OseenKernelSlice: s too small for the grid (unresolved core)");
}

ScalarField OseenKernelSlice::entry(int i, int j) const {
  if (i < 0 || i >= dom.d || j < 0 || j >= dom.d)
    throw std::invalid_argument("OseenKernelSlice::entry: index out of range");
  ScalarField e(dom);
  const real k0 = dom.fundamental();
  const real vol = std::pow(dom.box_length, dom.d);
  const real dij = i == j ? 1.0 : 0.0;
  const int nyq = -dom.grid_points / 2;
  for_each_mode(dom, [&](std::size_t idx, const std::array<int, 3>& n) {
    if (n[0] == nyq || n[1] == nyq || n[2] == nyq) return;  // dropped by the projector
    const real kk = static_cast<real>(n[0]) * n[0] + static_cast<real>(n[1]) * n[1] +
                    static_cast<real>(n[2]) * n[2];
    real proj = dij;
    if (kk > 0.0) proj -= static_cast<real>(n[i]) * n[j] / kk;
    e.coeff[idx] = std::exp(-s * k0 * k0 * kk) * proj / vol;
  });
  return e;
}

OseenKernelSlice oseen_kernel_slice(const Domain& dom, real s) { return OseenKernelSlice(dom, s); }

VectorField apply(const OseenKernelSlice& k, const VectorField& f) {
  if (!(k.dom == f.dom)) throw std::invalid_argument("apply: domain mismatch");
  const int d = k.dom.d;
  const real vol = std::pow(k.dom.box_length, k.dom.d);
  VectorField out(f.dom);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      ScalarField e = k.entry(i, j);
      for (std::size_t m = 0; m < e.coeff.size(); ++m)
        out.comp[i][m] += vol * e.coeff[m] * f.comp[j][m];
    }
  }
  return out;
}

namespace {

// Frobenius magnitude of the physical-space slice on the grid, using symmetry
// of the entries to transform only i <= j.
std::vector<real> slice_magnitude(const OseenKernelSlice& k) {
  const std::size_t n = k.dom.modes();
  std::vector<real> mag2(n, 0.0);
  for (int i = 0; i < k.dom.d; ++i)
    for (int j = i; j < k.dom.d; ++j) {
      std::vector<cplx> phys = to_physical(k.dom, k.entry(i, j).coeff);
      const real w = i == j ? 1.0 : 2.0;
      for (std::size_t m = 0; m < n; ++m) mag2[m] += w * std::norm(phys[m]);
    }
  std::vector<real> mag(n);
  for (std::size_t m = 0; m < n; ++m) mag[m] = std::sqrt(mag2[m]);
  return mag;
}

// Minimum-image radius of grid point with integer offsets (a per axis).
real min_image_radius(const Domain& dom, const std::array<int, 3>& iv) {
  const int n = dom.grid_points;
  real rr = 0.0;
  for (int j = 0; j < dom.d; ++j) {
    int a = iv[j] % n;
    if (a > n / 2) a -= n;
    const real y = dom.spacing() * a;
    rr += y * y;
  }
  return std::sqrt(rr);
}

}  // namespace

std::vector<std::pair<real, real>> far_field_profile(const OseenKernelSlice& k, int shells) {
  if (shells < 2) throw std::invalid_argument("far_field_profile: need at least 2 shells");
  const real r_lo = 5.0 * std::sqrt(k.s);
  const real r_hi = 0.4 * k.dom.box_length;
  if (!(r_lo < r_hi))
    throw std::invalid_argument("far_field_profile: window empty (s too large for the box)");

  std::vector<real> mag = slice_magnitude(k);
  std::vector<real> acc(shells, 0.0);
  std::vector<std::size_t> cnt(shells, 0);
  const real lg_lo = std::log(r_lo), lg_hi = std::log(r_hi);
  const int n = k.dom.grid_points;
  const int d = k.dom.d;
  std::size_t idx = 0;
  auto visit = [&](const std::array<int, 3>& iv) {
    const real r = min_image_radius(k.dom, iv);
    if (r < r_lo || r > r_hi) return;
    int b = static_cast<int>((std::log(r) - lg_lo) / (lg_hi - lg_lo) * shells);
    if (b == shells) b = shells - 1;
    acc[b] += std::pow(r, d) * mag[idx];
    ++cnt[b];
  };
  if (d == 2) {
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b, ++idx) visit({a, b, 0});
  } else {
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int g = 0; g < n; ++g, ++idx) visit({a, b, g});
  }

  std::vector<std::pair<real, real>> profile;
  for (int b = 0; b < shells; ++b) {
    if (cnt[b] == 0) continue;
    const real r_mid = std::exp(lg_lo + (b + 0.5) * (lg_hi - lg_lo) / shells);
    profile.emplace_back(r_mid, acc[b] / cnt[b]);
  }
  if (profile.size() < 2) throw std::invalid_argument("far_field_profile: window under-resolved");
  return profile;
}

real kernel_gradient_norm(const Domain& dom, real s, real q) {
  if (!(q >= dom.d && q <= dom.d + 2)) throw std::invalid_argument("kernel_gradient_norm: q outside [d, d+2]");
  OseenKernelSlice k(dom, s);
  const real r = q / (q - 1.0);
  const real k0 = dom.fundamental();
  const int n = dom.grid_points;
  const std::size_t nm = dom.modes();
  const real cell = std::pow(dom.spacing(), dom.d);

  real total = 0.0;
  std::vector<cplx> grad(nm);
  for (int jax = 0; jax < dom.d; ++jax) {
    std::vector<real> mag2(nm, 0.0);
    for (int i = 0; i < dom.d; ++i)
      for (int l = i; l < dom.d; ++l) {
        ScalarField e = k.entry(i, l);
        // d/dy_j of the slice; Nyquist zeroed as in derivative().
        for_each_mode(dom, [&](std::size_t idx, const std::array<int, 3>& nv) {
          const cplx ikj = nv[jax] == -n / 2 ? cplx(0.0, 0.0) : cplx(0.0, k0 * nv[jax]);
          grad[idx] = ikj * e.coeff[idx];
        });
        std::vector<cplx> phys = to_physical(dom, grad);
        const real w = i == l ? 1.0 : 2.0;
        for (std::size_t m = 0; m < nm; ++m) mag2[m] += w * std::norm(phys[m]);
      }
    real acc = 0.0;
    for (std::size_t m = 0; m < nm; ++m) acc += std::pow(mag2[m], 0.5 * r);
    total += std::pow(acc * cell, 1.0 / r);
  }
  return total;
}

ScalarField pressure_from_velocity(const VectorField& u) {
  const real k0 = u.dom.fundamental();
  real coeff_scale = 0.0;
  for (const auto& c : u.comp)
    for (const cplx& v : c) coeff_scale = std::max(coeff_scale, std::abs(v));
  const real div_scale = coeff_scale * k0 * (u.dom.grid_points / 2);
  if (divergence_linf_coeff(u) > 1e-8 * div_scale)
    throw std::invalid_argument("pressure_from_velocity: input is not divergence-free");

  const int d = u.dom.d;
  ScalarField p(u.dom);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      ScalarField prod = dealiased_product(component(u, i), component(u, j));
      const real w = i == j ? 1.0 : 2.0;
      for_each_mode(u.dom, [&](std::size_t idx, const std::array<int, 3>& nv) {
        const real kk = static_cast<real>(nv[0]) * nv[0] + static_cast<real>(nv[1]) * nv[1] +
                        static_cast<real>(nv[2]) * nv[2];
        if (kk == 0.0) return;  // pressure normalized mean-free
        p.coeff[idx] -= w * (static_cast<real>(nv[i]) * nv[j] / kk) * prod.coeff[idx];
      });
    }
  return p;
}

}  // namespace mildns
