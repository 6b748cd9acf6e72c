#include "mildns/harness.hpp"
#include "mildns/stokes.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace mildns {

namespace {

// Taylor-Green on the box, sampled on the grid.  The samples are band limited
// (modes +-1 per axis) so to_spectral reproduces the trig identities exactly.
VectorField taylor_green(const Domain& dom) {
  const int n = dom.grid_points;
  const real k = dom.fundamental();
  std::vector<std::vector<cplx>> samples(dom.d, std::vector<cplx>(dom.modes()));
  if (dom.d == 2) {
    for (int i0 = 0; i0 < n; ++i0) {
      const real x = k * i0 * dom.spacing();
      for (int i1 = 0; i1 < n; ++i1) {
        const real y = k * i1 * dom.spacing();
        const std::size_t idx = std::size_t(i0) * n + i1;
        samples[0][idx] = std::sin(x) * std::cos(y);
        samples[1][idx] = -std::cos(x) * std::sin(y);
      }
    }
  } else {
    for (int i0 = 0; i0 < n; ++i0) {
      const real x = k * i0 * dom.spacing();
      for (int i1 = 0; i1 < n; ++i1) {
        const real y = k * i1 * dom.spacing();
        for (int i2 = 0; i2 < n; ++i2) {
          const real z = k * i2 * dom.spacing();
          const std::size_t idx = (std::size_t(i0) * n + i1) * n + i2;
          samples[0][idx] = std::sin(x) * std::cos(y) * std::cos(z);
          samples[1][idx] = -std::cos(x) * std::sin(y) * std::cos(z);
          samples[2][idx] = 0.0;
        }
      }
    }
  }
  return field_from_samples(dom, samples);
}

// Uniform in (0,1), built from the top 53 bits so the stream is identical on
// every platform (std::uniform_real_distribution is not pinned by the standard).
real uniform01(std::mt19937_64& rng) {
  return (real((rng() >> 11)) + 0.5) * 0x1.0p-53;
}

void gaussian_pair(std::mt19937_64& rng, real& a, real& b) {
  const real u1 = uniform01(rng);
  const real u2 = uniform01(rng);
  const real r = std::sqrt(-2.0 * std::log(u1));
  a = r * std::cos(2.0 * pi * u2);
  b = r * std::sin(2.0 * pi * u2);
}

VectorField random_divfree(const Domain& dom, const RandomDivfreeData& cfg) {
  if (!(cfg.amplitude > 0.0)) throw std::invalid_argument("random_divfree: amplitude must be positive");
  if (!(cfg.spectral_decay >= 0.0)) throw std::invalid_argument("random_divfree: spectral_decay must be >= 0");

  const int n = dom.grid_points;
  VectorField f(dom);

  // Draw only on the lexicographically positive half of mode space and mirror
  // the conjugate, so the field is exactly real.  Nyquist planes stay zero
  // (they are their own mirror and sit outside the dealias band anyway).
  // The envelope depends on the integer mode only, which makes fields built
  // from the same seed on different boxes exact rescalings of each other.
  for_each_mode(dom, [&](std::size_t idx, const std::array<int, 3>& m) {
    bool positive = false;
    for (int j = 0; j < 3; ++j) {
      if (m[j] == 0) continue;
      positive = m[j] > 0;
      break;
    }
    if (!positive) return;
    for (int j = 0; j < dom.d; ++j)
      if (m[j] == -n / 2) return;

    const real nn = real(m[0]) * m[0] + real(m[1]) * m[1] + real(m[2]) * m[2];
    const real env = std::pow(1.0 + nn, -0.5 * cfg.spectral_decay);

    // Mirror index: negate every axis mod N.
    std::size_t mirror = 0;
    {
      int iv[3] = {0, 0, 0};
      std::size_t rest = idx;
      for (int j = dom.d - 1; j >= 0; --j) {
        iv[j] = int(rest % n);
        rest /= n;
      }
      for (int j = 0; j < dom.d; ++j) mirror = mirror * n + std::size_t((n - iv[j]) % n);
    }

    // Each mode owns a stream derived from seed and flat index, so the draw
    // for a mode never depends on visit order or on other modes.
    std::mt19937_64 rng(cfg.seed ^ (0x9e3779b97f4a7c15ULL * (idx + 1)));
    for (int c = 0; c < dom.d; ++c) {
      real re = 0.0, im = 0.0;
      gaussian_pair(rng, re, im);
      const cplx v = env * cplx(re, im);
      f.comp[c][idx] = v;
      f.comp[c][mirror] = std::conj(v);
    }
  });

  VectorField a = leray_project(f);
  remove_mean(a);
  const real norm = lebesgue_norm(a, real(dom.d));
  if (!(norm > 0.0)) throw std::runtime_error("random_divfree: degenerate draw");
  scale(a, cfg.amplitude / norm);
  return a;
}

VectorField singular_ld(const Domain& dom, const SingularLdData& cfg) {
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0))
    throw std::invalid_argument("singular_ld: alpha must lie in (0,1)");
  if (!(cfg.mollification_radius >= dom.spacing()))
    throw std::invalid_argument("singular_ld: mollification radius below grid resolution");
  if (!(cfg.amplitude > 0.0)) throw std::invalid_argument("singular_ld: amplitude must be positive");

  const int n = dom.grid_points;
  const real L = dom.box_length;
  const real rho2 = cfg.mollification_radius * cfg.mollification_radius;
  std::array<real, 3> c = cfg.center;
  if (c[0] == 0.0 && c[1] == 0.0 && c[2] == 0.0) c = {0.5 * L, 0.5 * L, 0.5 * L};

  // Periodic radialization: (L/pi) sin(pi t / L) agrees with the minimum-image
  // distance to second order near the center but is analytic across the cut
  // planes, so the profile's spectrum decays exponentially instead of
  // inheriting kinks from the box edges.
  auto per = [L](real t) { return (L / pi) * std::sin(pi * t / L); };

  std::vector<std::vector<cplx>> samples(dom.d, std::vector<cplx>(dom.modes()));
  const real h = dom.spacing();
  if (dom.d == 2) {
    for (int i0 = 0; i0 < n; ++i0) {
      const real dx = per(i0 * h - c[0]);
      for (int i1 = 0; i1 < n; ++i1) {
        const real dy = per(i1 * h - c[1]);
        const real r2 = dx * dx + dy * dy + rho2;
        samples[0][std::size_t(i0) * n + i1] = std::pow(r2, -0.5 * cfg.alpha);
      }
    }
  } else {
    for (int i0 = 0; i0 < n; ++i0) {
      const real dx = per(i0 * h - c[0]);
      for (int i1 = 0; i1 < n; ++i1) {
        const real dy = per(i1 * h - c[1]);
        for (int i2 = 0; i2 < n; ++i2) {
          const real dz = per(i2 * h - c[2]);
          const real r2 = dx * dx + dy * dy + dz * dz + rho2;
          samples[0][(std::size_t(i0) * n + i1) * n + i2] = std::pow(r2, -0.5 * cfg.alpha);
        }
      }
    }
  }

  VectorField raw = field_from_samples(dom, samples);
  VectorField a = leray_project(raw);
  remove_mean(a);
  const real norm = lebesgue_norm(a, real(dom.d));
  if (!(norm > 0.0)) throw std::runtime_error("singular_ld: degenerate profile");
  scale(a, cfg.amplitude / norm);
  return a;
}

}  // namespace

VectorField make_initial_data(const Domain& dom, const InitialData& choice) {
  return std::visit(
      [&](const auto& c) -> VectorField {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, TaylorGreenData>) {
          return taylor_green(dom);
        } else if constexpr (std::is_same_v<T, RandomDivfreeData>) {
          return random_divfree(dom, c);
        } else if constexpr (std::is_same_v<T, SingularLdData>) {
          return singular_ld(dom, c);
        } else {
          VectorField a = read_field(c.path);
          if (!(a.dom == dom))
            throw std::invalid_argument("initial data file domain does not match the configured domain");
          return a;
        }
      },
      choice);
}

}  // namespace mildns
