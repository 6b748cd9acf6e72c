#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <limits>
#include <vector>

namespace mildns {

using real = double;
using cplx = std::complex<double>;

inline constexpr real pi = 3.14159265358979323846;
inline constexpr real inf = std::numeric_limits<real>::infinity();

/// Periodic box [0,L)^d sampled on a uniform N^d grid.
/// Fields on the box are stored as Fourier amplitudes f(x) = sum_k fhat(k) e^{ik.x}
/// in FFTW mode order (axis frequencies 0..N/2-1, -N/2..-1), row-major across axes.
struct Domain {
  int d = 2;
  real box_length = 2.0 * pi;
  int grid_points = 32;

  Domain() = default;
  Domain(int d_, real box_length_, int grid_points_);

  std::size_t modes() const;          // N^d
  real spacing() const { return box_length / grid_points; }
  real fundamental() const { return 2.0 * pi / box_length; }
  bool operator==(const Domain&) const = default;
};

/// Integer mode along one axis for storage index i in [0,N).
inline int mode_of_index(int i, int n) { return i < n / 2 ? i : i - n; }

/// Largest mode magnitude kept by the 2/3 dealiasing rule.
inline int dealias_limit(const Domain& dom) { return dom.grid_points / 3; }

/// Visit every mode: f(flat_index, integer mode triple).  The third entry is 0 for d = 2.
template <class F>
inline void for_each_mode(const Domain& dom, F&& f) {
  const int n = dom.grid_points;
  std::size_t idx = 0;
  if (dom.d == 2) {
    for (int i0 = 0; i0 < n; ++i0) {
      const int n0 = mode_of_index(i0, n);
      for (int i1 = 0; i1 < n; ++i1, ++idx) f(idx, std::array<int, 3>{n0, mode_of_index(i1, n), 0});
    }
  } else {
    for (int i0 = 0; i0 < n; ++i0) {
      const int n0 = mode_of_index(i0, n);
      for (int i1 = 0; i1 < n; ++i1) {
        const int n1 = mode_of_index(i1, n);
        for (int i2 = 0; i2 < n; ++i2, ++idx) f(idx, std::array<int, 3>{n0, n1, mode_of_index(i2, n)});
      }
    }
  }
}

struct ScalarField {
  Domain dom;
  std::vector<cplx> coeff;  // dom.modes() amplitudes

  ScalarField() = default;
  explicit ScalarField(const Domain& dom_) : dom(dom_), coeff(dom_.modes()) {}
};

struct VectorField {
  Domain dom;
  std::vector<std::vector<cplx>> comp;  // d arrays of dom.modes() amplitudes

  VectorField() = default;
  explicit VectorField(const Domain& dom_)
      : dom(dom_), comp(dom_.d, std::vector<cplx>(dom_.modes())) {}

  bool is_mean_free(real tol = 0.0) const;
};

/// Graded partition of (0, delta]: t_i = delta (i/M)^gamma for i = 1..M plus a
/// leading node t_0 = delta (1/2M)^gamma, so every node is strictly positive.
struct TimeGrid {
  real delta = 1.0;
  int segments = 16;  // M
  real grading = 2.0; // gamma
  std::vector<real> nodes;

  TimeGrid() { *this = TimeGrid(1.0, 16, 2.0); }
  TimeGrid(real delta_, int segments_, real grading_);
  static TimeGrid from_nodes(std::vector<real> nodes_, real grading_tag);
};

// Transforms.  to_physical evaluates the amplitude sum on the grid; to_spectral
// inverts it (forward FFT scaled by N^-d).  Round trip is exact to a few ulps.
std::vector<cplx> to_physical(const Domain& dom, const std::vector<cplx>& coeff);
std::vector<cplx> to_spectral(const Domain& dom, const std::vector<cplx>& samples);

ScalarField scalar_from_samples(const Domain& dom, const std::vector<cplx>& samples);
VectorField field_from_samples(const Domain& dom, const std::vector<std::vector<cplx>>& samples);

/// Pointwise Euclidean magnitude |f(x)| on the grid.
std::vector<real> magnitude_samples(const VectorField& f);

// Spectral derivative D^alpha with multiplier prod_j (i k_j)^{alpha_j}.
// The unpaired Nyquist mode is zeroed along every differentiated axis, which keeps
// real fields real and makes composition alpha then beta equal alpha+beta exactly.
ScalarField derivative(const ScalarField& f, const std::array<int, 3>& alpha);
VectorField derivative(const VectorField& f, const std::array<int, 3>& alpha);

// 2/3-rule dealiased pointwise product: inputs truncated to |n_j| <= N/3,
// multiplied on the grid, transformed back, truncated again.  Exact for inputs
// already inside the band (quadratic aliases cannot fold back in).
ScalarField dealiased_product(const ScalarField& f, const ScalarField& g);
VectorField dealiased_product(const ScalarField& f, const VectorField& g);

/// Same pointwise product without any truncation; exists so diagnostics can
/// measure what the dealiasing is removing.  Not used by the solver.
VectorField raw_product(const ScalarField& f, const VectorField& g);

// Rectangle-rule L^q norm on the grid, q in [1, inf]; vector magnitude is Euclidean.
// Exact for q = 2 on band-limited data (discrete Parseval).
real lebesgue_norm(const ScalarField& f, real q);
real lebesgue_norm(const VectorField& f, real q);

/// Bessel-potential Sobolev norm: multiplier (1+|k|^2)^{s/2}, then lebesgue_norm.
real sobolev_norm(const VectorField& f, real s, real q);

/// L^2 norm evaluated coefficient-side: sqrt(L^d sum |fhat|^2).
real l2_norm_coeff(const VectorField& f);

// Field algebra (in place where the name says so).
void scale(VectorField& f, real a);
void add_scaled(VectorField& y, real a, const VectorField& x);  // y += a x
VectorField sum(const VectorField& a, const VectorField& b);
VectorField difference(const VectorField& a, const VectorField& b);

void remove_mean(VectorField& f);
void truncate_to_band(VectorField& f);  // zero modes outside the 2/3 band
void truncate_to_band(ScalarField& f);

ScalarField component(const VectorField& f, int i);

/// Largest |fhat(k) - conj(fhat(-k))| over paired modes; 0 for real fields.
real max_conjugate_asymmetry(const VectorField& f);

/// Spectral divergence max-norm (coefficient side), for divergence-free checks.
real divergence_linf_coeff(const VectorField& f);

/// Fraction of coefficient energy carried by modes outside the 2/3 band.
real tail_energy_fraction(const VectorField& f);

}  // namespace mildns
