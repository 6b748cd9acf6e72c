#pragma once

#include "mildns/spectral.hpp"

namespace mildns {

/// e^{t Laplacian}: per-mode factor e^{-t|k|^2}.  t >= 0.
VectorField heat_semigroup(const VectorField& f, real t);

/// Helmholtz-Leray projection onto divergence-free fields:
/// vhat -> vhat - k (k.vhat)/|k|^2 for k != 0; the mean mode is left alone.
VectorField leray_project(const VectorField& f);

/// Projected heat flow: heat_semigroup of leray_project.
VectorField stokes_semigroup(const VectorField& f, real t);

/// One time slice of the projected heat kernel.  Entry (i,j) carries the
/// amplitude coefficients e^{-s|k|^2} (delta_ij - k_i k_j/|k|^2) / L^d, with the
/// mean mode set to delta_ij / L^d, so convolving against a field reproduces the
/// stokes_semigroup multiplier.  Entries are synthesized on demand; a slice for
/// d = 3 at large N would otherwise hold d^2 full coefficient arrays.
struct OseenKernelSlice {
  Domain dom;
  real s = 0.0;

  OseenKernelSlice(const Domain& dom_, real s_);
  ScalarField entry(int i, int j) const;
};

OseenKernelSlice oseen_kernel_slice(const Domain& dom, real s);

/// Convolution of the slice against f: per-mode matrix multiply by L^d * entries.
/// Equals stokes_semigroup(f, s) coefficient-wise.
VectorField apply(const OseenKernelSlice& k, const VectorField& f);

/// Shell-averaged far-field profile: pairs (r, mean over the shell of
/// |y|^d |K(y,s)|_F), with logarithmic shells covering [5 sqrt(s), 0.4 L].
/// Self-similarity of the kernel makes this profile flat up to box effects.
std::vector<std::pair<real, real>> far_field_profile(const OseenKernelSlice& k, int shells);

/// Sum over j of the L^{q/(q-1)} grid norm of the j-th spatial gradient of the
/// kernel slice (Frobenius magnitude over the d x d entries).  Scales like
/// s^{-(q+d)/(2q)} while the Gaussian core is resolved and far from the box scale.
real kernel_gradient_norm(const Domain& dom, real s, real q);

/// Pressure recovered from the velocity: phat = -k_i k_j (u_i u_j)hat / |k|^2,
/// mean-free, with dealiased products.  Input must be divergence-free.
ScalarField pressure_from_velocity(const VectorField& u);

}  // namespace mildns
