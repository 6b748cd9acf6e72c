#include "doctest.h"

#include "mildns/harness.hpp"

#include <cmath>

using namespace mildns;

namespace {

Trajectory constant_trajectory(const VectorField& a, const TimeGrid& grid) {
  Trajectory c;
  c.grid = grid;
  c.states.assign(grid.nodes.size(), a);
  return c;
}

// a = (A sin x_2, 0): divergence-free single mode, heat flow is exactly
// e^{-t} a, and the convection term vanishes identically.
VectorField shear_mode(const Domain& dom, real amp) {
  VectorField a(dom);
  const int n = dom.grid_points;
  a.comp[0][1] = cplx(0.0, -0.5 * amp);
  a.comp[0][std::size_t(n - 1)] = cplx(0.0, 0.5 * amp);
  return a;
}

}  // namespace

TEST_CASE("time quadrature is exact for constant integrands") {
  const TimeGrid grid(0.8, 11, 1.7);
  const std::vector<real> phi(grid.nodes.size(), 3.0);

  // w = 0: plain L^p of a constant
  CHECK(weighted_time_lp(grid, phi, 0.0, 4.0, 0.8) ==
        doctest::Approx(3.0 * std::pow(0.8, 0.25)).epsilon(1e-14));
  // w > 0: the power weight masses telescope to the exact integral
  const real wp = 1.5 * 5.0;
  const real want = 3.0 * std::pow(std::pow(0.8, wp + 1.0) / (wp + 1.0), 1.0 / 5.0);
  CHECK(weighted_time_lp(grid, phi, 1.5, 5.0, 0.8) == doctest::Approx(want).epsilon(1e-14));
  // shrinking delta clips the window
  CHECK(weighted_time_lp(grid, phi, 0.0, 4.0, 0.4) ==
        doctest::Approx(3.0 * std::pow(0.4, 0.25)).epsilon(1e-14));
}

TEST_CASE("time quadrature sup norm") {
  const TimeGrid grid(1.0, 9, 2.0);
  std::vector<real> phi(grid.nodes.size());
  // phi = t^{-w} c makes t^w phi constant: the sup is c at every node
  for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = 2.5 * std::pow(grid.nodes[i], -0.75);
  CHECK(weighted_time_lp(grid, phi, 0.75, inf, 1.0) == doctest::Approx(2.5).epsilon(1e-13));
  // delta restricts which nodes compete
  std::vector<real> ramp(grid.nodes.size());
  for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = grid.nodes[i];
  CHECK(weighted_time_lp(grid, ramp, 0.0, inf, 0.5) <= 0.5 * (1.0 + 1e-9));

  std::vector<real> wrong(3, 1.0);
  CHECK_THROWS_AS(weighted_time_lp(grid, wrong, 0.0, 2.0, 1.0), std::invalid_argument);
}

TEST_CASE("mixed norm of the decaying shear mode") {
  const Domain dom(2, 2 * pi, 16);
  const TimeGrid fine(1.0, 64, 1.0);
  const Trajectory u = heat_trajectory(shear_mode(dom, 1.0), fine);

  // sup-in-time of the L^2 norm: the largest node is the earliest one
  MixedNormSpec sup2;
  sup2.p = inf;
  sup2.q = 2.0;
  sup2.delta = 1.0;
  CHECK(weighted_mixed_norm(u, sup2) ==
        doctest::Approx(std::exp(-fine.nodes.front()) * pi * std::sqrt(2.0)).epsilon(1e-12));

  // L^4 L^4 against the closed form c4 ((1 - e^{-4 delta})/4)^{1/4}
  MixedNormSpec l44;
  l44.p = l44.q = 4.0;
  l44.delta = 1.0;
  const real c4 = std::pow(1.5 * pi * pi, 0.25);
  const real want = c4 * std::pow(-std::expm1(-4.0) / 4.0, 0.25);
  CHECK(weighted_mixed_norm(u, l44) == doctest::Approx(want).epsilon(2e-4));
}

TEST_CASE("mixed norm assembles levels and shells with the right weights") {
  // For the shear mode the convection vanishes, so D_t u = -u exactly and all
  // the shell norms are e^{-t} times a known constant.  The full (m,n) = (1,1)
  // norm must match the four weighted_time_lp pieces assembled by hand.
  const Domain dom(2, 2 * pi, 16);
  const TimeGrid grid(1.0, 20, 2.0);
  const VectorField a = shear_mode(dom, 1.0);
  const Trajectory u = heat_trajectory(a, grid);

  MixedNormSpec spec;
  spec.p = spec.q = 4.0;
  spec.m = 1;
  spec.n = 1;
  spec.delta = 1.0;
  const real got = weighted_mixed_norm(u, spec);

  const real c0 = lebesgue_norm(a, 4.0);
  const real c1 =
      lebesgue_norm(derivative(a, {1, 0, 0}), 4.0) + lebesgue_norm(derivative(a, {0, 1, 0}), 4.0);
  std::vector<real> phi0(grid.nodes.size()), phi1(grid.nodes.size());
  for (std::size_t i = 0; i < grid.nodes.size(); ++i) {
    phi0[i] = std::exp(-grid.nodes[i]) * c0;
    phi1[i] = std::exp(-grid.nodes[i]) * c1;
  }
  real want = 0.0;
  for (int j = 0; j <= 1; ++j)
    for (int k = 0; k <= 1; ++k)
      want += weighted_time_lp(grid, k ? phi1 : phi0, j + 0.5 * k, 4.0, 1.0);
  CHECK(got == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("callback overload matches the trajectory overload") {
  const Domain dom(2, 2 * pi, 24);
  const TimeGrid grid(1.0, 10, 2.0);
  const Trajectory u =
      heat_trajectory(make_initial_data(dom, RandomDivfreeData{0.5, 2.0, 17}), grid);
  MixedNormSpec spec;
  spec.p = spec.q = 4.0;
  spec.n = 1;
  spec.delta = 1.0;
  const real a = weighted_mixed_norm(u, spec);
  const real b = weighted_mixed_norm(dom, grid, [&](int i) { return u.states[i]; }, spec);
  CHECK(a == b);

  spec.m = 1;
  CHECK_THROWS_AS(weighted_mixed_norm(dom, grid, [&](int i) { return u.states[i]; }, spec),
                  std::invalid_argument);
}

TEST_CASE("spec validation enforces the scaling line") {
  CHECK_NOTHROW(validate_spec({4.0, 4.0, 0, 1, 1.0}, 2));
  CHECK_NOTHROW(validate_spec({inf, 2.0, 0, 0, 1.0}, 2));
  CHECK_NOTHROW(validate_spec({6.0, 3.0, 0, 0, 1.0}, 2));
  CHECK_NOTHROW(validate_spec({5.0, 5.0, 0, 0, 1.0}, 3));
  CHECK_NOTHROW(validate_spec({10.0, 3.75, 0, 0, 1.0}, 3));

  CHECK_THROWS_AS(validate_spec({4.0, 3.0, 0, 0, 1.0}, 2), std::invalid_argument);   // off the line
  CHECK_THROWS_AS(validate_spec({8.0, 1.5, 0, 0, 1.0}, 2), std::invalid_argument);   // q < d
  CHECK_THROWS_AS(validate_spec({3.0, 6.0, 0, 0, 1.0}, 2), std::invalid_argument);   // p < d+2
  CHECK_THROWS_AS(validate_spec({4.0, 4.0, 0, 0, 1.0}, 3), std::invalid_argument);   // d3 line
  CHECK_THROWS_AS(validate_spec({4.0, 4.0, 0, 1, -1.0}, 2), std::invalid_argument);  // delta
  CHECK_THROWS_AS(validate_spec({4.0, 4.0, -1, 0, 1.0}, 2), std::invalid_argument);  // order

  // evaluation rejects a horizon beyond the trajectory
  const Domain dom(2, 2 * pi, 16);
  const Trajectory u = heat_trajectory(shear_mode(dom, 1.0), TimeGrid(1.0, 8, 2.0));
  MixedNormSpec far;
  far.p = far.q = 4.0;
  far.delta = 2.0;
  CHECK_THROWS_AS(weighted_mixed_norm(u, far), std::invalid_argument);
}

TEST_CASE("rate fit recovers a synthetic power law exactly") {
  const Domain dom(2, 2 * pi, 16);
  const TimeGrid grid(1.0, 16, 2.0);
  const VectorField f = make_initial_data(dom, RandomDivfreeData{1.0, 2.0, 3});

  const real sigma = -0.75;
  Trajectory u;
  u.grid = grid;
  for (real t : grid.nodes) {
    VectorField s = f;
    scale(s, std::pow(t, sigma));
    u.states.push_back(std::move(s));
  }

  const RateFit fit = smoothing_rate_fit(u, 1, 3.0, grid.nodes[2], grid.nodes[14]);
  CHECK(fit.slope == doctest::Approx(sigma).epsilon(1e-10));
  CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));

  // sub-decade window
  CHECK_THROWS_AS(smoothing_rate_fit(u, 1, 3.0, 0.3, 0.9), std::invalid_argument);
  // degenerate window
  CHECK_THROWS_AS(smoothing_rate_fit(u, 1, 3.0, 0.5, 0.1), std::invalid_argument);

  Trajectory zero;
  zero.grid = grid;
  zero.states.assign(grid.nodes.size(), VectorField(dom));
  CHECK_THROWS_AS(smoothing_rate_fit(zero, 1, 3.0, grid.nodes[2], grid.nodes[14]),
                  std::invalid_argument);
}

TEST_CASE("interpolation ratio is at most one at q = 2") {
  const TimeGrid grid(1.0, 16, 2.0);
  const Trajectory u2 = heat_trajectory(
      make_initial_data(Domain(2, 2 * pi, 24), RandomDivfreeData{1.0, 2.0, 8}), grid);
  const Trajectory u3 = heat_trajectory(
      make_initial_data(Domain(3, 2 * pi, 16), RandomDivfreeData{1.0, 2.0, 9}), grid);

  for (const Trajectory* u : {&u2, &u3}) {
    const real r = interpolation_check(*u, 1.0, 2.0, 2.0, 4.0, 1.0);
    CHECK(r > 0.0);
    CHECK(r <= 1.0 + 1e-12);
    // fractional orders obey the same multiplier inequality
    const real rf = interpolation_check(*u, 0.5, 1.7, 2.0, 6.0, 1.0);
    CHECK(rf > 0.0);
    CHECK(rf <= 1.0 + 1e-12);
  }

  CHECK_THROWS_AS(interpolation_check(u2, 2.0, 1.0, 2.0, 4.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(interpolation_check(u2, 1.0, 2.0, 0.5, 4.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(interpolation_check(u2, 1.0, 2.0, 2.0, 4.0, 5.0), std::invalid_argument);
}

TEST_CASE("product norm closed form for the shear mode") {
  const Domain dom(2, 2 * pi, 16);
  const TimeGrid grid(1.0, 12, 2.0);
  const real amp = 1.3;
  const Trajectory u = constant_trajectory(shear_mode(dom, amp), grid);

  // two gradient factors: |grad u|^2 = amp^2 cos^2 x_2, weight w = 3/2
  const real c8 = std::pow(4.0 * pi * pi * 35.0 / 128.0, 0.25);  // ||cos^2||_{L^4}
  const real want44 = amp * amp * c8 * std::pow(1.0 / 7.0, 0.25);
  CHECK(product_norm(u, {1, 1}, 4.0, 4.0, 1.0) == doctest::Approx(want44).epsilon(1e-12));

  // sup in time variant on the (inf, 2) corner of the scaling line
  const real c4 = std::pow(4.0 * pi * pi * 3.0 / 8.0, 0.5);  // ||cos^2||_{L^2}
  CHECK(product_norm(u, {1, 1}, 2.0, inf, 1.0) == doctest::Approx(amp * amp * c4).epsilon(1e-12));
}

TEST_CASE("product norm is homogeneous of degree k") {
  const Domain dom(2, 2 * pi, 24);
  const TimeGrid grid(1.0, 8, 2.0);
  const Trajectory u =
      heat_trajectory(make_initial_data(dom, RandomDivfreeData{0.7, 2.0, 21}), grid);
  Trajectory v = u;
  for (auto& s : v.states) scale(s, 3.0);

  const real base = product_norm(u, {0, 1, 1}, 4.0, 4.0, 1.0);
  const real scaled = product_norm(v, {0, 1, 1}, 4.0, 4.0, 1.0);
  CHECK(scaled == doctest::Approx(27.0 * base).epsilon(1e-12));

  CHECK_THROWS_AS(product_norm(u, {1}, 4.0, 4.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(product_norm(u, {1, -1}, 4.0, 4.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(product_norm(u, {1, 1}, 3.0, 4.0, 1.0), std::invalid_argument);
}
