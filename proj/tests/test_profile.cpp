#include <algorithm>
#include <cmath>
#include <vector>

#include "cutoff/errors.hpp"
#include "cutoff/graph.hpp"
#include "cutoff/profile.hpp"
#include "cutoff/rng.hpp"
#include "cutoff/spectral.hpp"
#include "cutoff/stationary.hpp"
#include "doctest.h"

using namespace cutoff;

namespace {

const double kPi = std::acos(-1.0);

struct ClosedCtx {
  GraphWithBoundary g;
  SpectralDecomposition sp;
  std::vector<double> rho_ss;
};

ClosedCtx torus_ctx(int dim, int n, double rho) {
  ClosedCtx c;
  c.g = build_torus(dim, n);
  c.sp = eigendecompose(assemble_laplacian(c.g));
  c.rho_ss.assign(c.g.size(), rho);
  return c;
}

}  // namespace

TEST_CASE("pi function values and crossing") {
  CHECK(pi_function(1, 0.5) == doctest::Approx(std::sqrt(2.0) / kPi).epsilon(1e-14));
  CHECK(pi_function(2, 0.25) == doctest::Approx(pi_function(1, 0.25)).epsilon(1e-12));
  for (int j : {1, 2, 3}) {
    CHECK_THROWS_AS(pi_function(j, 0.0), Error);
    CHECK(pi_function(j, 1e-9) < 1e-4);  // vanishes toward rho = 0
    for (double rho : {0.1, 0.3, 0.5, 0.7}) CHECK(pi_function(j, rho) > 0);
  }
  // j = 2 beats j = 1 below the crossing, loses above it
  CHECK(pi_function(2, 0.1) > pi_function(1, 0.1));
  CHECK(pi_function(2, 0.4) < pi_function(1, 0.4));
}

TEST_CASE("eigenprojection basics") {
  auto c = torus_ctx(1, 16, 0.5);
  std::vector<double> zero(c.g.size(), 0.0);
  auto p0 = eigenprojection_from_vector(c.sp, zero);
  CHECK(p0.norm == doctest::Approx(0.0));
  CHECK(int(p0.c.size()) == c.sp.multiplicity);

  // gamma0 = psi_1 / 3 projects with norm 1/3
  auto psi = c.sp.eigenvectors.column(c.sp.first_nonzero);
  for (auto& v : psi) v /= 3;
  auto p1 = eigenprojection_from_vector(c.sp, psi);
  CHECK(p1.norm == doctest::Approx(1.0 / 3).epsilon(1e-12));
}

TEST_CASE("extremal block on the circle maximizes the projection") {
  auto c = torus_ctx(1, 32, 0.5);
  auto eta = extremal_config(c.g, c.sp, c.rho_ss, 0.5);
  int count = 0;
  for (int v : eta) count += v;
  CHECK(count == 17);  // floor(rho |V|) + 1

  // occupied sites form one contiguous arc (mod n)
  int changes = 0;
  for (int i = 0; i < 32; i++) changes += eta[i] != eta[(i + 1) % 32];
  CHECK(changes == 2);

  double best = eigenprojection(c.sp, c.rho_ss, eta).norm;
  SplitMix rng(404, 0);
  for (int trial = 0; trial < 200; trial++) {
    std::vector<int> cand(32, 0);
    int placed = 0;
    while (placed < count) {
      int v = int(rng.below(32));
      if (!cand[v]) { cand[v] = 1; placed++; }
    }
    CHECK(eigenprojection(c.sp, c.rho_ss, cand).norm <= best + 1e-12);
  }
}

TEST_CASE("extremal projection approaches sqrt(2)/pi") {
  auto c = torus_ctx(1, 64, 0.5);
  auto eta = extremal_config(c.g, c.sp, c.rho_ss, 0.5);
  auto p = eigenprojection(c.sp, c.rho_ss, eta);
  CHECK(p.norm == doctest::Approx(std::sqrt(2.0) / kPi).epsilon(0.05));
  CHECK(std::abs(p.norm - std::sqrt(2.0) / kPi) < 0.02);
}

TEST_CASE("extremal shape switches with density in 2d") {
  auto low = torus_ctx(2, 12, 0.1);
  auto eta = extremal_config(low.g, low.sp, low.rho_ss, 0.1);
  // low density: compact box, bounding square of side ~ sqrt(rho)
  int count = 0;
  double max0 = 0, max1 = 0;
  for (int v = 0; v < low.g.size(); v++) {
    if (!eta[v]) continue;
    count++;
    max0 = std::max(max0, low.g.vertices[v][0]);
    max1 = std::max(max1, low.g.vertices[v][1]);
  }
  CHECK(count == 15);
  CHECK(max0 < 0.45);
  CHECK(max1 < 0.45);

  auto high = torus_ctx(2, 12, 0.4);
  auto slab = extremal_config(high.g, high.sp, high.rho_ss, 0.4);
  // moderate density: slab spanning one full direction
  double span0 = 0, span1 = 0;
  for (int v = 0; v < high.g.size(); v++) {
    if (!slab[v]) continue;
    span0 = std::max(span0, high.g.vertices[v][0]);
    span1 = std::max(span1, high.g.vertices[v][1]);
  }
  CHECK(std::max(span0, span1) > 0.9);
  CHECK(std::min(span0, span1) < 0.5);
}

TEST_CASE("reservoir extremal picks the better constant configuration") {
  // rho_bar < 1/2 everywhere: all ones is farther from equilibrium
  double s = 1.0 * 17 / (2.0 * 256);
  std::vector<FaceSpec> faces = {FaceSpec::open(0.2 * s, 0.8 * s, 0.0),
                                 FaceSpec::open(0.2 * s, 0.8 * s, 0.0)};
  auto g = build_lattice(1, 16, faces);
  auto sp = eigendecompose(assemble_laplacian(g));
  auto st = solve_stationary_density(g, assemble_laplacian(g));
  auto eta = extremal_config(g, sp, st.rho_ss);
  for (int v : eta) CHECK(v == 1);
  auto forced = extremal_config(g, sp, st.rho_ss, std::nullopt, InitMode::all_zeros);
  for (int v : forced) CHECK(v == 0);
  CHECK(eigenprojection(sp, st.rho_ss, eta).norm >=
        eigenprojection(sp, st.rho_ss, forced).norm);
}

TEST_CASE("xi scaling identities") {
  auto c = torus_ctx(1, 16, 0.3);
  int j = c.sp.first_nonzero;
  auto x0 = xi(c.g, c.sp, c.rho_ss, j, 0.0);
  auto x1 = xi(c.g, c.sp, c.rho_ss, j, 1.0);
  CHECK(x1.total() == doctest::Approx(std::exp(2.0) * x0.total()).epsilon(1e-12));
  CHECK(x1.boundary == 0.0);
  // constant density rho: Xi_j(0) = rho(1-rho) by spectral completeness
  CHECK(x0.total() == doctest::Approx(0.3 * 0.7).epsilon(1e-10));
}

TEST_CASE("xi boundary term activates off equilibrium") {
  double s = 2.0 * 17 / (2.0 * 256);
  std::vector<FaceSpec> faces = {FaceSpec::open(0.1 * s, 0.9 * s, 0.0),
                                 FaceSpec::open(0.9 * s, 0.1 * s, 0.0)};
  auto g = build_lattice(1, 16, faces);
  auto lap = assemble_laplacian(g);
  auto sp = eigendecompose(lap);
  auto st = solve_stationary_density(g, lap);
  auto x = xi(g, sp, st.rho_ss, sp.first_nonzero, 0.0);
  CHECK(x.bulk > 0);
  CHECK(std::abs(x.boundary) > 0);
  CHECK(x.total() > 0);
}

TEST_CASE("xi rejects near-zero eigenvalues") {
  auto c = torus_ctx(1, 8, 0.5);
  CHECK_THROWS_AS(xi(c.g, c.sp, c.rho_ss, 0, 0.0), Error);
}

TEST_CASE("limit profile endpoints and monotonicity") {
  CHECK(limit_profile(0.0, 0.25) == doctest::Approx(0.0));
  // analytic identity at t = 0 on the circle at rho = 1/2
  double c = std::sqrt(2.0) / kPi;
  CHECK(limit_profile(c, 0.25) == doctest::Approx(std::erf(1.0 / kPi)).epsilon(1e-14));
  CHECK_THROWS_AS(limit_profile(0.5, 0.0), Error);
  CHECK_THROWS_AS(limit_profile(0.5, -1.0), Error);
  double prev = 1.0;
  for (double xiv : {0.01, 0.1, 1.0, 10.0}) {
    double p = limit_profile(0.5, xiv);
    CHECK(p < prev);
    CHECK(p > 0);
    CHECK(p <= 1.0);
    prev = p;
  }
}

TEST_CASE("prediction ties the pieces together") {
  auto c = torus_ctx(1, 64, 0.5);
  auto eta = extremal_config(c.g, c.sp, c.rho_ss, 0.5);
  auto pred = make_profile_prediction(c.g, c.sp, c.rho_ss, eta);
  CHECK(pred.graph_size == 64);
  CHECK(pred.lambda1 == doctest::Approx(c.sp.lambda1()));
  CHECK(pred.t_n == doctest::Approx(std::log(64.0) / (2 * c.sp.lambda1())).epsilon(1e-14));
  CHECK(pred.xi1(0.0) == doctest::Approx(0.25).epsilon(1e-10));
  // profile(t) = erf(c*/(2 sqrt(2 Xi_1(t)))), decreasing through ~erf(e^{-t}/pi)
  double prev = 1.0;
  for (double t : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
    double p = pred.profile(t);
    CHECK(p <= prev);
    CHECK(p == doctest::Approx(std::erf(std::exp(-t) / kPi)).epsilon(0.08));
    prev = p;
  }
}

TEST_CASE("cutoff schedule in physical time") {
  auto c = torus_ctx(1, 64, 0.5);
  auto sch = cutoff_schedule(c.g, c.sp, 0.0);
  double tn = std::log(64.0) / (2 * c.sp.lambda1());
  CHECK(sch.physical_time == doctest::Approx(c.g.time_scale * tn).epsilon(1e-14));
  CHECK(sch.window == doctest::Approx(c.g.time_scale / c.sp.lambda1()).epsilon(1e-14));
  // leading order n^2 log n / (2 (2 pi)^2)
  double heur = 64.0 * 64.0 * std::log(64.0) / (2 * 4 * kPi * kPi);
  CHECK(sch.physical_time == doctest::Approx(heur).epsilon(0.05));
  auto later = cutoff_schedule(c.g, c.sp, 1.0);
  CHECK(later.physical_time - sch.physical_time ==
        doctest::Approx(sch.window).epsilon(1e-12));
}

TEST_CASE("gasket eigenvalue oracle") {
  double lim = sg_lambda1_oracle();
  CHECK(lim == doctest::Approx(11.2107).epsilon(1e-3));
  // consistency with dense diagonalization at level 4
  std::vector<FaceSpec> corners(3, FaceSpec::open(0.5, 0.5, 0.0));
  auto g = build_sierpinski(4, corners);
  // stiffen the corners toward the Dirichlet regime
  double big = 1e6 * g.size() / (3.0 * g.time_scale);
  for (int a : g.boundary) {
    g.rates_plus[a] = big / 2;
    g.rates_minus[a] = big / 2;
  }
  auto sp = eigendecompose(assemble_laplacian(g));
  CHECK(sp.lambda1() == doctest::Approx(lim).epsilon(0.02));
}
