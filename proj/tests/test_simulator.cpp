#include <cmath>
#include <numeric>
#include <vector>

#include "cutoff/errors.hpp"
#include "cutoff/graph.hpp"
#include "cutoff/profile.hpp"
#include "cutoff/rng.hpp"
#include "cutoff/simulator.hpp"
#include "cutoff/spectral.hpp"
#include "cutoff/stationary.hpp"
#include "doctest.h"

using namespace cutoff;

namespace {

GraphWithBoundary segment(int n, double beta0, double beta1, double rb0, double rb1) {
  double s0 = beta0 * (n + 1) / (2.0 * n * n);
  double s1 = beta1 * (n + 1) / (2.0 * n * n);
  std::vector<FaceSpec> faces = {FaceSpec::open(rb0 * s0, (1 - rb0) * s0, 0.0),
                                 FaceSpec::open(rb1 * s1, (1 - rb1) * s1, 0.0)};
  return build_lattice(1, n, faces);
}

}  // namespace

TEST_CASE("splitmix streams are reproducible and distinct") {
  SplitMix a(1, 0), b(1, 0), c(1, 1), d(2, 0);
  for (int i = 0; i < 64; i++) {
    uint64_t va = a.next();
    CHECK(va == b.next());
    CHECK(va != c.next());
    CHECK(va != d.next());
  }
  SplitMix u(99, 7);
  for (int i = 0; i < 1000; i++) {
    double x = u.uniform();
    CHECK(x > 0);
    CHECK(x < 1);
  }
}

TEST_CASE("closed dynamics conserve particles") {
  auto g = build_torus(2, 6);
  SplitMix rng(11, 0);
  std::vector<int> eta(g.size(), 0);
  for (int i = 0; i < g.size() / 3; i++) eta[i] = 1;
  int before = std::accumulate(eta.begin(), eta.end(), 0);
  advance_state(g, eta, 3.0, rng);
  CHECK(std::accumulate(eta.begin(), eta.end(), 0) == before);
  for (int v : eta) CHECK((v == 0 || v == 1));
}

TEST_CASE("single particle marginal matches the spectral heat kernel") {
  int n = 8;
  auto g = build_torus(1, n);
  auto sp = eigendecompose(assemble_laplacian(g));
  const double dur = 0.02;  // short time so the distribution is not yet flat
  const int reps = 40000;
  std::vector<double> occupancy(n, 0.0);
  for (int r = 0; r < reps; r++) {
    SplitMix rng(515, uint64_t(r));
    std::vector<int> eta(n, 0);
    eta[0] = 1;
    advance_state(g, eta, dur, rng);
    for (int x = 0; x < n; x++) occupancy[x] += eta[x];
  }
  // exact kernel: p_t(x) = (1/n) sum_j e^{-lambda_j t} psi_j(0) psi_j(x)
  for (int x = 0; x < n; x++) {
    double p = 0;
    for (int j = 0; j < n; j++)
      p += std::exp(-sp.eigenvalues[j] * dur) * sp.eigenvectors(0, j) * sp.eigenvectors(x, j);
    p /= n;
    double hat = occupancy[x] / reps;
    double se = std::sqrt(p * (1 - p) / reps);
    CHECK(std::abs(hat - p) < 3.5 * se + 1e-6);
  }
}

TEST_CASE("reservoir dynamics settle at the stationary density") {
  auto g = segment(8, 2.0, 2.0, 0.15, 0.85);
  auto lap = assemble_laplacian(g);
  auto st = solve_stationary_density(g, lap);
  SplitMix rng(77, 0);
  std::vector<int> eta(g.size(), 0);
  advance_state(g, eta, 25.0, rng);  // burn in

  const int batches = 20, per_batch = 300;
  std::vector<double> mean(g.size(), 0.0), var(g.size(), 0.0);
  std::vector<std::vector<double>> bm(batches, std::vector<double>(g.size(), 0.0));
  for (int b = 0; b < batches; b++) {
    for (int s = 0; s < per_batch; s++) {
      advance_state(g, eta, 0.3, rng);
      for (int x = 0; x < g.size(); x++) bm[b][x] += eta[x];
    }
    for (auto& v : bm[b]) v /= per_batch;
  }
  for (int x = 0; x < g.size(); x++) {
    for (int b = 0; b < batches; b++) mean[x] += bm[b][x];
    mean[x] /= batches;
    for (int b = 0; b < batches; b++) var[x] += std::pow(bm[b][x] - mean[x], 2);
    double se = std::sqrt(var[x] / (batches - 1) / batches);
    CHECK(std::abs(mean[x] - st.rho_ss[x]) < 3.5 * se + 2e-3);
  }
}

TEST_CASE("sample_stationary honors the model class") {
  auto torus = build_torus(1, 16);
  auto spt = eigendecompose(assemble_laplacian(torus));
  std::vector<double> half(torus.size(), 0.5);
  auto eta = sample_stationary(torus, spt, half, 5);
  CHECK(std::accumulate(eta.begin(), eta.end(), 0) == 8);  // exact count

  // equilibrium reservoirs: product measure, mean matches rho_bar
  auto g = segment(8, 2.0, 2.0, 0.3, 0.3);
  auto lap = assemble_laplacian(g);
  auto sp = eigendecompose(lap);
  auto st = solve_stationary_density(g, lap);
  double acc = 0;
  const int reps = 20000;
  for (int r = 0; r < reps; r++) {
    auto s = sample_stationary(g, sp, st.rho_ss, uint64_t(r));
    acc += std::accumulate(s.begin(), s.end(), 0);
  }
  double mean = acc / (reps * g.size());
  CHECK(std::abs(mean - 0.3) < 3.5 * std::sqrt(0.3 * 0.7 / (reps * g.size())) + 1e-3);
}

TEST_CASE("nonequilibrium stationary samples reproduce two point statistics") {
  auto g = segment(8, 2.0, 2.0, 0.1, 0.9);
  auto lap = assemble_laplacian(g);
  auto sp = eigendecompose(lap);
  auto st = solve_stationary_density(g, lap);
  auto corr = stationary_correlation(g, st.rho_ss);
  const int reps = 12000;
  int m = g.size();
  std::vector<double> occ(m, 0.0);
  double pair03 = 0, pair45 = 0;
  for (int r = 0; r < reps; r++) {
    auto s = sample_stationary(g, sp, st.rho_ss, uint64_t(1000 + r));
    for (int x = 0; x < m; x++) occ[x] += s[x];
    pair03 += s[0] * s[3];
    pair45 += s[4] * s[5];
  }
  for (int x = 0; x < m; x++) {
    double se = std::sqrt(st.rho_ss[x] * (1 - st.rho_ss[x]) / reps);
    CHECK(std::abs(occ[x] / reps - st.rho_ss[x]) < 3.5 * se + 2e-3);
  }
  auto expect = [&](int x, int y) { return corr.phi(x, y) + st.rho_ss[x] * st.rho_ss[y]; };
  CHECK(std::abs(pair03 / reps - expect(0, 3)) < 3.5 * std::sqrt(0.25 / reps) + 2e-3);
  CHECK(std::abs(pair45 / reps - expect(4, 5)) < 3.5 * std::sqrt(0.25 / reps) + 2e-3);
}

TEST_CASE("observe_z matches the projection coefficient at the start time") {
  auto g = build_torus(1, 32);
  auto sp = eigendecompose(assemble_laplacian(g));
  std::vector<double> rho(g.size(), 0.5);
  auto eta = extremal_config(g, sp, rho, 0.5);
  int j = sp.first_nonzero;
  double t0 = -0.5 * std::log(double(g.size()));
  double cj = 0;
  for (int x = 0; x < g.size(); x++) cj += (eta[x] - 0.5) * sp.eigenvectors(x, j);
  cj /= g.size();
  CHECK(observe_z(eta, sp, rho, j, t0) == doctest::Approx(cj).epsilon(1e-12));
  // convention: identically zero before the start time
  CHECK(observe_z(eta, sp, rho, j, t0 - 0.1) == 0.0);
  // grows by e^{lambda_1 (t - t0)/lambda_1} = e^{t - t0} in profile time
  CHECK(observe_z(eta, sp, rho, j, t0 + 1.0) ==
        doctest::Approx(cj * std::exp(1.0)).epsilon(1e-12));
}

TEST_CASE("simulate is deterministic and tracks observables") {
  auto g = build_torus(1, 16);
  auto sp = eigendecompose(assemble_laplacian(g));
  std::vector<double> rho(g.size(), 0.5);
  auto eta0 = extremal_config(g, sp, rho, 0.5);

  SimConfig cfg;
  cfg.init = SimConfig::Init::configuration;
  cfg.eta0 = eta0;
  cfg.horizon = 1e-9;  // effective end time is the last recording time
  cfg.seed = 424242;
  cfg.replica_count = 8;
  ObservableSchedule sch;
  sch.j_set = {sp.first_nonzero};
  sch.t_profile = {-0.5, 0.0, 0.5};

  auto a = simulate(g, cfg, sch, sp, rho);
  auto b = simulate(g, cfg, sch, sp, rho);
  REQUIRE(int(a.replicas.size()) == 8);
  for (int r = 0; r < 8; r++) {
    CHECK(a.replicas[r].z == b.replicas[r].z);
    CHECK(a.replicas[r].qv_bulk == b.replicas[r].qv_bulk);
    CHECK(a.replicas[r].qv_boundary == b.replicas[r].qv_boundary);
    CHECK(a.replicas[r].events == b.replicas[r].events);
    CHECK(a.replicas[r].events > 0);
    // closed graph: every attempted move across an occupied/empty edge counts
    CHECK(a.replicas[r].effective_events <= a.replicas[r].events);
    // quadratic variation accumulates over time
    const auto& qv = a.replicas[r].qv_bulk[0];
    for (size_t k = 1; k < qv.size(); k++) CHECK(qv[k] >= qv[k - 1]);
    for (const auto& row : a.replicas[r].qv_boundary)
      for (double v : row) CHECK(v == 0.0);  // no reservoirs
    CHECK(a.replicas[r].max_jump[0] > 0);
    // |dZ| <= 2 e^{lambda_1 tau_end} ||psi||_inf / |V|, tau_end at the last record
    double tau_end = std::log(16.0) / (2 * sp.lambda1()) + 0.5 / sp.lambda1();
    double psi_inf = 0;
    for (int x = 0; x < 16; x++)
      psi_inf = std::max(psi_inf, std::abs(sp.eigenvectors(x, sp.first_nonzero)));
    CHECK(a.replicas[r].max_jump[0] <=
          2 * std::exp(sp.lambda1() * tau_end) * psi_inf / 16.0 + 1e-12);
  }
}

TEST_CASE("simulate validates its schedule") {
  auto g = build_torus(1, 8);
  auto sp = eigendecompose(assemble_laplacian(g));
  std::vector<double> rho(g.size(), 0.5);
  SimConfig cfg;
  cfg.eta0.assign(g.size(), 0);
  cfg.horizon = -1.0;
  ObservableSchedule sch;
  sch.j_set = {sp.first_nonzero};
  sch.t_profile = {0.0};
  CHECK_THROWS_AS(simulate(g, cfg, sch, sp, rho), Error);
}

TEST_CASE("estimate_tv separates shifted Gaussians") {
  // TV( N(0,1), N(1,1) ) = erf(1 / (2 sqrt 2)) ~ 0.2763
  const int reps = 100000;
  std::vector<std::vector<double>> a(reps, std::vector<double>(1)),
      b(reps, std::vector<double>(1));
  SplitMix rng(8080, 0);
  auto normal = [&]() {
    double u1 = rng.uniform(), u2 = rng.uniform();
    return std::sqrt(-2 * std::log(u1)) * std::cos(2 * std::acos(-1.0) * u2);
  };
  for (int i = 0; i < reps; i++) {
    a[i][0] = normal();
    b[i][0] = normal() + 1.0;
  }
  auto tv = estimate_tv(a, b);
  double expect = std::erf(1.0 / (2 * std::sqrt(2.0)));
  CHECK(std::abs(tv.gaussian - expect) < 0.01);
  CHECK(std::abs(tv.nonparametric - expect) < 0.02);
  CHECK(tv.ci_lo <= tv.nonparametric);
  CHECK(tv.nonparametric <= tv.ci_hi);
  CHECK(tv.ci_hi - tv.ci_lo < 0.05);
}

TEST_CASE("estimate_tv on identical distributions stays near zero") {
  const int reps = 20000;
  std::vector<std::vector<double>> a(reps, std::vector<double>(2)),
      b(reps, std::vector<double>(2));
  SplitMix rng(6, 1);
  for (int i = 0; i < reps; i++)
    for (int d = 0; d < 2; d++) {
      a[i][d] = rng.uniform();
      b[i][d] = rng.uniform();
    }
  auto tv = estimate_tv(a, b);
  CHECK(tv.gaussian < 0.03);
  CHECK(tv.nonparametric < 0.03);
}

TEST_CASE("estimate_tv rejects degenerate samples") {
  std::vector<std::vector<double>> a(50, std::vector<double>(1, 1.0));
  std::vector<std::vector<double>> b(50, std::vector<double>(1, 1.0));
  CHECK_THROWS_AS(estimate_tv(a, b), Error);
}

TEST_CASE("martingale mean of the rescaled observable is flat in time") {
  auto g = build_torus(1, 16);
  auto sp = eigendecompose(assemble_laplacian(g));
  std::vector<double> rho(g.size(), 0.5);
  auto eta0 = extremal_config(g, sp, rho, 0.5);
  int j = sp.first_nonzero;
  double c0 = 0;
  for (int x = 0; x < g.size(); x++) c0 += (eta0[x] - 0.5) * sp.eigenvectors(x, j);
  c0 /= g.size();

  SimConfig cfg;
  cfg.eta0 = eta0;
  cfg.horizon = 1e-9;
  cfg.seed = 97;
  cfg.replica_count = 4000;
  ObservableSchedule sch;
  sch.j_set = {j};
  sch.t_profile = {0.0, 1.0};
  auto ens = simulate(g, cfg, sch, sp, rho);
  for (int k = 0; k < 2; k++) {
    double mean = 0, var = 0;
    for (const auto& r : ens.replicas) mean += r.z[0][k];
    mean /= cfg.replica_count;
    for (const auto& r : ens.replicas) var += std::pow(r.z[0][k] - mean, 2);
    double se = std::sqrt(var / (cfg.replica_count - 1) / cfg.replica_count);
    CHECK(std::abs(mean - c0) < 3.5 * se + 1e-4);
  }
}

TEST_CASE("run_experiment produces a coherent report") {
  auto g = build_torus(1, 16);
  auto lap = assemble_laplacian(g);
  auto sp = eigendecompose(lap);
  auto st = solve_stationary_density(g, lap, 0.5);
  auto eta0 = extremal_config(g, sp, st.rho_ss, 0.5);
  auto pred = make_profile_prediction(g, sp, st.rho_ss, eta0);
  std::vector<double> grid = {-1.0, 0.0, 1.0};
  auto report = run_experiment(g, sp, st, pred, grid, 400, 13579);
  REQUIRE(report.rows.size() == 3);
  CHECK(report.replicas == 400);
  CHECK(report.seed == 13579);
  for (size_t k = 0; k < 3; k++) {
    const auto& row = report.rows[k];
    CHECK(row.t == grid[k]);
    CHECK(row.predicted_tv == doctest::Approx(pred.profile(grid[k])));
    CHECK(row.predicted_xi == doctest::Approx(pred.xi1(grid[k])));
    CHECK(row.empirical_tv >= 0);
    CHECK(row.empirical_tv <= 1);
    CHECK(row.ci_lo <= row.ci_hi);
    CHECK(row.mean_qv_bulk >= 0);
  }
  // empirical separation decreases along the grid
  CHECK(report.rows[0].empirical_tv > report.rows[2].empirical_tv);
}

TEST_CASE("thread budget respects the environment cap") {
  CHECK(thread_budget() >= 1);
}
