#include "cutoff/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "cutoff/errors.hpp"

namespace cutoff {

int thread_budget() {
  if (const char* env = std::getenv("CUTOFF_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? (int)hw : 1;
}

namespace {

// Fixed-total-rate event table: every edge fires at T_N, every reservoir
// channel at its raw rate times T_N; ineffective picks are thinned.
struct EventEngine {
  const GraphWithBoundary& g;
  double total;
  std::vector<double> cum;        // cumulative channel weights
  std::vector<int> channel_site;  // boundary channels: vertex
  std::vector<int> channel_kind;  // 0 birth, 1 death
  int n_edges;

  explicit EventEngine(const GraphWithBoundary& graph) : g(graph) {
    n_edges = (int)g.edges.size();
    double tn = g.time_scale;
    double acc = 0;
    cum.reserve(n_edges + 2 * g.boundary.size());
    for (int e = 0; e < n_edges; ++e) cum.push_back(acc += tn);
    for (int a : g.boundary) {
      double rp = g.rates_plus.count(a) ? g.rates_plus.at(a) : 0.0;
      double rm = g.rates_minus.count(a) ? g.rates_minus.at(a) : 0.0;
      cum.push_back(acc += tn * rp);
      channel_site.push_back(a);
      channel_kind.push_back(0);
      cum.push_back(acc += tn * rm);
      channel_site.push_back(a);
      channel_kind.push_back(1);
    }
    total = acc;
  }

  // applies one event; returns flipped sites in flips[0..count)
  int fire(std::vector<int>& eta, SplitMix& rng, int flips[2]) const {
    double u = rng.uniform() * total;
    int c = (int)(std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
    if (c >= (int)cum.size()) c = (int)cum.size() - 1;
    if (c < n_edges) {
      auto [x, y] = g.edges[c];
      if (eta[x] == eta[y]) return 0;
      eta[x] ^= 1;
      eta[y] ^= 1;
      flips[0] = x;
      flips[1] = y;
      return 2;
    }
    int a = channel_site[c - n_edges];
    int kind = channel_kind[c - n_edges];
    if (kind == 0 ? eta[a] == 1 : eta[a] == 0) return 0;
    eta[a] ^= 1;
    flips[0] = a;
    return 1;
  }
};

// per-eigenvector incremental state for Z and the QV integrands
struct ObservableState {
  const GraphWithBoundary& g;
  const SpectralDecomposition& sp;
  const std::vector<double>& rho_ss;
  std::vector<int> j_set;
  std::vector<double> d;        // D_j = sum (eta - rho_ss) psi_j
  std::vector<double> s_bulk;   // sum over edges (eta_x-eta_y)^2 (psi_x-psi_y)^2
  std::vector<double> s_bound;  // sum_a (r_+ 1{empty} + r_- 1{occ}) psi(a)^2

  ObservableState(const GraphWithBoundary& graph, const SpectralDecomposition& spec,
                  const std::vector<double>& rho, const std::vector<int>& js,
                  const std::vector<int>& eta)
      : g(graph), sp(spec), rho_ss(rho), j_set(js) {
    int m = (int)j_set.size();
    d.assign(m, 0);
    s_bulk.assign(m, 0);
    s_bound.assign(m, 0);
    for (int q = 0; q < m; ++q) {
      int j = j_set[q];
      for (int x = 0; x < g.size(); ++x) d[q] += (eta[x] - rho_ss[x]) * sp.eigenvectors(x, j);
      for (auto [x, y] : g.edges) {
        double de = eta[x] - eta[y];
        double dp = sp.eigenvectors(x, j) - sp.eigenvectors(y, j);
        s_bulk[q] += de * de * dp * dp;
      }
      for (int a : g.boundary) s_bound[q] += boundary_weight(a, eta[a]) *
                                             sp.eigenvectors(a, j) * sp.eigenvectors(a, j);
    }
  }

  double boundary_weight(int a, int occ) const {
    if (occ == 0) return g.rates_plus.count(a) ? g.rates_plus.at(a) : 0.0;
    return g.rates_minus.count(a) ? g.rates_minus.at(a) : 0.0;
  }

  // call with eta already flipped at site v (old occupancy = 1 - eta[v]);
  // for an edge swap pass the partner as `exclude`: both endpoints flipped,
  // so the swapped edge's gradient square is unchanged and the neighbor
  // update below (which assumes eta[w] did not move) must skip it
  void site_flipped(const std::vector<int>& eta, int v, int exclude = -1) {
    for (int q = 0; q < (int)j_set.size(); ++q) {
      int j = j_set[q];
      double psi_v = sp.eigenvectors(v, j);
      d[q] += (2 * eta[v] - 1) * psi_v;
      for (int w : g.adjacency[v]) {
        if (w == exclude) continue;
        double dp = psi_v - sp.eigenvectors(w, j);
        double de_new = eta[v] - eta[w];
        double de_old = (1 - eta[v]) - eta[w];
        s_bulk[q] += (de_new * de_new - de_old * de_old) * dp * dp;
      }
      if (g.is_boundary[v])
        s_bound[q] +=
            (boundary_weight(v, eta[v]) - boundary_weight(v, 1 - eta[v])) * psi_v * psi_v;
    }
  }
};

ReplicaResult simulate_one(const GraphWithBoundary& g, const SpectralDecomposition& sp,
                           const std::vector<double>& rho_ss, std::vector<int> eta,
                           const ObservableSchedule& schedule, const EventEngine& engine,
                           double end_time, SplitMix rng) {
  int nv = g.size();
  double lam1 = sp.lambda1();
  double t_n = std::log(double(nv)) / (2 * lam1);
  int nj = (int)schedule.j_set.size();
  int nk = (int)schedule.t_profile.size();

  ReplicaResult out;
  out.z.assign(nj, std::vector<double>(nk, 0.0));
  out.qv_bulk.assign(nj, std::vector<double>(nk, 0.0));
  out.qv_boundary.assign(nj, std::vector<double>(nk, 0.0));
  out.max_jump.assign(nj, 0.0);

  std::vector<double> tau(nk);
  for (int k = 0; k < nk; ++k) tau[k] = t_n + schedule.t_profile[k] / lam1;

  ObservableState obs(g, sp, rho_ss, schedule.j_set, eta);

  double qv_factor = g.time_scale / (double(nv) * double(nv));
  std::vector<double> acc_bulk(nj, 0.0), acc_bound(nj, 0.0);
  double t_int = 0;  // QV integrated up to here
  auto integrate_to = [&](double t2) {
    if (t2 <= t_int) return;
    double w = (std::exp(2 * lam1 * t2) - std::exp(2 * lam1 * t_int)) / (2 * lam1);
    for (int q = 0; q < nj; ++q) {
      acc_bulk[q] += qv_factor * w * obs.s_bulk[q];
      acc_bound[q] += qv_factor * w * obs.s_bound[q];
    }
    t_int = t2;
  };
  auto record = [&](int k) {
    if (tau[k] < -1e-12) return;  // before microscopic zero: Z = 0 convention
    double pre = std::exp(lam1 * tau[k]) / nv;
    integrate_to(std::max(tau[k], 0.0));
    for (int q = 0; q < nj; ++q) {
      out.z[q][k] = pre * obs.d[q];
      out.qv_bulk[q][k] = acc_bulk[q];
      out.qv_boundary[q][k] = acc_bound[q];
    }
  };

  int next_k = 0;
  while (next_k < nk && tau[next_k] < -1e-12) ++next_k;  // recorded as zero already

  double t = 0;
  int flips[2];
  while (true) {
    double dt = rng.exponential(engine.total);
    double t_event = t + dt;
    while (next_k < nk && tau[next_k] <= t_event) {
      record(next_k);
      ++next_k;
    }
    if (next_k >= nk && t_event > end_time) break;
    if (t_event > end_time) t_event = end_time;  // should not happen; guards drift
    integrate_to(t_event);
    std::vector<double> d_before = obs.d;
    int count = engine.fire(eta, rng, flips);
    ++out.events;
    if (count > 0) {
      ++out.effective_events;
      if (count == 2) {
        obs.site_flipped(eta, flips[0], flips[1]);
        obs.site_flipped(eta, flips[1], flips[0]);
      } else {
        obs.site_flipped(eta, flips[0]);
      }
      double pre = std::exp(lam1 * t_event) / nv;
      for (int q = 0; q < nj; ++q)
        out.max_jump[q] = std::max(out.max_jump[q], pre * std::abs(obs.d[q] - d_before[q]));
    }
    t = t_event;
  }
  return out;
}

std::vector<int> initial_state(const GraphWithBoundary& g, const SpectralDecomposition& sp,
                               const std::vector<double>& rho_ss, const SimConfig& config,
                               int replica) {
  switch (config.init) {
    case SimConfig::Init::configuration:
      if ((int)config.eta0.size() != g.size())
        throw Error(ErrorCode::DimensionMismatch, "eta0 size mismatch");
      return config.eta0;
    case SimConfig::Init::product_bernoulli: {
      SplitMix rng(config.seed, 2 * uint64_t(replica));
      std::vector<int> eta(g.size());
      for (int x = 0; x < g.size(); ++x) eta[x] = rng.uniform() < config.bernoulli_rho;
      return eta;
    }
    case SimConfig::Init::stationary_burn_in: {
      SplitMix rng(config.seed, 2 * uint64_t(replica));
      return sample_stationary(g, sp, rho_ss, rng.next());
    }
  }
  throw Error(ErrorCode::InvalidArgument, "bad init mode");
}

}  // namespace

void advance_state(const GraphWithBoundary& g, std::vector<int>& eta, double duration,
                   SplitMix& rng) {
  EventEngine engine(g);
  double t = 0;
  int flips[2];
  while (true) {
    t += rng.exponential(engine.total);
    if (t > duration) return;
    engine.fire(eta, rng, flips);
  }
}

ReplicaEnsemble simulate(const GraphWithBoundary& g, const SimConfig& config,
                         const ObservableSchedule& schedule, const SpectralDecomposition& sp,
                         const std::vector<double>& rho_ss) {
  if (!(config.horizon > 0))
    throw Error(ErrorCode::ScheduleBeforeZero, "horizon must be positive");
  if (!std::is_sorted(schedule.t_profile.begin(), schedule.t_profile.end()))
    throw Error(ErrorCode::InvalidArgument, "schedule times must be ascending");

  double lam1 = sp.lambda1();
  double t_n = std::log(double(g.size())) / (2 * lam1);
  double end_time = config.horizon;
  if (!schedule.t_profile.empty())
    end_time = std::max(end_time, t_n + schedule.t_profile.back() / lam1);

  auto start = std::chrono::steady_clock::now();
  EventEngine engine(g);
  ReplicaEnsemble ens;
  ens.replicas.resize(config.replica_count);

  int threads = std::min(thread_budget(), config.replica_count);
  std::atomic<int> cursor{0};
  auto worker = [&]() {
    for (;;) {
      int i = cursor.fetch_add(1);
      if (i >= config.replica_count) return;
      std::vector<int> eta = initial_state(g, sp, rho_ss, config, i);
      ens.replicas[i] = simulate_one(g, sp, rho_ss, std::move(eta), schedule, engine,
                                     end_time, SplitMix(config.seed, 2 * uint64_t(i) + 1));
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  ens.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return ens;
}

std::vector<int> sample_stationary(const GraphWithBoundary& g, const SpectralDecomposition& sp,
                                   const std::vector<double>& rho_ss, uint64_t seed) {
  int n = g.size();
  SplitMix rng(seed, 0);
  if (g.boundary.empty()) {
    // uniform over configurations with floor(rho |V|) particles
    double rho = rho_ss.empty() ? 0.5 : rho_ss[0];
    int k = (int)std::floor(rho * n);
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    std::vector<int> eta(n, 0);
    for (int i = 0; i < k; ++i) {
      int pick = i + (int)rng.below(uint64_t(n - i));
      std::swap(idx[i], idx[pick]);
      eta[idx[i]] = 1;
    }
    return eta;
  }

  bool equilibrium = true;
  double rb0 = g.rho_bar(g.boundary[0]);
  for (int a : g.boundary)
    if (std::abs(g.rho_bar(a) - rb0) > 1e-12) equilibrium = false;
  if (equilibrium) {
    std::vector<int> eta(n);
    for (int x = 0; x < n; ++x) eta[x] = rng.uniform() < rb0;
    return eta;
  }

  // nonequilibrium: burn in for 10 t_N from the mean-density product start
  double mean_rb = 0;
  for (int a : g.boundary) mean_rb += g.rho_bar(a);
  mean_rb /= g.boundary_size();
  std::vector<int> eta(n);
  for (int x = 0; x < n; ++x) eta[x] = rng.uniform() < mean_rb;
  double t_n = std::log(double(n)) / (2 * sp.lambda1());
  advance_state(g, eta, 10 * t_n, rng);
  return eta;
}

double observe_z(const std::vector<int>& eta, const SpectralDecomposition& sp,
                 const std::vector<double>& rho_ss, int j, double t_profile) {
  int n = sp.eigenvectors.rows();
  if (t_profile < -0.5 * std::log(double(n)) - 1e-12) return 0.0;
  double lam1 = sp.lambda1();
  double t_n = std::log(double(n)) / (2 * lam1);
  double d = 0;
  for (int x = 0; x < n; ++x) d += (eta[x] - rho_ss[x]) * sp.eigenvectors(x, j);
  return std::exp(lam1 * (t_n + t_profile / lam1)) * d / n;
}

namespace {

double threshold_tv(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double best = 0;
  size_t ia = 0, ib = 0;
  while (ia < a.size() || ib < b.size()) {
    double v = ia < a.size() && (ib >= b.size() || a[ia] <= b[ib]) ? a[ia] : b[ib];
    while (ia < a.size() && a[ia] <= v) ++ia;
    while (ib < b.size() && b[ib] <= v) ++ib;
    best = std::max(best, std::abs(double(ia) / a.size() - double(ib) / b.size()));
  }
  return best;
}

}  // namespace

TvEstimate estimate_tv(const std::vector<std::vector<double>>& samples_a,
                       const std::vector<std::vector<double>>& samples_b) {
  if (samples_a.empty() || samples_b.empty())
    throw Error(ErrorCode::InvalidArgument, "empty sample set");
  size_t dim = samples_a[0].size();
  if (samples_b[0].size() != dim)
    throw Error(ErrorCode::DimensionMismatch, "sample dimension mismatch");

  std::vector<double> mean_a(dim, 0), mean_b(dim, 0);
  for (const auto& v : samples_a)
    for (size_t d = 0; d < dim; ++d) mean_a[d] += v[d];
  for (const auto& v : samples_b)
    for (size_t d = 0; d < dim; ++d) mean_b[d] += v[d];
  for (size_t d = 0; d < dim; ++d) {
    mean_a[d] /= samples_a.size();
    mean_b[d] /= samples_b.size();
  }

  // project onto the unit vector along the mean gap
  std::vector<double> dir(dim, 0);
  double norm = 0;
  for (size_t d = 0; d < dim; ++d) {
    dir[d] = mean_a[d] - mean_b[d];
    norm += dir[d] * dir[d];
  }
  norm = std::sqrt(norm);
  if (norm < 1e-300) {
    dir.assign(dim, 0);
    dir[0] = 1;
  } else {
    for (size_t d = 0; d < dim; ++d) dir[d] /= norm;
  }
  auto project = [&](const std::vector<std::vector<double>>& s) {
    std::vector<double> p(s.size());
    for (size_t i = 0; i < s.size(); ++i) {
      double acc = 0;
      for (size_t d = 0; d < dim; ++d) acc += s[i][d] * dir[d];
      p[i] = acc;
    }
    return p;
  };
  std::vector<double> pa = project(samples_a), pb = project(samples_b);

  double mu_a = 0, mu_b = 0;
  for (double v : pa) mu_a += v;
  for (double v : pb) mu_b += v;
  mu_a /= pa.size();
  mu_b /= pb.size();
  double ssq = 0;
  for (double v : pa) ssq += (v - mu_a) * (v - mu_a);
  for (double v : pb) ssq += (v - mu_b) * (v - mu_b);
  double dof = double(pa.size() + pb.size() - 2);
  double sigma = std::sqrt(ssq / std::max(dof, 1.0));
  if (sigma < 1e-12)
    throw Error(ErrorCode::DegenerateVariance, "pooled variance below 1e-12");

  TvEstimate out;
  out.gaussian = std::erf(std::abs(mu_a - mu_b) / (2 * std::sqrt(2.0) * sigma));
  out.nonparametric = threshold_tv(pa, pb);

  // percentile bootstrap on the nonparametric statistic
  const int resamples = 200;
  std::vector<double> boot(resamples);
  SplitMix rng(0x7bf0a11ce5d1ULL, 0);
  for (int r = 0; r < resamples; ++r) {
    std::vector<double> ra(pa.size()), rb(pb.size());
    for (size_t i = 0; i < pa.size(); ++i) ra[i] = pa[rng.below(pa.size())];
    for (size_t i = 0; i < pb.size(); ++i) rb[i] = pb[rng.below(pb.size())];
    boot[r] = threshold_tv(std::move(ra), std::move(rb));
  }
  std::sort(boot.begin(), boot.end());
  out.ci_lo = boot[4];    // 2.5th percentile of 200
  out.ci_hi = boot[194];  // 97.5th percentile
  return out;
}

ExperimentReport run_experiment(const GraphWithBoundary& g, const SpectralDecomposition& sp,
                                const StationarySolution& stat,
                                const ProfilePrediction& prediction,
                                const std::vector<double>& t_grid, int replicas,
                                uint64_t seed) {
  auto start = std::chrono::steady_clock::now();

  ObservableSchedule schedule;
  for (int j = sp.first_nonzero; j < sp.first_nonzero + sp.multiplicity; ++j)
    schedule.j_set.push_back(j);
  // TV at profile times before microscopic zero is the distance at time 0,
  // so sampling clamps there (the Z = 0 convention would degenerate both legs)
  std::vector<double> grid = t_grid;
  std::sort(grid.begin(), grid.end());
  double t_floor = -0.5 * std::log(double(g.size()));
  for (double t : grid) schedule.t_profile.push_back(std::max(t, t_floor));

  std::optional<double> rho;
  if (g.boundary.empty()) rho = stat.rho_ss[0];
  std::vector<int> eta_ext = extremal_config(g, sp, stat.rho_ss, rho);

  double lam1 = sp.lambda1();
  double horizon =
      std::max(1e-9, std::log(double(g.size())) / (2 * lam1) + schedule.t_profile.back() / lam1);

  SimConfig leg1;
  leg1.init = SimConfig::Init::configuration;
  leg1.eta0 = eta_ext;
  leg1.horizon = horizon;
  leg1.seed = seed;
  leg1.replica_count = replicas;
  ReplicaEnsemble ens1 = simulate(g, leg1, schedule, sp, stat.rho_ss);

  SimConfig leg2;
  leg2.init = SimConfig::Init::stationary_burn_in;
  leg2.horizon = horizon;
  leg2.seed = SplitMix::mix(seed ^ 0x5157a7105ULL);
  leg2.replica_count = replicas;
  ReplicaEnsemble ens2 = simulate(g, leg2, schedule, sp, stat.rho_ss);

  ExperimentReport rep;
  rep.seed = seed;
  rep.replicas = replicas;
  int nj = (int)schedule.j_set.size();
  for (int k = 0; k < (int)grid.size(); ++k) {
    double t = grid[k];
    std::vector<std::vector<double>> za(replicas), zb(replicas);
    for (int i = 0; i < replicas; ++i) {
      za[i].resize(nj);
      zb[i].resize(nj);
      for (int q = 0; q < nj; ++q) {
        za[i][q] = ens1.replicas[i].z[q][k];
        zb[i][q] = ens2.replicas[i].z[q][k];
      }
    }
    TvEstimate tv = estimate_tv(za, zb);
    double qb = 0, qd = 0;
    for (int i = 0; i < replicas; ++i) {
      qb += ens1.replicas[i].qv_bulk[0][k];
      qd += ens1.replicas[i].qv_boundary[0][k];
    }
    rep.rows.push_back({t, prediction.profile(t), tv.gaussian, tv.ci_lo, tv.ci_hi,
                        qb / replicas, qd / replicas, prediction.xi1(t)});
  }
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace cutoff
