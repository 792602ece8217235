#pragma once

#include <cstdint>
#include <vector>

#include "cutoff/graph.hpp"
#include "cutoff/profile.hpp"
#include "cutoff/rng.hpp"
#include "cutoff/spectral.hpp"
#include "cutoff/stationary.hpp"

namespace cutoff {

struct SimConfig {
  enum class Init { configuration, product_bernoulli, stationary_burn_in };
  Init init = Init::configuration;
  std::vector<int> eta0;      // Init::configuration
  double bernoulli_rho = 0;   // Init::product_bernoulli
  double horizon;             // macroscopic time, > 0
  uint64_t seed = 0;
  int replica_count = 1;
};

struct ObservableSchedule {
  std::vector<int> j_set;         // eigen indices into the decomposition
  std::vector<double> t_profile;  // recentered profile times, ascending
};

struct ReplicaResult {
  // indexed [j in j_set][k in t_profile]
  std::vector<std::vector<double>> z;
  std::vector<std::vector<double>> qv_bulk;
  std::vector<std::vector<double>> qv_boundary;
  std::vector<double> max_jump;  // per j, max |dZ| along the trajectory
  uint64_t events = 0;
  uint64_t effective_events = 0;
};

struct ReplicaEnsemble {
  std::vector<ReplicaResult> replicas;
  double wall_seconds = 0;
};

struct TvEstimate {
  double gaussian;       // plug-in erf estimator, primary
  double nonparametric;  // projected single-threshold statistic
  double ci_lo, ci_hi;   // bootstrap CI on the nonparametric estimate
};

struct ExperimentRow {
  double t;
  double predicted_tv;
  double empirical_tv;
  double ci_lo, ci_hi;
  double mean_qv_bulk, mean_qv_boundary;
  double predicted_xi;
};

struct ExperimentReport {
  std::vector<ExperimentRow> rows;
  uint64_t seed;
  int replicas;
  double wall_seconds;
};

// Raw dynamics: advance eta by `duration` macroscopic time units.
void advance_state(const GraphWithBoundary& g, std::vector<int>& eta, double duration,
                   SplitMix& rng);

ReplicaEnsemble simulate(const GraphWithBoundary& g, const SimConfig& config,
                         const ObservableSchedule& schedule, const SpectralDecomposition& sp,
                         const std::vector<double>& rho_ss);

std::vector<int> sample_stationary(const GraphWithBoundary& g, const SpectralDecomposition& sp,
                                   const std::vector<double>& rho_ss, uint64_t seed);

double observe_z(const std::vector<int>& eta, const SpectralDecomposition& sp,
                 const std::vector<double>& rho_ss, int j, double t_profile);

TvEstimate estimate_tv(const std::vector<std::vector<double>>& samples_a,
                       const std::vector<std::vector<double>>& samples_b);

ExperimentReport run_experiment(const GraphWithBoundary& g, const SpectralDecomposition& sp,
                                const StationarySolution& stat,
                                const ProfilePrediction& prediction,
                                const std::vector<double>& t_grid, int replicas,
                                uint64_t seed);

// replica parallelism cap, from CUTOFF_THREADS when set
int thread_budget();

}  // namespace cutoff
