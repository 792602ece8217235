#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "cutoff/graph.hpp"
#include "cutoff/spectral.hpp"
#include "cutoff/stationary.hpp"

namespace cutoff {

struct Eigenprojection {
  std::vector<double> c;  // |c_j| over the first eigenspace, length M
  double norm;            // sqrt(sum c_j^2), basis-independent
};

struct XiValue {
  double bulk;      // e^{2t} * carre-du-champ sum
  double boundary;  // e^{2t} * reservoir mismatch sum
  double total() const { return bulk + boundary; }
};

struct CutoffSchedule {
  double physical_time;  // T_N (t_N + t/lambda_1)
  double window;         // T_N / lambda_1
};

// Everything needed to evaluate the predicted TV curve.
struct ProfilePrediction {
  std::vector<double> c_star;
  double c_star_norm;
  double xi1_bulk0, xi1_boundary0;  // Xi_1 components at t = 0
  double lambda1;
  double t_n;          // log|V| / (2 lambda_1), macroscopic units
  double time_scale;   // T_N
  int graph_size;

  double xi1(double t) const { return std::exp(2 * t) * (xi1_bulk0 + xi1_boundary0); }
  double physical_time(double t) const { return time_scale * (t_n + t / lambda1); }
  double profile(double t) const;
};

enum class InitMode { auto_pick, all_ones, all_zeros };

Eigenprojection eigenprojection(const SpectralDecomposition& sp,
                                const std::vector<double>& rho_ss,
                                const std::vector<int>& eta0);
Eigenprojection eigenprojection_from_vector(const SpectralDecomposition& sp,
                                            const std::vector<double>& gamma0);

// Closed models: supply rho; reservoir models: all-ones/all-zeros, auto_pick
// chooses whichever projects larger on the first eigenspace.
std::vector<int> extremal_config(const GraphWithBoundary& g, const SpectralDecomposition& sp,
                                 const std::vector<double>& rho_ss,
                                 std::optional<double> rho = std::nullopt,
                                 InitMode mode = InitMode::auto_pick);

double pi_function(int j, double rho);

XiValue xi(const GraphWithBoundary& g, const SpectralDecomposition& sp,
           const std::vector<double>& rho_ss, int j, double t);

double limit_profile(double c_star_norm, double xi1_t);

CutoffSchedule cutoff_schedule(const GraphWithBoundary& g, const SpectralDecomposition& sp,
                               double t);

// First nonzero gasket eigenvalue via the inverse-branch iteration
// phi(t) = (5 - sqrt(25 - 4t))/2 started at t = 2.
double sg_lambda1_oracle();

ProfilePrediction make_profile_prediction(const GraphWithBoundary& g,
                                          const SpectralDecomposition& sp,
                                          const std::vector<double>& rho_ss,
                                          const std::vector<int>& eta0);

}  // namespace cutoff
