#pragma once

#include <map>
#include <optional>
#include <vector>

#include "cutoff/graph.hpp"
#include "cutoff/linalg.hpp"
#include "cutoff/spectral.hpp"

namespace cutoff {

enum class BoundaryRegime { dirichlet, robin, neumann };

struct StationarySolution {
  std::vector<double> rho_ss;
  double residual;  // sup of row-normalized Laplace/boundary residuals
  std::map<int, BoundaryRegime> regimes;
};

struct CorrelationMatrix {
  Matrix phi;          // symmetric; diagonal holds rho(x)(1-rho(x))
  double l1_offdiag;   // (1/|V|) sum_{x != y} |phi(x,y)|
};

struct GammaPath {
  std::vector<double> coeffs;       // c_j = <gamma_0, psi_j>_{m_N}, all j
  std::vector<double> eigenvalues;  // copied from the decomposition

  std::vector<double> evaluate(const SpectralDecomposition& sp, double t) const;
  double norm_sq(double t) const;  // ||gamma_t||^2_{L2(m_N)}
};

// Reservoir model: dense solve of the Laplace problem. Closed model:
// pass rho_closed and the constant vector is returned.
StationarySolution solve_stationary_density(const GraphWithBoundary& g,
                                            const LaplacianMatrix& lap,
                                            std::optional<double> rho_closed = std::nullopt);

GammaPath gamma_path(const SpectralDecomposition& sp, const std::vector<double>& rho_ss,
                     const std::vector<int>& eta0);
GammaPath gamma_path_from_vector(const SpectralDecomposition& sp,
                                 const std::vector<double>& gamma0);

CorrelationMatrix stationary_correlation(const GraphWithBoundary& g,
                                         const std::vector<double>& rho_ss);

CorrelationMatrix dynamic_correlation(const GraphWithBoundary& g,
                                      const SpectralDecomposition& sp,
                                      const CorrelationMatrix& phi0, const GammaPath& gamma,
                                      const std::vector<double>& rho_ss, double t);

std::vector<double> mean_exit_times(const GraphWithBoundary& g);

}  // namespace cutoff
