#pragma once

#include <map>
#include <vector>

#include "cutoff/graph.hpp"
#include "cutoff/linalg.hpp"

namespace cutoff {

// Dense matrix of -Delta_N in the uniform measure m_N = 1/|V|.
struct LaplacianMatrix {
  Matrix mat;             // -Delta_N, symmetric
  double measure_weight;  // 1/|V|
  bool killed;            // true when reservoirs are present
};

struct SpectralDecomposition {
  std::vector<double> eigenvalues;  // ascending
  Matrix eigenvectors;              // column j = psi_j, ||psi_j||_{L2(m_N)} = 1
  int first_nonzero;                // index of lambda_1
  int multiplicity;                 // cluster size M at lambda_1
  double cluster_tol;
  double max_residual;              // sup-norm eigen residual over all j
  int sweeps;

  double lambda1() const { return eigenvalues[first_nonzero]; }
};

struct FormBundle {
  double dirichlet;                      // E_N(f,g)
  double bulk;                           // E_{N,bulk}(f,g)
  std::vector<double> energy_measure;    // Gamma_N(f)(x), diagonal case
  std::map<int, double> normal_deriv;    // (d_perp f)(a) per boundary vertex
};

struct SegmentEigenSolution {
  double omega;
  double theta;
  double lambda;  // 4 N^2 sin^2(omega/2N)
};

LaplacianMatrix assemble_laplacian(const GraphWithBoundary& g);

SpectralDecomposition eigendecompose(const LaplacianMatrix& lap);

FormBundle energy_forms(const GraphWithBoundary& g, const std::vector<double>& f,
                        const std::vector<double>* other = nullptr);

// Lowest `count` positive (omega, theta) roots of the segment transcendental
// system for the path 0..n with boundary mass beta0, beta1.
std::vector<SegmentEigenSolution> segment_eigen_oracle(int n, double beta0, double beta1,
                                                       int count);

}  // namespace cutoff
