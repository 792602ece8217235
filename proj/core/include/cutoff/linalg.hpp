#pragma once

#include <cstddef>
#include <vector>

namespace cutoff {

// Dense row-major matrix. Small sizes only; everything here is direct
// (LU with partial pivoting, cyclic Jacobi) for reproducibility.
class Matrix {
public:
  Matrix() = default;
  Matrix(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), d_(static_cast<size_t>(rows) * cols, fill) {}

  static Matrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double& operator()(int i, int j) { return d_[static_cast<size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return d_[static_cast<size_t>(i) * cols_ + j]; }
  const std::vector<double>& data() const { return d_; }
  std::vector<double>& data() { return d_; }

  std::vector<double> column(int j) const;
  std::vector<double> apply(const std::vector<double>& x) const;

private:
  int rows_ = 0, cols_ = 0;
  std::vector<double> d_;
};

// Solves A x = b by LU with partial pivoting. Throws SingularSystem.
std::vector<double> lu_solve(Matrix a, std::vector<double> b);

struct SymmetricEigenResult {
  std::vector<double> eigenvalues;  // ascending
  Matrix eigenvectors;              // column j pairs with eigenvalues[j], Euclidean-unit
  int sweeps = 0;
};

// Cyclic threshold Jacobi for symmetric matrices, capped at max_sweeps.
// Throws NoConvergence if the off-diagonal norm does not vanish in time.
SymmetricEigenResult jacobi_eigensym(Matrix a, int max_sweeps = 100);

}  // namespace cutoff
