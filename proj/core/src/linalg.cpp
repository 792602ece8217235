#include "cutoff/linalg.hpp"

#include <cmath>
#include <cstdlib>

#include "cutoff/errors.hpp"

namespace cutoff {

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

std::vector<double> Matrix::column(int j) const {
  std::vector<double> c(rows_);
  for (int i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
  return c;
}

std::vector<double> Matrix::apply(const std::vector<double>& x) const {
  std::vector<double> y(rows_, 0.0);
  for (int i = 0; i < rows_; ++i) {
    double s = 0.0;
    const double* row = d_.data() + static_cast<size_t>(i) * cols_;
    for (int j = 0; j < cols_; ++j) s += row[j] * x[j];
    y[i] = s;
  }
  return y;
}

std::vector<double> lu_solve(Matrix a, std::vector<double> b) {
  const int n = a.rows();
  if (a.cols() != n || static_cast<int>(b.size()) != n)
    throw Error(ErrorCode::DimensionMismatch, "lu_solve: shape mismatch");

  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;

  for (int k = 0; k < n; ++k) {
    int piv = k;
    double best = std::abs(a(k, k));
    for (int i = k + 1; i < n; ++i) {
      double v = std::abs(a(i, k));
      if (v > best) { best = v; piv = i; }
    }
    if (best == 0.0)
      throw Error(ErrorCode::SingularSystem, "lu_solve: singular matrix");
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      std::swap(b[k], b[piv]);
    }
    const double d = a(k, k);
    for (int i = k + 1; i < n; ++i) {
      const double m = a(i, k) / d;
      if (m == 0.0) continue;
      a(i, k) = m;
      for (int j = k + 1; j < n; ++j) a(i, j) -= m * a(k, j);
      b[i] -= m * b[k];
    }
  }

  std::vector<double> x(n);
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
    x[i] = s / a(i, i);
  }
  return x;
}

namespace {

double offdiag_norm(const Matrix& a) {
  const int n = a.rows();
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) s += a(i, j) * a(i, j);
  return std::sqrt(2.0 * s);
}

}  // namespace

SymmetricEigenResult jacobi_eigensym(Matrix a, int max_sweeps) {
  const int n = a.rows();
  if (a.cols() != n)
    throw Error(ErrorCode::DimensionMismatch, "jacobi_eigensym: matrix not square");

  Matrix v = Matrix::identity(n);
  double scale = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) scale = std::max(scale, std::abs(a(i, j)));
  if (scale == 0.0) scale = 1.0;

  int sweeps = 0;
  for (; sweeps < max_sweeps; ++sweeps) {
    if (offdiag_norm(a) <= 1e-15 * scale * n) break;
    // threshold sweep: skip rotations that cannot reduce the off-norm
    const double thresh = (sweeps < 3) ? 0.2 * offdiag_norm(a) / (n * n) : 0.0;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= thresh) continue;
        if (std::abs(apq) <= 1e-18 * scale) { a(p, q) = a(q, p) = 0.0; continue; }
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e12) {
          t = 1.0 / (2.0 * theta);
        } else {
          t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
          if (theta < 0.0) t = -t;
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        const double app = a(p, p), aqq = a(q, q);
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = a(q, p) = 0.0;
        for (int k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = akp - s * (akq + tau * akp);
          a(p, k) = a(k, p);
          a(k, q) = akq + s * (akp - tau * akq);
          a(q, k) = a(k, q);
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = vkp - s * (vkq + tau * vkp);
          v(k, q) = vkq + s * (vkp - tau * vkq);
        }
      }
    }
  }
  if (sweeps == max_sweeps && offdiag_norm(a) > 1e-12 * scale * n)
    throw Error(ErrorCode::NoConvergence, "jacobi_eigensym: sweep cap reached");

  // sort ascending, stable in index for reproducibility
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  for (int i = 1; i < n; ++i) {
    int key = order[i];
    const double lam = a(key, key);
    int j = i - 1;
    while (j >= 0 && a(order[j], order[j]) > lam) { order[j + 1] = order[j]; --j; }
    order[j + 1] = key;
  }

  SymmetricEigenResult r;
  r.eigenvalues.resize(n);
  r.eigenvectors = Matrix(n, n);
  for (int j = 0; j < n; ++j) {
    r.eigenvalues[j] = a(order[j], order[j]);
    for (int i = 0; i < n; ++i) r.eigenvectors(i, j) = v(i, order[j]);
  }
  r.sweeps = sweeps;
  return r;
}

}  // namespace cutoff
