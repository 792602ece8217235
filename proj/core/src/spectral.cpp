#include "cutoff/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "cutoff/errors.hpp"

namespace cutoff {

LaplacianMatrix assemble_laplacian(const GraphWithBoundary& g) {
  int n = g.size();
  Matrix m(n, n);
  double tn = g.time_scale;
  for (auto [i, j] : g.edges) {
    m(i, j) -= tn;
    m(j, i) -= tn;
    m(i, i) += tn;
    m(j, j) += tn;
  }
  for (int a : g.boundary) m(a, a) += tn * g.rate_sum(a);
  return {std::move(m), 1.0 / n, !g.boundary.empty()};
}

SpectralDecomposition eigendecompose(const LaplacianMatrix& lap) {
  int n = lap.mat.rows();
  if (n > 5000) throw Error(ErrorCode::SizeGuard, "dense eigensolve limited to |V| <= 5000");

  SymmetricEigenResult r = jacobi_eigensym(lap.mat);

  SpectralDecomposition out;
  out.eigenvalues = std::move(r.eigenvalues);
  out.eigenvectors = std::move(r.eigenvectors);
  out.sweeps = r.sweeps;

  // L2(m_N) normalization: multiply Euclidean-unit vectors by sqrt(|V|),
  // then fix signs so sum_x psi(x) >= 0.
  double scale = std::sqrt(double(n));
  for (int j = 0; j < n; ++j) {
    double sum = 0;
    for (int i = 0; i < n; ++i) sum += out.eigenvectors(i, j);
    double sgn = 1.0;
    if (std::abs(sum) > 1e-12) {
      sgn = sum > 0 ? 1.0 : -1.0;
    } else {
      for (int i = 0; i < n; ++i) {
        if (std::abs(out.eigenvectors(i, j)) > 1e-12) {
          sgn = out.eigenvectors(i, j) > 0 ? 1.0 : -1.0;
          break;
        }
      }
    }
    for (int i = 0; i < n; ++i) out.eigenvectors(i, j) *= sgn * scale;
  }

  out.first_nonzero = lap.killed ? 0 : 1;
  double l1 = out.eigenvalues[out.first_nonzero];
  out.cluster_tol = 1e-6 * (1.0 + l1);
  out.multiplicity = 0;
  for (int j = out.first_nonzero; j < n; ++j) {
    if (out.eigenvalues[j] - l1 < out.cluster_tol)
      ++out.multiplicity;
    else
      break;
  }

  out.max_residual = 0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      double r_ij = -out.eigenvalues[j] * out.eigenvectors(i, j);
      for (int k = 0; k < n; ++k) r_ij += lap.mat(i, k) * out.eigenvectors(k, j);
      out.max_residual = std::max(out.max_residual, std::abs(r_ij));
    }
  }
  return out;
}

FormBundle energy_forms(const GraphWithBoundary& g, const std::vector<double>& f,
                        const std::vector<double>* other) {
  int n = g.size();
  if ((int)f.size() != n || (other && (int)other->size() != n))
    throw Error(ErrorCode::DimensionMismatch, "vertex vector size mismatch");
  const std::vector<double>& h = other ? *other : f;
  double tn = g.time_scale;
  double inv_v = 1.0 / n;

  FormBundle out;
  out.bulk = 0;
  for (auto [i, j] : g.edges) out.bulk += tn * inv_v * (f[i] - f[j]) * (h[i] - h[j]);
  out.dirichlet = out.bulk;
  for (int a : g.boundary) out.dirichlet += tn * inv_v * g.rate_sum(a) * f[a] * h[a];

  int nb = g.boundary_size();
  out.energy_measure.assign(n, 0.0);
  for (auto [i, j] : g.edges) {
    double e = 0.5 * tn * inv_v * (f[i] - f[j]) * (f[i] - f[j]);
    out.energy_measure[i] += e;
    out.energy_measure[j] += e;
  }
  for (int a : g.boundary) {
    out.energy_measure[a] += g.beta(a) * f[a] * f[a] / nb;
    double d = 0;
    for (int y : g.adjacency[a]) d += f[a] - f[y];
    out.normal_deriv[a] = tn * (double(nb) / n) * d;
  }
  return out;
}

namespace {

// tan theta = g0(omega), tan(omega + theta) = -g1(omega) with
// g_i = (2N^2 sin^2(w/2N) - ((N+1)/2) beta_i) / (N^2 sin(w/N)).
struct SegmentSystem {
  double n, b0, b1;

  double g(double w, double b) const {
    double s = std::sin(w / (2 * n));
    return (2 * n * n * s * s - 0.5 * (n + 1) * b) / (n * n * std::sin(w / n));
  }
  double theta(double w) const { return std::atan(g(w, b0)); }
  // root function; sign changes locate solutions of tan(w+theta) = -g1
  double value(double w) const {
    double th = theta(w);
    return std::sin(w + th) + g(w, b1) * std::cos(w + th);
  }
  // cross-product residuals of the two tan equations, scale-free
  double residual(double w, double th) const {
    double c = n * n * std::sin(w / n);
    double s = std::sin(w / (2 * n));
    double num0 = 2 * n * n * s * s - 0.5 * (n + 1) * b0;
    double num1 = 2 * n * n * s * s - 0.5 * (n + 1) * b1;
    double r0 = std::sin(th) * c - std::cos(th) * num0;
    double r1 = std::sin(w + th) * c + std::cos(w + th) * num1;
    double sc0 = std::max(std::abs(c), std::abs(num0));
    double sc1 = std::max(std::abs(c), std::abs(num1));
    return std::max(std::abs(r0) / (1 + sc0), std::abs(r1) / (1 + sc1));
  }
};

}  // namespace

std::vector<SegmentEigenSolution> segment_eigen_oracle(int n, double beta0, double beta1,
                                                       int count) {
  if (n < 4) throw Error(ErrorCode::InvalidArgument, "segment oracle needs n >= 4");
  if (beta0 < 0 || beta1 < 0) throw Error(ErrorCode::InvalidArgument, "beta must be >= 0");
  if (count < 1) throw Error(ErrorCode::InvalidArgument, "count must be >= 1");

  SegmentSystem sys{double(n), beta0, beta1};
  std::vector<SegmentEigenSolution> roots;

  const double pi = std::acos(-1.0);
  double w_max = (count + 3) * pi;
  // keep clear of sin(w/n) poles and the trivial w=0 solution
  double w = 1e-9;
  double step = pi / 4096;
  double prev = sys.value(w);
  while (w < w_max && (int)roots.size() < count) {
    double w2 = std::min(w + step, w_max);
    double cur = sys.value(w2);
    if (prev == 0.0) prev = -cur;  // exact grid hit, treat as bracketed
    if (prev * cur < 0) {
      double lo = w, hi = w2;
      for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
        double mid = 0.5 * (lo + hi);
        double vm = sys.value(mid);
        if (vm == 0.0) {
          lo = hi = mid;
          break;
        }
        if (sys.value(lo) * vm < 0)
          hi = mid;
        else
          lo = mid;
      }
      double wr = 0.5 * (lo + hi);
      double th = sys.theta(wr);
      // a sign change across a pole of g0/g1 is not a root; filter by residual
      if (sys.residual(wr, th) < 1e-8) {
        double s = std::sin(wr / (2 * n));
        roots.push_back({wr, th, 4.0 * n * n * s * s});
      }
    }
    prev = cur;
    w = w2;
  }
  if ((int)roots.size() < count)
    throw Error(ErrorCode::RootNotBracketed, "found " + std::to_string(roots.size()) +
                                                 " of " + std::to_string(count) +
                                                 " segment eigen roots");
  return roots;
}

}  // namespace cutoff
