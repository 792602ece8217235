#include "cutoff/stationary.hpp"

#include <algorithm>
#include <cmath>

#include "cutoff/errors.hpp"

namespace cutoff {

StationarySolution solve_stationary_density(const GraphWithBoundary& g,
                                            const LaplacianMatrix& lap,
                                            std::optional<double> rho_closed) {
  int n = g.size();
  StationarySolution out;

  if (g.boundary.empty()) {
    if (!rho_closed)
      throw Error(ErrorCode::NoBoundary, "closed model needs a target density");
    out.rho_ss.assign(n, *rho_closed);
    out.residual = 0;
    return out;
  }

  std::vector<double> b(n, 0.0);
  for (int a : g.boundary) b[a] = g.time_scale * g.rate_sum(a) * g.rho_bar(a);
  out.rho_ss = lu_solve(lap.mat, b);

  out.residual = 0;
  for (int i = 0; i < n; ++i) {
    double r = -b[i], row_scale = 0;
    for (int k = 0; k < n; ++k) {
      r += lap.mat(i, k) * out.rho_ss[k];
      row_scale += std::abs(lap.mat(i, k));
    }
    out.residual = std::max(out.residual, std::abs(r) / (1 + row_scale));
  }

  for (int a : g.boundary) {
    double beta = g.beta(a);
    out.regimes[a] = beta > 10 ? BoundaryRegime::dirichlet
                   : beta < 0.1 ? BoundaryRegime::neumann : BoundaryRegime::robin;
  }
  return out;
}

std::vector<double> GammaPath::evaluate(const SpectralDecomposition& sp, double t) const {
  int n = sp.eigenvectors.rows();
  std::vector<double> g(n, 0.0);
  for (int j = 0; j < (int)coeffs.size(); ++j) {
    if (coeffs[j] == 0.0) continue;
    double w = coeffs[j] * std::exp(-sp.eigenvalues[j] * t);
    for (int i = 0; i < n; ++i) g[i] += w * sp.eigenvectors(i, j);
  }
  return g;
}

double GammaPath::norm_sq(double t) const {
  double s = 0;
  for (size_t j = 0; j < coeffs.size(); ++j)
    s += coeffs[j] * coeffs[j] * std::exp(-2 * eigenvalues[j] * t);
  return s;
}

GammaPath gamma_path_from_vector(const SpectralDecomposition& sp,
                                 const std::vector<double>& gamma0) {
  int n = sp.eigenvectors.rows();
  if ((int)gamma0.size() != n)
    throw Error(ErrorCode::DimensionMismatch, "gamma0 size mismatch");
  GammaPath p;
  p.eigenvalues = sp.eigenvalues;
  p.coeffs.resize(n);
  for (int j = 0; j < n; ++j) {
    double c = 0;
    for (int i = 0; i < n; ++i) c += gamma0[i] * sp.eigenvectors(i, j);
    p.coeffs[j] = c / n;
  }
  return p;
}

GammaPath gamma_path(const SpectralDecomposition& sp, const std::vector<double>& rho_ss,
                     const std::vector<int>& eta0) {
  if (eta0.size() != rho_ss.size())
    throw Error(ErrorCode::DimensionMismatch, "configuration size mismatch");
  std::vector<double> g0(eta0.size());
  for (size_t i = 0; i < eta0.size(); ++i) g0[i] = eta0[i] - rho_ss[i];
  return gamma_path_from_vector(sp, g0);
}

namespace {

// Unordered off-diagonal pair states for the diagonal-reflected dynamics.
struct PairSystem {
  int n;
  std::vector<std::pair<int, int>> pairs;        // x < y
  std::vector<std::vector<int>> pair_index;      // full n x n lookup
  std::vector<double> kill;                      // T_N (r_sum(x)+r_sum(y))
  double tn;
  const GraphWithBoundary* g;

  explicit PairSystem(const GraphWithBoundary& graph) : g(&graph) {
    n = graph.size();
    if (n > 200)
      throw Error(ErrorCode::SizeGuard, "pair correlation solve limited to |V| <= 200");
    tn = graph.time_scale;
    pair_index.assign(n, std::vector<int>(n, -1));
    for (int x = 0; x < n; ++x)
      for (int y = x + 1; y < n; ++y) {
        pair_index[x][y] = pair_index[y][x] = (int)pairs.size();
        pairs.emplace_back(x, y);
      }
    kill.resize(pairs.size());
    for (size_t k = 0; k < pairs.size(); ++k) {
      auto [x, y] = pairs[k];
      double s = 0;
      if (graph.is_boundary[x]) s += graph.rate_sum(x);
      if (graph.is_boundary[y]) s += graph.rate_sum(y);
      kill[k] = tn * s;
    }
  }

  // out = (-Delta_reflected) u; moves that would hit the diagonal are dropped
  void apply_neg(const std::vector<double>& u, std::vector<double>& out) const {
    for (size_t k = 0; k < pairs.size(); ++k) {
      auto [x, y] = pairs[k];
      double acc = kill[k] * u[k];
      for (int x2 : g->adjacency[x])
        if (x2 != y) acc += tn * (u[k] - u[pair_index[x2][y]]);
      for (int y2 : g->adjacency[y])
        if (y2 != x) acc += tn * (u[k] - u[pair_index[x][y2]]);
      out[k] = acc;
    }
  }

  // forcing row: T_N 1{x~y} (rho(x)-rho(y))^2
  std::vector<double> forcing(const std::vector<double>& rho) const {
    std::vector<double> f(pairs.size(), 0.0);
    for (auto [x, y] : g->edges) {
      double d = rho[x] - rho[y];
      f[pair_index[x][y]] = tn * d * d;
    }
    return f;
  }

  CorrelationMatrix to_matrix(const std::vector<double>& u,
                              const std::vector<double>& rho) const {
    CorrelationMatrix out{Matrix(n, n), 0.0};
    for (size_t k = 0; k < pairs.size(); ++k) {
      auto [x, y] = pairs[k];
      out.phi(x, y) = out.phi(y, x) = u[k];
      out.l1_offdiag += 2 * std::abs(u[k]);
    }
    out.l1_offdiag /= n;
    for (int x = 0; x < n; ++x) out.phi(x, x) = rho[x] * (1 - rho[x]);
    return out;
  }
};

}  // namespace

CorrelationMatrix stationary_correlation(const GraphWithBoundary& g,
                                         const std::vector<double>& rho_ss) {
  PairSystem sys(g);
  std::vector<double> f = sys.forcing(rho_ss);

  bool zero_forcing = std::all_of(f.begin(), f.end(), [](double v) { return v == 0.0; });
  if (zero_forcing)
    return sys.to_matrix(std::vector<double>(sys.pairs.size(), 0.0), rho_ss);
  if (g.boundary.empty())
    throw Error(ErrorCode::SingularSystem,
                "nonconstant density on a closed graph (bug signal)");

  int m = (int)sys.pairs.size();
  Matrix a(m, m);
  std::vector<double> basis(m, 0.0), col(m);
  for (int k = 0; k < m; ++k) {
    basis[k] = 1.0;
    sys.apply_neg(basis, col);
    for (int i = 0; i < m; ++i) a(i, k) = col[i];
    basis[k] = 0.0;
  }
  // -Delta phi = -forcing, so phi <= 0 off the diagonal
  std::vector<double> rhs(m);
  for (int k = 0; k < m; ++k) rhs[k] = -f[k];
  return sys.to_matrix(lu_solve(a, rhs), rho_ss);
}

CorrelationMatrix dynamic_correlation(const GraphWithBoundary& g,
                                      const SpectralDecomposition& sp,
                                      const CorrelationMatrix& phi0, const GammaPath& gamma,
                                      const std::vector<double>& rho_ss, double t) {
  if (t < 0) throw Error(ErrorCode::InvalidArgument, "t must be >= 0");
  PairSystem sys(g);
  int m = (int)sys.pairs.size();

  std::vector<double> u(m);
  for (int k = 0; k < m; ++k) {
    auto [x, y] = sys.pairs[k];
    u[k] = phi0.phi(x, y);
  }

  // Gershgorin bound on the reflected operator
  double radius = 0;
  for (size_t k = 0; k < sys.pairs.size(); ++k) {
    auto [x, y] = sys.pairs[k];
    double row = sys.kill[k] +
                 2 * sys.tn * double(g.adjacency[x].size() + g.adjacency[y].size());
    radius = std::max(radius, row);
  }
  double h = 0.1 / std::max(radius, 1e-12);
  int steps = std::max(1, (int)std::ceil(t / h));
  h = t / steps;

  auto rho_at = [&](double s) {
    std::vector<double> r = gamma.evaluate(sp, s);
    for (size_t i = 0; i < r.size(); ++i) r[i] += rho_ss[i];
    return r;
  };
  // u' = Delta u - forcing(rho_s)
  auto deriv = [&](const std::vector<double>& v, double s, std::vector<double>& out) {
    sys.apply_neg(v, out);
    std::vector<double> f = sys.forcing(rho_at(s));
    for (int k = 0; k < m; ++k) out[k] = -out[k] - f[k];
  };

  std::vector<double> k1(m), k2(m), k3(m), k4(m), tmp(m);
  double s = 0;
  for (int step = 0; step < steps; ++step) {
    deriv(u, s, k1);
    for (int k = 0; k < m; ++k) tmp[k] = u[k] + 0.5 * h * k1[k];
    deriv(tmp, s + 0.5 * h, k2);
    for (int k = 0; k < m; ++k) tmp[k] = u[k] + 0.5 * h * k2[k];
    deriv(tmp, s + 0.5 * h, k3);
    for (int k = 0; k < m; ++k) tmp[k] = u[k] + h * k3[k];
    deriv(tmp, s + h, k4);
    for (int k = 0; k < m; ++k) u[k] += (h / 6) * (k1[k] + 2 * k2[k] + 2 * k3[k] + k4[k]);
    s += h;
  }
  return sys.to_matrix(u, rho_at(t));
}

std::vector<double> mean_exit_times(const GraphWithBoundary& g) {
  if (g.boundary.empty()) throw Error(ErrorCode::NoBoundary, "exit times need reservoirs");
  int n = g.size();
  double tn = g.time_scale;
  Matrix a(n, n);
  for (int x = 0; x < n; ++x) {
    for (int y : g.adjacency[x]) {
      a(x, x) += tn;
      a(x, y) -= tn;
    }
    if (g.is_boundary[x]) {
      double rm = g.rates_minus.count(x) ? g.rates_minus.at(x) : 0.0;
      a(x, x) += tn * rm;
    }
  }
  return lu_solve(a, std::vector<double>(n, 1.0));
}

}  // namespace cutoff
