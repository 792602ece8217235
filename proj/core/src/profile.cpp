#include "cutoff/profile.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cutoff/errors.hpp"

namespace cutoff {

Eigenprojection eigenprojection_from_vector(const SpectralDecomposition& sp,
                                            const std::vector<double>& gamma0) {
  int n = sp.eigenvectors.rows();
  if ((int)gamma0.size() != n)
    throw Error(ErrorCode::DimensionMismatch, "gamma0 size mismatch");
  Eigenprojection out;
  out.norm = 0;
  for (int j = sp.first_nonzero; j < sp.first_nonzero + sp.multiplicity; ++j) {
    double c = 0;
    for (int i = 0; i < n; ++i) c += gamma0[i] * sp.eigenvectors(i, j);
    c /= n;
    out.c.push_back(std::abs(c));
    out.norm += c * c;
  }
  out.norm = std::sqrt(out.norm);
  return out;
}

Eigenprojection eigenprojection(const SpectralDecomposition& sp,
                                const std::vector<double>& rho_ss,
                                const std::vector<int>& eta0) {
  std::vector<double> g0(eta0.size());
  for (size_t i = 0; i < eta0.size(); ++i) g0[i] = eta0[i] - rho_ss[i];
  return eigenprojection_from_vector(sp, g0);
}

double pi_function(int j, double rho) {
  if (j < 1) throw Error(ErrorCode::InvalidArgument, "j must be >= 1");
  if (rho <= 0 || rho > 1) throw Error(ErrorCode::InvalidArgument, "rho must be in (0,1]");
  const double pi = std::acos(-1.0);
  double r = std::pow(rho, 1.0 / j);
  return std::sqrt(2.0 * j) / pi * std::pow(rho, 1.0 - 1.0 / j) * std::sin(pi * r);
}

namespace {

int graph_dim(const GraphWithBoundary& g) { return (int)g.vertices[0].size(); }

std::vector<int> block_config_1d(const GraphWithBoundary& g, const SpectralDecomposition& sp,
                                 double rho) {
  int n = g.size();
  int k = std::min(n, (int)std::floor(rho * n) + 1);
  bool wrap = g.family == Family::torus;
  // window of k consecutive sites maximizing the psi_1 sum
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return g.vertices[a][0] < g.vertices[b][0];
  });
  int best_start = 0;
  double best = -1e300;
  int limit = wrap ? n : n - k + 1;
  for (int s = 0; s < limit; ++s) {
    double acc = 0;
    for (int i = 0; i < k; ++i) acc += sp.eigenvectors(order[(s + i) % n], sp.first_nonzero);
    if (acc > best) {
      best = acc;
      best_start = s;
    }
  }
  std::vector<int> eta(n, 0);
  for (int i = 0; i < k; ++i) eta[order[(best_start + i) % n]] = 1;
  return eta;
}

std::vector<int> rectangle_config(const GraphWithBoundary& g, double rho) {
  int n = g.size();
  int dim = graph_dim(g);
  int k = std::min(n, (int)std::floor(rho * n) + 1);
  int jstar = 1;
  for (int j = 2; j <= dim; ++j)
    if (pi_function(j, rho) > pi_function(jstar, rho)) jstar = j;
  double side = std::pow(rho, 1.0 / jstar);
  // grow nested boxes of the extremal aspect ratio; first k vertices win
  std::vector<double> len(dim, 1.0);
  for (int d = 0; d < jstar; ++d) len[d] = side;
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto key = [&](int v) {
    double m = 0;
    for (int d = 0; d < dim; ++d) m = std::max(m, g.vertices[v][d] / len[d]);
    return m;
  };
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    double ka = key(a), kb = key(b);
    if (ka != kb) return ka < kb;
    return g.vertices[a] < g.vertices[b];
  });
  std::vector<int> eta(n, 0);
  for (int i = 0; i < k; ++i) eta[order[i]] = 1;
  return eta;
}

}  // namespace

std::vector<int> extremal_config(const GraphWithBoundary& g, const SpectralDecomposition& sp,
                                 const std::vector<double>& rho_ss,
                                 std::optional<double> rho, InitMode mode) {
  int n = g.size();
  if (g.boundary.empty()) {
    if (!rho || *rho <= 0 || *rho >= 1)
      throw Error(ErrorCode::InvalidArgument, "closed model needs rho in (0,1)");
    if (graph_dim(g) == 1) return block_config_1d(g, sp, *rho);
    return rectangle_config(g, *rho);
  }
  if (mode == InitMode::auto_pick) {
    std::vector<double> up(n), down(n);
    for (int i = 0; i < n; ++i) {
      up[i] = 1.0 - rho_ss[i];
      down[i] = -rho_ss[i];
    }
    mode = eigenprojection_from_vector(sp, up).norm >=
                   eigenprojection_from_vector(sp, down).norm
               ? InitMode::all_ones
               : InitMode::all_zeros;
  }
  return std::vector<int>(n, mode == InitMode::all_ones ? 1 : 0);
}

XiValue xi(const GraphWithBoundary& g, const SpectralDecomposition& sp,
           const std::vector<double>& rho_ss, int j, double t) {
  if (j < sp.first_nonzero)
    throw Error(ErrorCode::InvalidArgument, "xi needs a nonzero eigenvalue index");
  double lam = sp.eigenvalues[j];
  if (lam < 1e-10)
    throw Error(ErrorCode::NearZeroEigenvalue, "xi undefined for near-zero eigenvalue");

  int n = g.size();
  std::vector<double> psi(n);
  for (int i = 0; i < n; ++i) psi[i] = sp.eigenvectors(i, j);
  FormBundle fb = energy_forms(g, psi);

  XiValue out{0.0, 0.0};
  for (int x = 0; x < n; ++x)
    out.bulk += rho_ss[x] * (1 - rho_ss[x]) * fb.energy_measure[x] / lam;
  if (!g.boundary.empty()) {
    int nb = g.boundary_size();
    for (int a : g.boundary)
      out.boundary += 0.5 / nb * (g.rho_bar(a) - rho_ss[a]) * (1 - 2 * rho_ss[a]) *
                      g.beta(a) * psi[a] * psi[a] / lam;
  }
  double growth = std::exp(2 * t);
  out.bulk *= growth;
  out.boundary *= growth;
  return out;
}

double limit_profile(double c_star_norm, double xi1_t) {
  if (c_star_norm < 0) throw Error(ErrorCode::InvalidArgument, "c_star_norm must be >= 0");
  if (!(xi1_t > 0)) throw Error(ErrorCode::NonpositiveVariance, "xi1(t) must be positive");
  return std::erf(c_star_norm / (2 * std::sqrt(2 * xi1_t)));
}

double ProfilePrediction::profile(double t) const { return limit_profile(c_star_norm, xi1(t)); }

CutoffSchedule cutoff_schedule(const GraphWithBoundary& g, const SpectralDecomposition& sp,
                               double t) {
  double lam = sp.lambda1();
  if (lam < 1e-10)
    throw Error(ErrorCode::NearZeroEigenvalue, "cutoff schedule needs lambda_1 > 0");
  double tn = std::log(double(g.size())) / (2 * lam);
  return {g.time_scale * (tn + t / lam), g.time_scale / lam};
}

double sg_lambda1_oracle() {
  // decimation map lifts the level-1 Dirichlet eigenvalue 2; the level-L
  // eigenvalue of the 5^L-scaled operator is 5^L phi^(L-1)(2)
  double t = 2.0;
  double scale = 5.0;
  double prev = 0.0;
  for (int k = 0; k < 200; ++k) {
    double cur = scale * t;
    if (k > 0 && std::abs(cur - prev) < 1e-12) return cur;
    prev = cur;
    t = (5.0 - std::sqrt(25.0 - 4.0 * t)) / 2.0;
    scale *= 5.0;
  }
  throw Error(ErrorCode::NoConvergence, "gasket eigenvalue iteration did not converge");
}

ProfilePrediction make_profile_prediction(const GraphWithBoundary& g,
                                          const SpectralDecomposition& sp,
                                          const std::vector<double>& rho_ss,
                                          const std::vector<int>& eta0) {
  ProfilePrediction p;
  Eigenprojection ep = eigenprojection(sp, rho_ss, eta0);
  p.c_star = ep.c;
  p.c_star_norm = ep.norm;
  XiValue x = xi(g, sp, rho_ss, sp.first_nonzero, 0.0);
  p.xi1_bulk0 = x.bulk;
  p.xi1_boundary0 = x.boundary;
  p.lambda1 = sp.lambda1();
  p.graph_size = g.size();
  p.t_n = std::log(double(g.size())) / (2 * p.lambda1);
  p.time_scale = g.time_scale;
  return p;
}

}  // namespace cutoff
