#include <cmath>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cutoff/errors.hpp"
#include "cutoff/graph.hpp"
#include "cutoff/io.hpp"
#include "cutoff/profile.hpp"
#include "cutoff/simulator.hpp"
#include "cutoff/spectral.hpp"
#include "cutoff/stationary.hpp"
#include "json.hpp"

#include "acceptance.hpp"

namespace {

using namespace cutoff;

std::vector<FaceSpec> parse_faces(const std::string& text, int expected) {
  std::vector<FaceSpec> faces;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok == "closed") {
      faces.push_back(FaceSpec::closed());
    } else if (tok == "periodic") {
      faces.push_back(FaceSpec::periodic());
    } else if (tok.rfind("open", 0) == 0) {
      double cp = 1, cm = 1, theta = 0;
      std::stringstream fs(tok);
      std::string part;
      std::getline(fs, part, ':');
      if (std::getline(fs, part, ':')) cp = std::stod(part);
      if (std::getline(fs, part, ':')) cm = std::stod(part);
      if (std::getline(fs, part, ':')) theta = std::stod(part);
      faces.push_back(FaceSpec::open(cp, cm, theta));
    } else {
      throw Error(ErrorCode::InvalidArgument, "bad face spec: " + tok);
    }
  }
  if ((int)faces.size() != expected)
    throw Error(ErrorCode::InvalidArgument,
                "expected " + std::to_string(expected) + " face specs");
  return faces;
}

std::vector<double> parse_grid(const std::string& text) {
  double a, b, s;
  char c1, c2;
  std::stringstream ss(text);
  if (!(ss >> a >> c1 >> b >> c2 >> s) || c1 != ':' || c2 != ':' || s <= 0)
    throw Error(ErrorCode::InvalidArgument, "time grid must be start:stop:step");
  std::vector<double> grid;
  for (double t = a; t <= b + 1e-9 * s; t += s) grid.push_back(t);
  return grid;
}

struct GraphArgs {
  std::string family = "torus";
  int dim = 1;
  int n = 16;
  int level = 3;
  std::string faces;
  std::string graph_file;
  double rho = 0.5;

  void attach(CLI::App* cmd) {
    cmd->add_option("--family", family, "torus|lattice|sierpinski")
        ->check(CLI::IsMember({"torus", "lattice", "sierpinski"}));
    cmd->add_option("--dim", dim, "spatial dimension");
    cmd->add_option("--n", n, "sites per axis");
    cmd->add_option("--level", level, "gasket approximation level");
    cmd->add_option("--faces", faces,
                    "comma list per face/corner: closed | periodic | open[:c+:c-:theta]");
    cmd->add_option("--graph", graph_file, "load graph from JSON instead of flags");
    cmd->add_option("--rho", rho, "target density for closed models");
  }

  GraphWithBoundary build() const {
    if (!graph_file.empty()) return graph_from_json(read_text(graph_file));
    if (family == "torus") return build_torus(dim, n);
    if (family == "sierpinski") {
      std::vector<FaceSpec> c = faces.empty()
                                    ? std::vector<FaceSpec>(3, FaceSpec::closed())
                                    : parse_faces(faces, 3);
      return build_sierpinski(level, c);
    }
    std::vector<FaceSpec> f = faces.empty()
                                  ? std::vector<FaceSpec>(2 * dim, FaceSpec::closed())
                                  : parse_faces(faces, 2 * dim);
    return build_lattice(dim, n, f);
  }

  std::string config_json() const {
    nlohmann::json j;
    j["family"] = family;
    j["dim"] = dim;
    j["n"] = n;
    j["level"] = level;
    j["faces"] = faces;
    j["graph_file"] = graph_file;
    j["rho"] = rho;
    return j.dump();
  }
};

StationarySolution stationary_for(const GraphWithBoundary& g, const LaplacianMatrix& lap,
                                  double rho) {
  if (g.boundary.empty()) return solve_stationary_density(g, lap, rho);
  return solve_stationary_density(g, lap);
}

int cmd_spectrum(const GraphArgs& ga, const std::string& out, const std::string& vec_out) {
  GraphWithBoundary g = ga.build();
  validate(g);
  LaplacianMatrix lap = assemble_laplacian(g);
  SpectralDecomposition sp = eigendecompose(lap);
  std::vector<std::vector<double>> rows;
  for (size_t j = 0; j < sp.eigenvalues.size(); ++j)
    rows.push_back({double(j), sp.eigenvalues[j], sp.max_residual});
  write_csv(out, {"j", "lambda", "residual"}, rows);
  if (!vec_out.empty()) {
    nlohmann::json jv;
    jv["eigenvalues"] = sp.eigenvalues;
    std::vector<std::vector<double>> vecs(sp.eigenvalues.size());
    for (size_t j = 0; j < sp.eigenvalues.size(); ++j) {
      vecs[j].resize(g.size());
      for (int i = 0; i < g.size(); ++i) vecs[j][i] = sp.eigenvectors(i, (int)j);
    }
    jv["eigenvectors"] = vecs;
    write_text(vec_out, jv.dump());
  }
  write_text(out + ".manifest.json",
             make_manifest("spectrum", ga.config_json(), 0, {out}));
  return 0;
}

int cmd_stationary(const GraphArgs& ga, const std::string& out, const std::string& corr_out) {
  GraphWithBoundary g = ga.build();
  validate(g);
  LaplacianMatrix lap = assemble_laplacian(g);
  StationarySolution st = stationary_for(g, lap, ga.rho);
  std::vector<std::vector<double>> rows;
  for (int x = 0; x < g.size(); ++x) rows.push_back({double(x), st.rho_ss[x]});
  write_csv(out, {"vertex", "rho_ss"}, rows);
  if (!corr_out.empty()) {
    CorrelationMatrix cm = stationary_correlation(g, st.rho_ss);
    std::vector<std::vector<double>> crows;
    for (int x = 0; x < g.size(); ++x)
      for (int y = 0; y < g.size(); ++y)
        if (x != y) crows.push_back({double(x), double(y), cm.phi(x, y)});
    write_csv(corr_out, {"row", "col", "value"}, crows);
  }
  write_text(out + ".manifest.json",
             make_manifest("stationary", ga.config_json(), 0, {out}));
  return 0;
}

int cmd_profile(const GraphArgs& ga, const std::string& grid, const std::string& out) {
  GraphWithBoundary g = ga.build();
  validate(g);
  LaplacianMatrix lap = assemble_laplacian(g);
  SpectralDecomposition sp = eigendecompose(lap);
  StationarySolution st = stationary_for(g, lap, ga.rho);
  std::optional<double> rho;
  if (g.boundary.empty()) rho = ga.rho;
  std::vector<int> eta = extremal_config(g, sp, st.rho_ss, rho);
  ProfilePrediction pred = make_profile_prediction(g, sp, st.rho_ss, eta);
  std::vector<std::vector<double>> rows;
  for (double t : parse_grid(grid)) {
    XiValue x = xi(g, sp, st.rho_ss, sp.first_nonzero, t);
    rows.push_back({t, pred.profile(t), x.bulk, x.boundary, pred.c_star_norm});
  }
  write_csv(out, {"t", "predicted_tv", "xi_bulk", "xi_boundary", "c_star_norm"}, rows);
  write_text(out + ".manifest.json",
             make_manifest("profile", ga.config_json(), 0, {out}));
  return 0;
}

int cmd_simulate(const GraphArgs& ga, const std::string& grid, int replicas, uint64_t seed,
                 const std::string& out) {
  GraphWithBoundary g = ga.build();
  validate(g);
  LaplacianMatrix lap = assemble_laplacian(g);
  SpectralDecomposition sp = eigendecompose(lap);
  StationarySolution st = stationary_for(g, lap, ga.rho);
  std::optional<double> rho;
  if (g.boundary.empty()) rho = ga.rho;
  std::vector<int> eta = extremal_config(g, sp, st.rho_ss, rho);
  ProfilePrediction pred = make_profile_prediction(g, sp, st.rho_ss, eta);
  ExperimentReport rep =
      run_experiment(g, sp, st, pred, parse_grid(grid), replicas, seed);
  std::vector<std::vector<double>> rows;
  for (const auto& r : rep.rows)
    rows.push_back({r.t, r.predicted_tv, r.empirical_tv, r.ci_lo, r.ci_hi, r.mean_qv_bulk,
                    r.mean_qv_boundary, r.predicted_xi, double(replicas), double(seed)});
  write_csv(out,
            {"t", "predicted_tv", "empirical_tv", "ci_lo", "ci_hi", "mean_qv_bulk",
             "mean_qv_boundary", "predicted_xi", "replicas", "seed"},
            rows);
  nlohmann::json extra = nlohmann::json::parse(ga.config_json());
  extra["graph_digest"] = fnv1a64(graph_to_json(g));
  extra["wall_seconds"] = rep.wall_seconds;
  write_text(out + ".manifest.json", make_manifest("simulate", extra.dump(), seed, {out}));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cutoff profile toolkit: predictions and simulations for exclusion dynamics"};
  app.require_subcommand(1);

  GraphArgs ga;
  std::string out = "out.csv", vec_out, corr_out, grid = "-2:2:0.5", tier = "quick";
  int replicas = 1000;
  uint64_t seed = 1;

  auto* c_spec = app.add_subcommand("spectrum", "eigenvalues and eigenvectors");
  ga.attach(c_spec);
  c_spec->add_option("--out", out, "output CSV");
  c_spec->add_option("--vectors", vec_out, "JSON eigenvector dump");

  auto* c_stat = app.add_subcommand("stationary", "stationary density and correlations");
  ga.attach(c_stat);
  c_stat->add_option("--out", out, "density CSV");
  c_stat->add_option("--corr-out", corr_out, "correlation CSV (|V| <= 200)");

  auto* c_prof = app.add_subcommand("profile", "analytic cutoff profile prediction");
  ga.attach(c_prof);
  c_prof->add_option("--t", grid, "profile time grid start:stop:step");
  c_prof->add_option("--out", out, "prediction CSV");

  auto* c_sim = app.add_subcommand("simulate", "empirical TV vs prediction");
  ga.attach(c_sim);
  c_sim->add_option("--t", grid, "profile time grid start:stop:step");
  c_sim->add_option("--replicas", replicas, "replicas per leg");
  c_sim->add_option("--seed", seed, "RNG seed");
  c_sim->add_option("--out", out, "report CSV");

  auto* c_ver = app.add_subcommand("verify", "run the acceptance suite");
  c_ver->add_option("--tier", tier, "quick|full")->check(CLI::IsMember({"quick", "full"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (c_spec->parsed()) return cmd_spectrum(ga, out, vec_out);
    if (c_stat->parsed()) return cmd_stationary(ga, out, corr_out);
    if (c_prof->parsed()) return cmd_profile(ga, grid, out);
    if (c_sim->parsed()) return cmd_simulate(ga, grid, replicas, seed, out);
    if (c_ver->parsed()) {
      bool ok = true;
      for (const auto& r : run_acceptance(tier == "full")) {
        std::cout << (r.pass ? "PASS" : "FAIL") << "  " << r.name
                  << (r.detail.empty() ? "" : "  [" + r.detail + "]") << "\n";
        ok = ok && r.pass;
      }
      return ok ? 0 : 1;
    }
  } catch (const cutoff::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
