#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace cutoff {

enum class Family { lattice, torus, mixed_cube, sierpinski };

std::string family_name(Family f);

// Per-face boundary condition for cube/lattice builders.
// Open faces attach reservoirs firing at rate c * n^(-theta).
struct FaceSpec {
  enum class Kind { open, closed, periodic };
  Kind kind = Kind::closed;
  double c_plus = 0.0;
  double c_minus = 0.0;
  double theta = 0.0;

  static FaceSpec open(double c_plus, double c_minus, double theta = 0.0) {
    return {Kind::open, c_plus, c_minus, theta};
  }
  static FaceSpec closed() { return {Kind::closed, 0, 0, 0}; }
  static FaceSpec periodic() { return {Kind::periodic, 0, 0, 0}; }
};

// A finite graph with reservoir boundary, embedded in its limit space.
// Immutable once built; builders are pure functions of their parameters.
struct GraphWithBoundary {
  Family family = Family::lattice;
  std::vector<std::vector<double>> vertices;  // embedding coordinates
  std::vector<std::pair<int, int>> edges;     // i < j, lexicographically sorted
  std::vector<int> boundary;                  // sorted vertex indices
  std::map<int, double> rates_plus;           // r_{N,+}(a), raw
  std::map<int, double> rates_minus;          // r_{N,-}(a), raw
  double time_scale = 1.0;                    // T_N
  std::string params;                         // builder provenance, JSON text

  std::vector<std::vector<int>> adjacency;    // derived, built once
  std::vector<char> is_boundary;              // derived

  int size() const { return static_cast<int>(vertices.size()); }
  int boundary_size() const { return static_cast<int>(boundary.size()); }

  double rate_sum(int a) const;  // r_{N,Sigma}(a)
  // beta_N(a) = T_N * (|dV|/|V|) * r_sum(a); derived, never stored.
  double beta(int a) const;
  // rho_bar_N(a) = r_plus / r_sum
  double rho_bar(int a) const;

  void finalize();  // builds adjacency/is_boundary; called by builders
};

struct Diagnostics {
  bool connected = false;
  int max_degree = 0;
  double boundary_fraction = 0.0;
  double beta_min = 0.0, beta_max = 0.0;
  double rho_bar_min = 0.0, rho_bar_max = 0.0;
};

// Lattice on {0,1/n,...,1}^dim with per-face conditions (2*dim faces,
// ordered low/high per axis). Periodic faces must come in opposite pairs.
GraphWithBoundary build_lattice(int dim, int n, const std::vector<FaceSpec>& faces);

// Discrete torus (Z/n)^dim, n >= 3.
GraphWithBoundary build_torus(int dim, int n);

// Level-`level` Sierpinski gasket approximation; corners holds 3 specs
// (only open/closed meaningful; open attaches rates c_plus, c_minus).
GraphWithBoundary build_sierpinski(int level, const std::vector<FaceSpec>& corners);

// Hard-fails (DisconnectedGraph / RateOutOfRange) on invalid graphs.
Diagnostics validate(const GraphWithBoundary& g);

// JSON (de)serialization, schema "cutoff-graph/1".
std::string graph_to_json(const GraphWithBoundary& g);
GraphWithBoundary graph_from_json(const std::string& text);

}  // namespace cutoff
