#include "cutoff/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <sstream>

#include "cutoff/errors.hpp"
#include "json.hpp"

namespace cutoff {

std::string family_name(Family f) {
  switch (f) {
    case Family::lattice: return "lattice";
    case Family::torus: return "torus";
    case Family::mixed_cube: return "mixed_cube";
    case Family::sierpinski: return "sierpinski";
  }
  return "?";
}

static Family family_from_name(const std::string& s) {
  if (s == "lattice") return Family::lattice;
  if (s == "torus") return Family::torus;
  if (s == "mixed_cube") return Family::mixed_cube;
  if (s == "sierpinski") return Family::sierpinski;
  throw Error(ErrorCode::InvalidArgument, "unknown family: " + s);
}

double GraphWithBoundary::rate_sum(int a) const {
  auto ip = rates_plus.find(a);
  auto im = rates_minus.find(a);
  double s = 0.0;
  if (ip != rates_plus.end()) s += ip->second;
  if (im != rates_minus.end()) s += im->second;
  return s;
}

double GraphWithBoundary::beta(int a) const {
  if (boundary.empty()) throw Error(ErrorCode::NoBoundary, "beta on closed graph");
  return time_scale * (double(boundary.size()) / double(vertices.size())) * rate_sum(a);
}

double GraphWithBoundary::rho_bar(int a) const {
  double s = rate_sum(a);
  if (s <= 0) throw Error(ErrorCode::RateOutOfRange, "zero total rate at boundary vertex");
  auto ip = rates_plus.find(a);
  return (ip == rates_plus.end() ? 0.0 : ip->second) / s;
}

void GraphWithBoundary::finalize() {
  std::sort(edges.begin(), edges.end());
  std::sort(boundary.begin(), boundary.end());
  adjacency.assign(vertices.size(), {});
  for (auto [i, j] : edges) {
    adjacency[i].push_back(j);
    adjacency[j].push_back(i);
  }
  for (auto& nb : adjacency) std::sort(nb.begin(), nb.end());
  is_boundary.assign(vertices.size(), 0);
  for (int a : boundary) is_boundary[a] = 1;
}

GraphWithBoundary build_lattice(int dim, int n, const std::vector<FaceSpec>& faces) {
  if (dim < 1 || dim > 4) throw Error(ErrorCode::InvalidArgument, "dim must be in [1,4]");
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "n must be >= 2");
  if ((int)faces.size() != 2 * dim)
    throw Error(ErrorCode::InvalidArgument, "need 2*dim face specs");
  std::vector<bool> periodic(dim, false);
  for (int d = 0; d < dim; ++d) {
    bool lo = faces[2 * d].kind == FaceSpec::Kind::periodic;
    bool hi = faces[2 * d + 1].kind == FaceSpec::Kind::periodic;
    if (lo != hi)
      throw Error(ErrorCode::InvalidArgument, "periodic faces must come in opposite pairs");
    periodic[d] = lo;
    if (lo && n < 3) throw Error(ErrorCode::InvalidArgument, "periodic axis needs n >= 3");
  }

  GraphWithBoundary g;
  bool any_periodic = std::any_of(periodic.begin(), periodic.end(), [](bool b) { return b; });
  bool all_periodic = std::all_of(periodic.begin(), periodic.end(), [](bool b) { return b; });
  g.family = all_periodic ? Family::torus : (any_periodic ? Family::mixed_cube : Family::lattice);
  g.time_scale = double(n) * double(n);

  std::vector<int> extent(dim);
  for (int d = 0; d < dim; ++d) extent[d] = periodic[d] ? n : n + 1;
  int64_t total = 1;
  for (int d = 0; d < dim; ++d) total *= extent[d];

  // mixed-radix index, axis 0 slowest
  std::vector<int64_t> stride(dim);
  int64_t s = 1;
  for (int d = dim - 1; d >= 0; --d) {
    stride[d] = s;
    s *= extent[d];
  }

  std::vector<int> idx(dim, 0);
  g.vertices.reserve(total);
  for (int64_t v = 0; v < total; ++v) {
    std::vector<double> coord(dim);
    for (int d = 0; d < dim; ++d) coord[d] = double(idx[d]) / n;
    g.vertices.push_back(std::move(coord));
    for (int d = dim - 1; d >= 0; --d) {
      if (++idx[d] < extent[d]) break;
      idx[d] = 0;
    }
  }

  std::fill(idx.begin(), idx.end(), 0);
  for (int64_t v = 0; v < total; ++v) {
    for (int d = 0; d < dim; ++d) {
      if (idx[d] + 1 < extent[d]) {
        g.edges.emplace_back((int)v, (int)(v + stride[d]));
      } else if (periodic[d]) {
        int64_t w = v - int64_t(extent[d] - 1) * stride[d];
        g.edges.emplace_back((int)std::min<int64_t>(v, w), (int)std::max<int64_t>(v, w));
      }
    }
    for (int d = dim - 1; d >= 0; --d) {
      if (++idx[d] < extent[d]) break;
      idx[d] = 0;
    }
  }

  // reservoirs on open faces; rates accumulate at shared corners/edges
  std::fill(idx.begin(), idx.end(), 0);
  for (int64_t v = 0; v < total; ++v) {
    for (int d = 0; d < dim; ++d) {
      for (int side = 0; side < 2; ++side) {
        const FaceSpec& f = faces[2 * d + side];
        if (f.kind != FaceSpec::Kind::open) continue;
        int face_idx = side == 0 ? 0 : extent[d] - 1;
        if (idx[d] != face_idx) continue;
        double scale = std::pow(double(n), -f.theta);
        g.rates_plus[(int)v] += f.c_plus * scale;
        g.rates_minus[(int)v] += f.c_minus * scale;
      }
    }
    for (int d = dim - 1; d >= 0; --d) {
      if (++idx[d] < extent[d]) break;
      idx[d] = 0;
    }
  }
  for (auto& [a, r] : g.rates_minus) g.boundary.push_back(a);

  nlohmann::json p;
  p["builder"] = "lattice";
  p["dim"] = dim;
  p["n"] = n;
  nlohmann::json fs = nlohmann::json::array();
  for (const auto& f : faces) {
    nlohmann::json jf;
    jf["kind"] = f.kind == FaceSpec::Kind::open ? "open"
               : f.kind == FaceSpec::Kind::closed ? "closed" : "periodic";
    if (f.kind == FaceSpec::Kind::open) {
      jf["c_plus"] = f.c_plus;
      jf["c_minus"] = f.c_minus;
      jf["theta"] = f.theta;
    }
    fs.push_back(jf);
  }
  p["faces"] = fs;
  g.params = p.dump();

  g.finalize();
  return g;
}

GraphWithBoundary build_torus(int dim, int n) {
  if (n < 3) throw Error(ErrorCode::InvalidArgument, "torus needs n >= 3");
  std::vector<FaceSpec> faces(2 * dim, FaceSpec::periodic());
  GraphWithBoundary g = build_lattice(dim, n, faces);
  g.family = Family::torus;
  nlohmann::json p;
  p["builder"] = "torus";
  p["dim"] = dim;
  p["n"] = n;
  g.params = p.dump();
  return g;
}

GraphWithBoundary build_sierpinski(int level, const std::vector<FaceSpec>& corners) {
  if (level < 0 || level > 8) throw Error(ErrorCode::InvalidArgument, "level must be in [0,8]");
  if (corners.size() != 3) throw Error(ErrorCode::InvalidArgument, "need 3 corner specs");
  for (const auto& c : corners)
    if (c.kind == FaceSpec::Kind::periodic)
      throw Error(ErrorCode::InvalidArgument, "gasket corners cannot be periodic");

  GraphWithBoundary g;
  g.family = Family::sierpinski;
  g.time_scale = std::pow(5.0, level);

  int side = 1 << level;
  // vertex key: (p, q) with embedding p/side*(1,0) + q/side*(1/2, sqrt(3)/2)
  std::map<std::pair<int, int>, int> index;
  std::set<std::pair<int, int>> edge_set;
  auto vid = [&](int p, int q) {
    auto it = index.find({p, q});
    if (it != index.end()) return it->second;
    int id = (int)g.vertices.size();
    index[{p, q}] = id;
    g.vertices.push_back({(p + 0.5 * q) / side, q * (std::sqrt(3.0) / 2) / side});
    return id;
  };

  // DFS in cell-address order gives a canonical vertex numbering
  struct Cell { int p, q, s; };
  std::vector<Cell> stack{{0, 0, side}};
  while (!stack.empty()) {
    Cell c = stack.back();
    stack.pop_back();
    if (c.s == 1) {
      int a = vid(c.p, c.q), b = vid(c.p + 1, c.q), d = vid(c.p, c.q + 1);
      edge_set.insert({std::min(a, b), std::max(a, b)});
      edge_set.insert({std::min(a, d), std::max(a, d)});
      edge_set.insert({std::min(b, d), std::max(b, d)});
      continue;
    }
    int h = c.s / 2;
    // push in reverse so DFS visits bottom-left, bottom-right, top
    stack.push_back({c.p, c.q + h, h});
    stack.push_back({c.p + h, c.q, h});
    stack.push_back({c.p, c.q, h});
  }
  g.edges.assign(edge_set.begin(), edge_set.end());

  int corner_ids[3] = {vid(0, 0), vid(side, 0), vid(0, side)};
  for (int k = 0; k < 3; ++k) {
    if (corners[k].kind != FaceSpec::Kind::open) continue;
    int a = corner_ids[k];
    g.boundary.push_back(a);
    g.rates_plus[a] = corners[k].c_plus;
    g.rates_minus[a] = corners[k].c_minus;
  }

  nlohmann::json p;
  p["builder"] = "sierpinski";
  p["level"] = level;
  nlohmann::json cs = nlohmann::json::array();
  for (const auto& c : corners) {
    nlohmann::json jc;
    jc["kind"] = c.kind == FaceSpec::Kind::open ? "open" : "closed";
    if (c.kind == FaceSpec::Kind::open) {
      jc["c_plus"] = c.c_plus;
      jc["c_minus"] = c.c_minus;
    }
    cs.push_back(jc);
  }
  p["corners"] = cs;
  g.params = p.dump();

  g.finalize();
  return g;
}

Diagnostics validate(const GraphWithBoundary& g) {
  if (g.size() == 0) throw Error(ErrorCode::InvalidArgument, "empty graph");
  Diagnostics d;

  std::vector<char> seen(g.size(), 0);
  std::vector<int> queue{0};
  seen[0] = 1;
  size_t head = 0;
  while (head < queue.size()) {
    int v = queue[head++];
    for (int w : g.adjacency[v])
      if (!seen[w]) {
        seen[w] = 1;
        queue.push_back(w);
      }
  }
  d.connected = (int)queue.size() == g.size();
  if (!d.connected) throw Error(ErrorCode::DisconnectedGraph, "graph is not connected");

  for (const auto& nb : g.adjacency) d.max_degree = std::max(d.max_degree, (int)nb.size());
  d.boundary_fraction = double(g.boundary_size()) / g.size();

  bool first = true;
  for (int a : g.boundary) {
    double rm = 0, rp = 0;
    if (auto it = g.rates_minus.find(a); it != g.rates_minus.end()) rm = it->second;
    if (auto it = g.rates_plus.find(a); it != g.rates_plus.end()) rp = it->second;
    if (!(rm > 0.0 && rm <= 1.0))
      throw Error(ErrorCode::RateOutOfRange, "r_minus must lie in (0,1]");
    if (rp < 0.0) throw Error(ErrorCode::RateOutOfRange, "r_plus must be >= 0");
    double b = g.beta(a), rb = g.rho_bar(a);
    if (first) {
      d.beta_min = d.beta_max = b;
      d.rho_bar_min = d.rho_bar_max = rb;
      first = false;
    } else {
      d.beta_min = std::min(d.beta_min, b);
      d.beta_max = std::max(d.beta_max, b);
      d.rho_bar_min = std::min(d.rho_bar_min, rb);
      d.rho_bar_max = std::max(d.rho_bar_max, rb);
    }
  }
  return d;
}

std::string graph_to_json(const GraphWithBoundary& g) {
  nlohmann::json j;
  j["format"] = "cutoff-graph/1";
  j["family"] = family_name(g.family);
  j["time_scale"] = g.time_scale;
  j["vertices"] = g.vertices;
  nlohmann::json edges = nlohmann::json::array();
  for (auto [a, b] : g.edges) edges.push_back({a, b});
  j["edges"] = edges;
  j["boundary"] = g.boundary;
  nlohmann::json rp = nlohmann::json::array(), rm = nlohmann::json::array();
  for (int a : g.boundary) {
    rp.push_back(g.rates_plus.count(a) ? g.rates_plus.at(a) : 0.0);
    rm.push_back(g.rates_minus.count(a) ? g.rates_minus.at(a) : 0.0);
  }
  j["rates_plus"] = rp;
  j["rates_minus"] = rm;
  j["params"] = g.params.empty() ? nlohmann::json::object() : nlohmann::json::parse(g.params);
  return j.dump(2);
}

GraphWithBoundary graph_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (!j.contains("format") || j["format"] != "cutoff-graph/1")
    throw Error(ErrorCode::InvalidArgument, "unsupported graph format");
  GraphWithBoundary g;
  g.family = family_from_name(j.at("family").get<std::string>());
  g.time_scale = j.at("time_scale").get<double>();
  g.vertices = j.at("vertices").get<std::vector<std::vector<double>>>();
  for (const auto& e : j.at("edges"))
    g.edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
  g.boundary = j.at("boundary").get<std::vector<int>>();
  auto rp = j.at("rates_plus").get<std::vector<double>>();
  auto rm = j.at("rates_minus").get<std::vector<double>>();
  if (rp.size() != g.boundary.size() || rm.size() != g.boundary.size())
    throw Error(ErrorCode::DimensionMismatch, "rate arrays must match boundary");
  for (size_t k = 0; k < g.boundary.size(); ++k) {
    g.rates_plus[g.boundary[k]] = rp[k];
    g.rates_minus[g.boundary[k]] = rm[k];
  }
  if (j.contains("params")) g.params = j["params"].dump();
  g.finalize();
  return g;
}

}  // namespace cutoff
