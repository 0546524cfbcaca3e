#include "pcap/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "pcap/errors.hpp"
#include "pcap/rng.hpp"

namespace pcap {

namespace {

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

WeightedGraph::WeightedGraph(
    std::vector<std::pair<VertexId, double>> vertex_measures,
    std::vector<std::tuple<VertexId, VertexId, double>> edge_weights) {
  std::sort(vertex_measures.begin(), vertex_measures.end());
  ids_.reserve(vertex_measures.size());
  measure_.reserve(vertex_measures.size());
  for (std::size_t i = 0; i < vertex_measures.size(); ++i) {
    const auto& [id, m] = vertex_measures[i];
    if (i > 0 && id == ids_.back())
      throw ValidationError("duplicate vertex id '" + id + "'");
    if (!(m > 0.0) || !std::isfinite(m))
      throw ValidationError("vertex '" + id + "' has nonpositive measure");
    ids_.push_back(id);
    measure_.push_back(m);
  }

  adj_.resize(ids_.size());
  edges_.reserve(edge_weights.size());
  for (const auto& [ida, idb, w] : edge_weights) {
    if (ida == idb) throw ValidationError("self-loop at vertex '" + ida + "'");
    if (!(w > 0.0) || !std::isfinite(w))
      throw ValidationError("edge {" + ida + "," + idb +
                            "} has nonpositive weight");
    int u = index_of(ida);
    int v = index_of(idb);
    if (u > v) std::swap(u, v);
    edges_.push_back({u, v, w});
  }
  std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.u, a.v) < std::tie(b.u, b.v);
  });
  for (std::size_t i = 1; i < edges_.size(); ++i) {
    if (edges_[i].u == edges_[i - 1].u && edges_[i].v == edges_[i - 1].v)
      throw ValidationError("duplicate edge {" + ids_[edges_[i].u] + "," +
                            ids_[edges_[i].v] + "}");
  }
  for (const Edge& e : edges_) {
    adj_[e.u].emplace_back(e.v, e.w);
    adj_[e.v].emplace_back(e.u, e.w);
  }
  for (auto& nbrs : adj_) std::sort(nbrs.begin(), nbrs.end());
}

int WeightedGraph::index_of(const VertexId& id) const {
  auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
  if (it == ids_.end() || *it != id)
    throw std::invalid_argument("unknown vertex id '" + id + "'");
  return static_cast<int>(it - ids_.begin());
}

std::optional<int> WeightedGraph::find(const VertexId& id) const {
  auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
  if (it == ids_.end() || *it != id) return std::nullopt;
  return static_cast<int>(it - ids_.begin());
}

double WeightedGraph::total_measure() const {
  double s = 0.0;
  for (double m : measure_) s += m;
  return s;
}

double WeightedGraph::weight(int i, int j) const {
  for (const auto& [k, w] : adj_[i])
    if (k == j) return w;
  return 0.0;
}

bool WeightedGraph::connected() const {
  if (size() == 0) return true;
  std::vector<int> all(size());
  for (int i = 0; i < size(); ++i) all[i] = i;
  return connected_within(all);
}

bool WeightedGraph::connected_within(const std::vector<int>& subset) const {
  if (subset.empty()) return true;
  std::vector<char> in(size(), 0), seen(size(), 0);
  for (int i : subset) in[i] = 1;
  std::deque<int> queue{subset.front()};
  seen[subset.front()] = 1;
  std::size_t reached = 1;
  while (!queue.empty()) {
    int x = queue.front();
    queue.pop_front();
    for (const auto& [y, w] : adj_[x]) {
      (void)w;
      if (in[y] && !seen[y]) {
        seen[y] = 1;
        ++reached;
        queue.push_back(y);
      }
    }
  }
  return reached == subset.size();
}

bool WeightedGraph::operator==(const WeightedGraph& other) const {
  if (ids_ != other.ids_ || measure_ != other.measure_) return false;
  if (edges_.size() != other.edges_.size()) return false;
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const Edge& a = edges_[i];
    const Edge& b = other.edges_[i];
    if (a.u != b.u || a.v != b.v || a.w != b.w) return false;
  }
  return true;
}

VertexSubset::VertexSubset(std::vector<VertexId> ids) : members(std::move(ids)) {
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
}

VertexSubset::VertexSubset(std::initializer_list<VertexId> ids)
    : VertexSubset(std::vector<VertexId>(ids)) {}

bool VertexSubset::contains(const VertexId& id) const {
  return std::binary_search(members.begin(), members.end(), id);
}

VertexSubset make_subset(const WeightedGraph& g, std::vector<VertexId> ids) {
  VertexSubset s(std::move(ids));
  for (const auto& id : s.members) g.index_of(id);  // throws if unknown
  return s;
}

VertexSubset full_subset(const WeightedGraph& g) {
  return VertexSubset(g.ids());
}

VertexSubset vertex_boundary(const WeightedGraph& g, const VertexSubset& omega) {
  if (omega.empty()) throw std::invalid_argument("vertex_boundary: empty omega");
  std::vector<char> in(g.size(), 0);
  for (const auto& id : omega.members) in[g.index_of(id)] = 1;
  std::set<VertexId> out;
  for (const auto& id : omega.members) {
    int x = g.index_of(id);
    for (const auto& [y, w] : g.neighbors(x)) {
      (void)w;
      if (!in[y]) out.insert(g.id(y));
    }
  }
  return VertexSubset(std::vector<VertexId>(out.begin(), out.end()));
}

Domain::Domain(const WeightedGraph& g, const VertexSubset& omega) {
  if (omega.empty()) throw std::invalid_argument("domain: empty omega");
  for (const auto& id : omega.members) g.index_of(id);

  auto data = std::make_shared<Data>();
  data->base = g;
  data->omega = omega;
  data->boundary = vertex_boundary(g, omega);

  std::vector<VertexId> closure_ids = omega.members;
  closure_ids.insert(closure_ids.end(), data->boundary.members.begin(),
                     data->boundary.members.end());
  std::sort(closure_ids.begin(), closure_ids.end());

  std::vector<int> closure_idx;
  closure_idx.reserve(closure_ids.size());
  for (const auto& id : closure_ids) closure_idx.push_back(g.index_of(id));
  if (!g.connected_within(closure_idx))
    throw DomainDisconnectedError("domain closure is not connected");

  std::vector<char> interior_in_base(g.size(), 0);
  for (const auto& id : omega.members) interior_in_base[g.index_of(id)] = 1;

  std::vector<std::pair<VertexId, double>> verts;
  verts.reserve(closure_ids.size());
  for (int i : closure_idx) verts.emplace_back(g.id(i), g.measure(i));
  std::vector<std::tuple<VertexId, VertexId, double>> kept;
  for (const Edge& e : g.edges()) {
    bool u_in = std::binary_search(closure_ids.begin(), closure_ids.end(), g.id(e.u));
    bool v_in = std::binary_search(closure_ids.begin(), closure_ids.end(), g.id(e.v));
    if (!u_in || !v_in) continue;
    // keep only edges meeting the interior
    if (interior_in_base[e.u] || interior_in_base[e.v])
      kept.emplace_back(g.id(e.u), g.id(e.v), e.w);
  }
  data->g_omega = WeightedGraph(std::move(verts), std::move(kept));

  const int n = data->g_omega.size();
  data->interior_mask.assign(n, 0);
  for (int i = 0; i < n; ++i) {
    if (omega.contains(data->g_omega.id(i))) {
      data->interior_mask[i] = 1;
      data->interior_idx.push_back(i);
    } else {
      data->boundary_idx.push_back(i);
    }
  }
  d_ = std::move(data);
}

VertexSubset Domain::closure() const {
  return VertexSubset(d_->g_omega.ids());
}

Domain build_domain(const WeightedGraph& g, const VertexSubset& omega) {
  return Domain(g, omega);
}

double volume(const WeightedGraph& g, const VertexSubset& a) {
  double s = 0.0;
  for (const auto& id : a.members) s += g.measure(g.index_of(id));
  return s;
}

double volume(const Domain& d, const VertexSubset& a) {
  return volume(d.boundary_graph(), a);
}

std::vector<std::pair<VertexId, VertexId>> edge_cut(const WeightedGraph& g,
                                                    const VertexSubset& a,
                                                    const VertexSubset& b) {
  std::vector<std::pair<VertexId, VertexId>> cut;
  for (const Edge& e : g.edges()) {
    const VertexId& idu = g.id(e.u);
    const VertexId& idv = g.id(e.v);
    bool ua = a.contains(idu), ub = b.contains(idu);
    bool va = a.contains(idv), vb = b.contains(idv);
    if ((ua && vb) || (va && ub)) cut.emplace_back(idu, idv);
  }
  return cut;
}

// ---- generators ----------------------------------------------------------

namespace {

std::vector<std::pair<VertexId, double>> unit_vertices(int n) {
  std::vector<std::pair<VertexId, double>> v;
  v.reserve(n);
  for (int i = 0; i < n; ++i) v.emplace_back(std::to_string(i), 1.0);
  return v;
}

}  // namespace

WeightedGraph make_path(int n) {
  if (n < 1) throw std::invalid_argument("path: need n >= 1");
  std::vector<std::tuple<VertexId, VertexId, double>> e;
  for (int i = 0; i < n; ++i)
    e.emplace_back(std::to_string(i), std::to_string(i + 1), 1.0);
  return WeightedGraph(unit_vertices(n + 1), std::move(e));
}

WeightedGraph make_cycle(int n) {
  if (n < 3) throw std::invalid_argument("cycle: need n >= 3");
  std::vector<std::tuple<VertexId, VertexId, double>> e;
  for (int i = 0; i < n; ++i)
    e.emplace_back(std::to_string(i), std::to_string((i + 1) % n), 1.0);
  return WeightedGraph(unit_vertices(n), std::move(e));
}

WeightedGraph make_complete(int n) {
  if (n < 2) throw std::invalid_argument("complete: need n >= 2");
  std::vector<std::tuple<VertexId, VertexId, double>> e;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      e.emplace_back(std::to_string(i), std::to_string(j), 1.0);
  return WeightedGraph(unit_vertices(n), std::move(e));
}

WeightedGraph make_grid(int rows, int cols) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("grid: need r,c >= 1");
  auto name = [cols](int r, int c) {
    (void)cols;
    return std::to_string(r) + "," + std::to_string(c);
  };
  std::vector<std::pair<VertexId, double>> v;
  std::vector<std::tuple<VertexId, VertexId, double>> e;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      v.emplace_back(name(r, c), 1.0);
      if (r + 1 < rows) e.emplace_back(name(r, c), name(r + 1, c), 1.0);
      if (c + 1 < cols) e.emplace_back(name(r, c), name(r, c + 1), 1.0);
    }
  return WeightedGraph(std::move(v), std::move(e));
}

WeightedGraph make_star(int leaves) {
  if (leaves < 1) throw std::invalid_argument("star: need >= 1 leaf");
  std::vector<std::tuple<VertexId, VertexId, double>> e;
  for (int i = 1; i <= leaves; ++i)
    e.emplace_back("0", std::to_string(i), 1.0);
  return WeightedGraph(unit_vertices(leaves + 1), std::move(e));
}

WeightedGraph make_random(int n, double edge_prob, double wmin, double wmax,
                          std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("random: need n >= 2");
  if (!(edge_prob >= 0.0 && edge_prob <= 1.0))
    throw std::invalid_argument("random: edge probability outside [0,1]");
  if (!(0.0 < wmin && wmin <= wmax))
    throw std::invalid_argument("random: bad weight range");

  // Retry with derived seeds until the sample is connected.
  for (int attempt = 0; attempt < 100; ++attempt) {
    Rng rng(Rng::derive(seed, static_cast<std::uint64_t>(attempt)));
    std::vector<std::tuple<VertexId, VertexId, double>> e;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        double coin = rng.next_double();
        double w = rng.next_range(wmin, wmax);
        if (coin < edge_prob)
          e.emplace_back(std::to_string(i), std::to_string(j), w);
      }
    WeightedGraph g(unit_vertices(n), std::move(e));
    if (g.connected()) return g;
  }
  throw ValidationError("random: no connected sample in 100 attempts");
}

namespace {

std::vector<double> parse_args(const std::string& s) {
  std::vector<double> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(std::stod(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(std::stod(cur));
  return out;
}

}  // namespace

WeightedGraph generate(const std::string& family_spec) {
  auto open = family_spec.find('(');
  auto close = family_spec.rfind(')');
  if (open == std::string::npos || close == std::string::npos || close < open)
    throw std::invalid_argument("generate: expected family(args), got '" +
                                family_spec + "'");
  std::string family = family_spec.substr(0, open);
  std::vector<double> a;
  try {
    a = parse_args(family_spec.substr(open + 1, close - open - 1));
  } catch (const std::exception&) {
    throw std::invalid_argument("generate: bad arguments in '" + family_spec + "'");
  }
  auto arity = [&](std::size_t k) {
    if (a.size() != k)
      throw std::invalid_argument("generate: '" + family + "' takes " +
                                  std::to_string(k) + " arguments");
  };
  if (family == "path") { arity(1); return make_path(static_cast<int>(a[0])); }
  if (family == "cycle") { arity(1); return make_cycle(static_cast<int>(a[0])); }
  if (family == "complete") { arity(1); return make_complete(static_cast<int>(a[0])); }
  if (family == "grid") { arity(2); return make_grid(static_cast<int>(a[0]), static_cast<int>(a[1])); }
  if (family == "star") { arity(1); return make_star(static_cast<int>(a[0])); }
  if (family == "random") {
    arity(5);
    return make_random(static_cast<int>(a[0]), a[1], a[2], a[3],
                       static_cast<std::uint64_t>(a[4]));
  }
  throw std::invalid_argument("generate: unknown family '" + family + "'");
}

// ---- infinite families ---------------------------------------------------

namespace {

struct FamilyKind {
  enum Tag { line, half_line, lattice, tree } tag;
  int degree = 0;  // tree only
};

FamilyKind parse_family(const std::string& family) {
  if (family == "integer-line") return {FamilyKind::line};
  if (family == "half-line") return {FamilyKind::half_line};
  if (family == "lattice") return {FamilyKind::lattice};
  if (family.rfind("tree(", 0) == 0 && family.back() == ')') {
    int d = std::stoi(family.substr(5, family.size() - 6));
    if (d < 2) throw std::invalid_argument("tree: need degree >= 2");
    return {FamilyKind::tree, d};
  }
  throw std::invalid_argument("unknown infinite family '" + family + "'");
}

// Vertices of a family ball, grouped by distance from the root.
std::vector<std::vector<VertexId>> family_spheres(const FamilyKind& f, int radius) {
  std::vector<std::vector<VertexId>> sph(radius + 1);
  switch (f.tag) {
    case FamilyKind::line:
      sph[0] = {"0"};
      for (int r = 1; r <= radius; ++r)
        sph[r] = {std::to_string(-r), std::to_string(r)};
      break;
    case FamilyKind::half_line:
      for (int r = 0; r <= radius; ++r) sph[r] = {std::to_string(r)};
      break;
    case FamilyKind::lattice:
      for (int x = -radius; x <= radius; ++x)
        for (int y = -radius; y <= radius; ++y) {
          int d = std::abs(x) + std::abs(y);
          if (d <= radius)
            sph[d].push_back(std::to_string(x) + "," + std::to_string(y));
        }
      break;
    case FamilyKind::tree: {
      sph[0] = {"r"};
      for (int r = 1; r <= radius; ++r) {
        for (const VertexId& parent : sph[r - 1]) {
          int children = (r == 1) ? f.degree : f.degree - 1;
          for (int c = 0; c < children; ++c)
            sph[r].push_back(parent + "." + std::to_string(c));
        }
      }
      break;
    }
  }
  return sph;
}

std::vector<std::tuple<VertexId, VertexId, double>> family_edges(
    const FamilyKind& f, int radius) {
  std::vector<std::tuple<VertexId, VertexId, double>> e;
  switch (f.tag) {
    case FamilyKind::line:
      for (int i = -radius; i < radius; ++i)
        e.emplace_back(std::to_string(i), std::to_string(i + 1), 1.0);
      break;
    case FamilyKind::half_line:
      for (int i = 0; i < radius; ++i)
        e.emplace_back(std::to_string(i), std::to_string(i + 1), 1.0);
      break;
    case FamilyKind::lattice:
      for (int x = -radius; x <= radius; ++x)
        for (int y = -radius; y <= radius; ++y) {
          if (std::abs(x) + std::abs(y) > radius) continue;
          auto name = [](int a, int b) {
            return std::to_string(a) + "," + std::to_string(b);
          };
          if (std::abs(x + 1) + std::abs(y) <= radius)
            e.emplace_back(name(x, y), name(x + 1, y), 1.0);
          if (std::abs(x) + std::abs(y + 1) <= radius)
            e.emplace_back(name(x, y), name(x, y + 1), 1.0);
        }
      break;
    case FamilyKind::tree: {
      auto sph = family_spheres(f, radius);
      for (int r = 1; r <= radius; ++r)
        for (const VertexId& child : sph[r]) {
          VertexId parent = child.substr(0, child.rfind('.'));
          e.emplace_back(parent, child, 1.0);
        }
      break;
    }
  }
  return e;
}

}  // namespace

std::pair<WeightedGraph, Exhaustion> truncate(const std::string& family,
                                              int radius) {
  if (radius < 1) throw std::invalid_argument("truncate: need radius >= 1");
  FamilyKind f = parse_family(family);
  auto sph = family_spheres(f, radius);

  std::vector<std::pair<VertexId, double>> verts;
  for (const auto& shell : sph)
    for (const auto& id : shell) verts.emplace_back(id, 1.0);
  WeightedGraph g(std::move(verts), family_edges(f, radius));

  Exhaustion ex;
  std::vector<VertexId> ball;
  for (int r = 0; r <= radius; ++r) {
    ball.insert(ball.end(), sph[r].begin(), sph[r].end());
    if (r >= 1) ex.family.push_back(VertexSubset(ball));
  }
  return {std::move(g), std::move(ex)};
}

Domain truncation_domain(const std::string& family, int radius) {
  if (radius < 1) throw std::invalid_argument("truncation_domain: radius >= 1");
  auto [g, ex] = truncate(family, radius);
  FamilyKind f = parse_family(family);
  auto sph = family_spheres(f, radius - 1);
  std::vector<VertexId> omega;
  for (const auto& shell : sph)
    omega.insert(omega.end(), shell.begin(), shell.end());
  return Domain(g, VertexSubset(omega));
}

VertexId family_root(const std::string& family) {
  switch (parse_family(family).tag) {
    case FamilyKind::lattice: return "0,0";
    case FamilyKind::tree: return "r";
    default: return "0";
  }
}

Domain rescale_measure(const Domain& d, int k) {
  if (k < 1) throw std::invalid_argument("rescale_measure: need k >= 1");
  const WeightedGraph& g = d.boundary_graph();
  std::vector<std::pair<VertexId, double>> verts;
  verts.reserve(g.size());
  for (int i = 0; i < g.size(); ++i) {
    double m = g.measure(i);
    if (d.is_interior(i)) m = m / static_cast<double>(k);
    verts.emplace_back(g.id(i), m);
  }
  std::vector<std::tuple<VertexId, VertexId, double>> e;
  for (const Edge& ed : g.edges())
    e.emplace_back(g.id(ed.u), g.id(ed.v), ed.w);
  WeightedGraph rescaled(std::move(verts), std::move(e));
  return Domain(rescaled, d.omega());
}

// ---- file I/O -------------------------------------------------------------

WeightedGraph load_graph(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'", 0);

  std::string line;
  int lineno = 0;
  bool header_seen = false;
  std::vector<std::pair<VertexId, double>> verts;
  std::vector<std::tuple<VertexId, VertexId, double>> edges;

  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;  // blank
    if (!header_seen) {
      std::string ver;
      if (tok != "pgraph" || !(ls >> ver) || ver != "v1")
        throw ParseError("expected header 'pgraph v1'", lineno);
      header_seen = true;
      continue;
    }
    if (tok == "v") {
      VertexId id;
      double m;
      if (!(ls >> id >> m)) throw ParseError("bad vertex line", lineno);
      verts.emplace_back(id, m);
    } else if (tok == "e") {
      VertexId a, b;
      double w;
      if (!(ls >> a >> b >> w)) throw ParseError("bad edge line", lineno);
      edges.emplace_back(a, b, w);
    } else {
      throw ParseError("unknown record '" + tok + "'", lineno);
    }
  }
  if (!header_seen) throw ParseError("missing header 'pgraph v1'", lineno);
  return WeightedGraph(std::move(verts), std::move(edges));
}

void save_graph(const WeightedGraph& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path.string() + "'");
  out << "pgraph v1\n";
  for (int i = 0; i < g.size(); ++i)
    out << "v " << g.id(i) << " " << fmt_double(g.measure(i)) << "\n";
  for (const Edge& e : g.edges())
    out << "e " << g.id(e.u) << " " << g.id(e.v) << " " << fmt_double(e.w)
        << "\n";
}

VertexSubset load_vertex_list(const std::filesystem::path& path,
                              const WeightedGraph& host) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'", 0);
  std::vector<VertexId> ids;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    VertexId id;
    if (!(ls >> id)) continue;
    VertexId extra;
    if (ls >> extra) throw ParseError("one vertex id per line", lineno);
    ids.push_back(id);
  }
  return make_subset(host, std::move(ids));
}

void save_vertex_list(const VertexSubset& s, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path.string() + "'");
  for (const auto& id : s.members) out << id << "\n";
}

}  // namespace pcap
