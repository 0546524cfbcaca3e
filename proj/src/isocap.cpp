#include "pcap/isocap.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "pcap/errors.hpp"

namespace pcap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Tracks the smallest ratio seen, with deterministic tie-breaking on the
/// lexicographically smallest canonical witness.
struct Best {
  double value = kInf;
  double cap = 0.0;
  std::vector<VertexId> wa, wb;
  long long examined = 0;

  void offer(double val, double capval, std::vector<VertexId> a,
             std::vector<VertexId> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (!b.empty() && b < a) std::swap(a, b);
    if (val < value || (val == value && std::tie(a, b) < std::tie(wa, wb))) {
      value = val;
      cap = capval;
      wa = std::move(a);
      wb = std::move(b);
    }
  }
};

IsocapResult pack(const Best& best, bool with_b, bool exhaustive) {
  IsocapResult r;
  r.value = best.value;
  r.capacity_at_witness = best.cap;
  r.witness_a = VertexSubset(best.wa);
  if (with_b) r.witness_b = VertexSubset(best.wb);
  r.pairs_examined = best.examined;
  r.exhaustive = exhaustive;
  return r;
}

std::vector<VertexId> ids_of_mask(const WeightedGraph& g,
                                  const std::vector<int>& host,
                                  std::uint32_t mask) {
  std::vector<VertexId> ids;
  for (std::size_t k = 0; k < host.size(); ++k)
    if (mask & (1u << k)) ids.push_back(g.id(host[k]));
  return ids;
}

/// Second-smallest generalized eigenvector of the graph Laplacian, used
/// to seed the heuristic level-set candidates.
std::vector<double> fiedler_like_vector(const WeightedGraph& g) {
  const int n = g.size();
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) M(i, i) = g.measure(i);
  for (const Edge& e : g.edges()) {
    L(e.u, e.u) += e.w;
    L(e.v, e.v) += e.w;
    L(e.u, e.v) -= e.w;
    L(e.v, e.u) -= e.w;
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(L, M);
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = es.eigenvectors()(i, 1);
  return v;
}

/// Exhaustive scan over unordered disjoint nonempty pairs of the host.
/// The visitor receives position masks and the capacity of the pair.
template <typename Visit>
void scan_pairs_exhaustive(const WeightedGraph& g, const std::vector<int>& host,
                           double p, const SolverOptions& solver,
                           Visit&& visit) {
  const int n = static_cast<int>(host.size());
  std::uint64_t total = 1;
  for (int i = 0; i < n; ++i) total *= 3;

  std::vector<int> a_idx, b_idx;
  std::vector<int> digits(n, 0);
  for (std::uint64_t code = 1; code < total; ++code) {
    // increment base-3 counter
    for (int i = 0; i < n; ++i) {
      if (++digits[i] < 3) break;
      digits[i] = 0;
    }
    std::uint32_t amask = 0, bmask = 0;
    int first = -1;
    for (int i = 0; i < n; ++i) {
      if (digits[i] == 0) continue;
      if (first < 0) first = digits[i];
      if (digits[i] == 1)
        amask |= 1u << i;
      else
        bmask |= 1u << i;
    }
    if (amask == 0 || bmask == 0) continue;
    if (first != 1) continue;  // each unordered pair exactly once
    a_idx.clear();
    b_idx.clear();
    for (int i = 0; i < n; ++i) {
      if (amask & (1u << i)) a_idx.push_back(host[i]);
      if (bmask & (1u << i)) b_idx.push_back(host[i]);
    }
    double cap = detail::capacity_raw(g, a_idx, b_idx, p, solver).value;
    visit(amask, bmask, cap);
  }
}

/// Heuristic scan: pairs of the form (top segment, bottom segment) of the
/// host ordered by an approximate eigenfunction.
template <typename Visit>
void scan_pairs_heuristic(const WeightedGraph& g, const std::vector<int>& host,
                          double p, const SolverOptions& solver,
                          Visit&& visit) {
  const int n = static_cast<int>(host.size());
  std::vector<double> f = fiedler_like_vector(g);
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return f[host[a]] < f[host[b]];
  });
  std::vector<int> a_idx, b_idx;
  for (int bot = 1; bot < n; ++bot) {
    for (int top = 1; top + bot <= n; ++top) {
      std::uint32_t amask = 0, bmask = 0;
      a_idx.clear();
      b_idx.clear();
      for (int i = 0; i < bot; ++i) {
        bmask |= 1u << order[i];
        b_idx.push_back(host[order[i]]);
      }
      for (int i = n - top; i < n; ++i) {
        amask |= 1u << order[i];
        a_idx.push_back(host[order[i]]);
      }
      double cap = detail::capacity_raw(g, a_idx, b_idx, p, solver).value;
      visit(amask, bmask, cap);
    }
  }
}

template <typename Visit>
bool scan_pairs(const WeightedGraph& g, const std::vector<int>& host, double p,
                const IsocapOptions& opts, const char* who, Visit&& visit) {
  const int n = static_cast<int>(host.size());
  if (n > opts.limits.pair_max_host) {
    if (!opts.heuristic)
      throw SizeError(std::string(who) + ": host of size " + std::to_string(n) +
                      " exceeds the exhaustive cap " +
                      std::to_string(opts.limits.pair_max_host) +
                      "; enable heuristic mode");
    scan_pairs_heuristic(g, host, p, opts.solver, visit);
    return false;
  }
  scan_pairs_exhaustive(g, host, p, opts.solver, visit);
  return true;
}

double mask_mass(const std::vector<double>& mass, std::uint32_t mask) {
  double s = 0.0;
  for (std::size_t i = 0; i < mass.size(); ++i)
    if (mask & (1u << i)) s += mass[i];
  return s;
}

}  // namespace

IsocapResult alpha_dirichlet(const Domain& d, Exponent p,
                             const IsocapOptions& opts) {
  if (d.boundary_count() == 0)
    throw std::invalid_argument("alpha_dirichlet: domain has empty boundary");
  const WeightedGraph& g = d.boundary_graph();
  const std::vector<int>& host = d.interior_indices();
  const int n = static_cast<int>(host.size());
  bool exhaustive = true;

  Best best;
  std::vector<int> a_idx;
  auto consider = [&](std::uint32_t amask) {
    a_idx.clear();
    double ma = 0.0;
    for (int i = 0; i < n; ++i)
      if (amask & (1u << i)) {
        a_idx.push_back(host[i]);
        ma += g.measure(host[i]);
      }
    double cap =
        detail::capacity_raw(g, a_idx, d.boundary_indices(), p.value(),
                             opts.solver)
            .value;
    ++best.examined;
    best.offer(cap / ma, cap, ids_of_mask(g, host, amask), {});
  };

  if (n > opts.limits.dirichlet_max_omega) {
    if (!opts.heuristic)
      throw SizeError("alpha_dirichlet: interior of size " + std::to_string(n) +
                      " exceeds the exhaustive cap " +
                      std::to_string(opts.limits.dirichlet_max_omega) +
                      "; enable heuristic mode");
    exhaustive = false;
    // Level sets of the quadratic ground state.
    std::vector<double> f = fiedler_like_vector(g);
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return std::abs(f[host[a]]) > std::abs(f[host[b]]);
    });
    std::uint32_t amask = 0;
    for (int k = 0; k < n; ++k) {
      amask |= 1u << order[k];
      consider(amask);
    }
  } else {
    for (std::uint32_t amask = 1; amask < (1u << n); ++amask) consider(amask);
  }
  return pack(best, false, exhaustive);
}

namespace {

struct PairSpec {
  bool require_a_subset = false;   // A,B must lie inside `subset_mask`
  std::uint32_t subset_mask = 0;
  const std::vector<double>* norm_mass = nullptr;  // per-position normalizer
};

/// Shared driver for the four pair-type constants over a common host.
struct PairAccumulator {
  PairSpec spec;
  Best best;

  void visit(const WeightedGraph& g, const std::vector<int>& host,
             std::uint32_t amask, std::uint32_t bmask) {
    if (spec.require_a_subset &&
        ((amask & ~spec.subset_mask) != 0 || (bmask & ~spec.subset_mask) != 0))
      return;
    ++best.examined;
    double na = mask_mass(*spec.norm_mass, amask);
    double nb = mask_mass(*spec.norm_mass, bmask);
    double norm = std::min(na, nb);
    if (norm <= 0.0) return;  // ratio is the infinite sentinel; skip
    // capacity filled in by caller via offer
  }
};

}  // namespace

AlphaBundle alpha_pair_bundle(const Domain& d, Exponent p,
                              const IsocapOptions& opts) {
  const WeightedGraph& g = d.boundary_graph();
  const int n = g.size();
  if (n < 2) throw std::invalid_argument("alpha_pair_bundle: need >= 2 vertices");

  std::vector<int> host(n);
  for (int i = 0; i < n; ++i) host[i] = i;

  std::vector<double> m_all(n), m_int(n), m_bd(n);
  std::uint32_t omega_mask = 0, bd_mask = 0;
  for (int i = 0; i < n; ++i) {
    m_all[i] = g.measure(i);
    if (d.is_interior(i)) {
      m_int[i] = g.measure(i);
      omega_mask |= 1u << i;
    } else {
      m_bd[i] = g.measure(i);
      bd_mask |= 1u << i;
    }
  }
  const bool want_neumann = d.interior_count() >= 2;
  const bool want_steklov = d.boundary_count() >= 2;

  Best neumann, neumann_bar, steklov, steklov_bar;
  bool exhaustive = scan_pairs(
      g, host, p.value(), opts, "alpha_pair_bundle",
      [&](std::uint32_t amask, std::uint32_t bmask, double cap) {
        auto ids_a = [&] { return ids_of_mask(g, host, amask); };
        auto ids_b = [&] { return ids_of_mask(g, host, bmask); };
        if (want_neumann && (amask & ~omega_mask) == 0 &&
            (bmask & ~omega_mask) == 0) {
          ++neumann.examined;
          double norm = std::min(mask_mass(m_all, amask), mask_mass(m_all, bmask));
          neumann.offer(cap / norm, cap, ids_a(), ids_b());
        }
        if (want_neumann) {
          ++neumann_bar.examined;
          double norm = std::min(mask_mass(m_int, amask), mask_mass(m_int, bmask));
          if (norm > 0.0) neumann_bar.offer(cap / norm, cap, ids_a(), ids_b());
        }
        if (want_steklov && (amask & ~bd_mask) == 0 && (bmask & ~bd_mask) == 0) {
          ++steklov.examined;
          double norm = std::min(mask_mass(m_all, amask), mask_mass(m_all, bmask));
          steklov.offer(cap / norm, cap, ids_a(), ids_b());
        }
        if (want_steklov) {
          ++steklov_bar.examined;
          double norm = std::min(mask_mass(m_bd, amask), mask_mass(m_bd, bmask));
          if (norm > 0.0) steklov_bar.offer(cap / norm, cap, ids_a(), ids_b());
        }
      });

  AlphaBundle out;
  if (want_neumann) {
    out.neumann = pack(neumann, true, exhaustive);
    out.neumann_bar = pack(neumann_bar, true, exhaustive);
  }
  if (want_steklov) {
    out.steklov = pack(steklov, true, exhaustive);
    out.steklov_bar = pack(steklov_bar, true, exhaustive);
  }
  return out;
}

namespace {

IsocapResult pair_alpha_over(const Domain& d, Exponent p,
                             const std::vector<int>& host,
                             const std::vector<double>& norm_mass_by_closure,
                             const IsocapOptions& opts, const char* who) {
  const WeightedGraph& g = d.boundary_graph();
  std::vector<double> mass(host.size());
  for (std::size_t k = 0; k < host.size(); ++k)
    mass[k] = norm_mass_by_closure[host[k]];

  Best best;
  bool exhaustive = scan_pairs(
      g, host, p.value(), opts, who,
      [&](std::uint32_t amask, std::uint32_t bmask, double cap) {
        ++best.examined;
        double norm = std::min(mask_mass(mass, amask), mask_mass(mass, bmask));
        if (norm <= 0.0) return;
        best.offer(cap / norm, cap, ids_of_mask(g, host, amask),
                   ids_of_mask(g, host, bmask));
      });
  return pack(best, true, exhaustive);
}

std::vector<double> closure_masses(const Domain& d, bool interior_only,
                                   bool boundary_only) {
  const WeightedGraph& g = d.boundary_graph();
  std::vector<double> m(g.size(), 0.0);
  for (int i = 0; i < g.size(); ++i) {
    bool in = d.is_interior(i);
    if (interior_only && !in) continue;
    if (boundary_only && in) continue;
    m[i] = g.measure(i);
  }
  return m;
}

std::vector<int> all_closure(const Domain& d) {
  std::vector<int> v(d.closure_size());
  for (int i = 0; i < d.closure_size(); ++i) v[i] = i;
  return v;
}

}  // namespace

IsocapResult alpha_neumann(const Domain& d, Exponent p,
                           const IsocapOptions& opts) {
  if (d.interior_count() < 2)
    throw std::invalid_argument("alpha_neumann: need at least 2 interior vertices");
  return pair_alpha_over(d, p, d.interior_indices(),
                         closure_masses(d, false, false), opts, "alpha_neumann");
}

IsocapResult alpha_neumann_bar(const Domain& d, Exponent p,
                               const IsocapOptions& opts) {
  if (d.interior_count() < 2)
    throw std::invalid_argument("alpha_neumann_bar: need at least 2 interior vertices");
  return pair_alpha_over(d, p, all_closure(d), closure_masses(d, true, false),
                         opts, "alpha_neumann_bar");
}

IsocapResult alpha_steklov(const Domain& d, Exponent p,
                           const IsocapOptions& opts) {
  if (d.boundary_count() < 2)
    throw std::invalid_argument("alpha_steklov: need at least 2 boundary vertices");
  return pair_alpha_over(d, p, d.boundary_indices(),
                         closure_masses(d, false, false), opts, "alpha_steklov");
}

IsocapResult alpha_steklov_bar(const Domain& d, Exponent p,
                               const IsocapOptions& opts) {
  if (d.boundary_count() < 2)
    throw std::invalid_argument("alpha_steklov_bar: need at least 2 boundary vertices");
  return pair_alpha_over(d, p, all_closure(d), closure_masses(d, false, true),
                         opts, "alpha_steklov_bar");
}

IsocapResult alpha_closed(const WeightedGraph& g, Exponent p,
                          const IsocapOptions& opts) {
  if (g.size() < 2)
    throw std::invalid_argument("alpha_closed: need at least 2 vertices");
  if (!g.connected())
    throw std::invalid_argument("alpha_closed: graph must be connected");
  Domain d(g, full_subset(g));
  return pair_alpha_over(d, p, all_closure(d), closure_masses(d, false, false),
                         opts, "alpha_closed");
}

std::vector<std::pair<int, double>> alpha_dirichlet_infinite(
    const std::string& family, Exponent p, const std::vector<int>& radii,
    const IsocapOptions& opts) {
  std::vector<std::pair<int, double>> out;
  for (int r : radii) {
    Domain d = truncation_domain(family, r);
    out.emplace_back(r, alpha_dirichlet(d, p, opts).value);
  }
  return out;
}

std::vector<std::pair<int, double>> alpha_rescaled_sequence(
    const Domain& d, Exponent p, const std::vector<int>& ks,
    const IsocapOptions& opts) {
  if (d.boundary_count() < 2)
    throw std::invalid_argument("alpha_rescaled_sequence: need |boundary| >= 2");
  for (int k : ks)
    if (k < 1) throw std::invalid_argument("alpha_rescaled_sequence: k >= 1");

  const WeightedGraph& g = d.boundary_graph();
  const int n = g.size();
  std::vector<int> host = all_closure(d);
  std::vector<double> m_int(n, 0.0), m_bd(n, 0.0);
  for (int i = 0; i < n; ++i)
    (d.is_interior(i) ? m_int[i] : m_bd[i]) = g.measure(i);

  std::vector<Best> bests(ks.size());
  scan_pairs(g, host, p.value(), opts, "alpha_rescaled_sequence",
             [&](std::uint32_t amask, std::uint32_t bmask, double cap) {
               double ia = mask_mass(m_int, amask), ib = mask_mass(m_int, bmask);
               double ba = mask_mass(m_bd, amask), bb = mask_mass(m_bd, bmask);
               for (std::size_t t = 0; t < ks.size(); ++t) {
                 double k = static_cast<double>(ks[t]);
                 double norm = std::min(ba + ia / k, bb + ib / k);
                 ++bests[t].examined;
                 if (norm > 0.0)
                   bests[t].offer(cap / norm, cap, ids_of_mask(g, host, amask),
                                  ids_of_mask(g, host, bmask));
               }
             });
  std::vector<std::pair<int, double>> out;
  for (std::size_t t = 0; t < ks.size(); ++t)
    out.emplace_back(ks[t], bests[t].value);
  return out;
}

double cheeger_dirichlet(const Domain& d, const EnumLimits& limits) {
  const std::vector<int>& host = d.interior_indices();
  const int n = static_cast<int>(host.size());
  if (n == 0) throw std::invalid_argument("cheeger_dirichlet: empty interior");
  if (n > limits.dirichlet_max_omega)
    throw SizeError("cheeger_dirichlet: interior exceeds the enumeration cap");
  const WeightedGraph& g = d.boundary_graph();
  std::vector<int> pos(g.size(), -1);
  for (int k = 0; k < n; ++k) pos[host[k]] = k;

  double best = kInf;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    double cut = 0.0, vol = 0.0;
    for (int k = 0; k < n; ++k)
      if (mask & (1u << k)) vol += g.measure(host[k]);
    for (const Edge& e : g.edges()) {
      bool u_in = pos[e.u] >= 0 && (mask & (1u << pos[e.u]));
      bool v_in = pos[e.v] >= 0 && (mask & (1u << pos[e.v]));
      if (u_in != v_in) cut += e.w;
    }
    best = std::min(best, cut / vol);
  }
  return best;
}

double cheeger_closed(const WeightedGraph& g, const EnumLimits& limits) {
  const int n = g.size();
  if (n < 2) throw std::invalid_argument("cheeger_closed: need >= 2 vertices");
  if (n - 1 > limits.dirichlet_max_omega)
    throw SizeError("cheeger_closed: graph exceeds the enumeration cap");

  double best = kInf;
  // Vertex 0 stays in W, so each unordered split is visited once.
  for (std::uint32_t rest = 0; rest + 1 < (1u << (n - 1)); ++rest) {
    std::uint32_t wmask = 1u | (rest << 1);
    double vol_w = 0.0, vol_c = 0.0, cut = 0.0;
    for (int i = 0; i < n; ++i)
      (wmask & (1u << i)) ? vol_w += g.measure(i) : vol_c += g.measure(i);
    for (const Edge& e : g.edges()) {
      bool u_in = wmask & (1u << e.u);
      bool v_in = wmask & (1u << e.v);
      if (u_in != v_in) cut += e.w;
    }
    best = std::min(best, cut / std::min(vol_w, vol_c));
  }
  return best;
}

}  // namespace pcap
