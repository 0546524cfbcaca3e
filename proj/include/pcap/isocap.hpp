#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pcap/capacity.hpp"
#include "pcap/energy.hpp"
#include "pcap/graph.hpp"

namespace pcap {

struct EnumLimits {
  int dirichlet_max_omega = 18;  // subset enumeration cap, 2^n candidates
  int pair_max_host = 12;        // pair enumeration cap, 3^n assignments
};

struct IsocapOptions {
  EnumLimits limits;
  SolverOptions solver;
  /// Restrict candidate pairs to level sets of an approximate
  /// eigenfunction instead of enumerating everything. Only for hosts
  /// above the exhaustive cap; results are flagged non-exhaustive.
  bool heuristic = false;
};

struct IsocapResult {
  double value = 0.0;
  VertexSubset witness_a;
  std::optional<VertexSubset> witness_b;  // absent for the Dirichlet type
  double capacity_at_witness = 0.0;
  long long pairs_examined = 0;
  bool exhaustive = true;
};

/// inf over nonempty A inside omega of Cap_p(A, boundary) / m(A).
IsocapResult alpha_dirichlet(const Domain& d, Exponent p,
                             const IsocapOptions& opts = {});

/// inf over disjoint nonempty pairs A, B inside omega of
/// Cap_p(A,B) / (m(A) ^ m(B)).
IsocapResult alpha_neumann(const Domain& d, Exponent p,
                           const IsocapOptions& opts = {});

/// Same infimum over pairs drawn from the closure, normalized by the
/// interior parts m(A n omega) ^ m(B n omega).
IsocapResult alpha_neumann_bar(const Domain& d, Exponent p,
                               const IsocapOptions& opts = {});

/// Pairs drawn from the boundary, normalized by m(A) ^ m(B).
IsocapResult alpha_steklov(const Domain& d, Exponent p,
                           const IsocapOptions& opts = {});

/// Pairs drawn from the closure, normalized by the boundary parts.
IsocapResult alpha_steklov_bar(const Domain& d, Exponent p,
                               const IsocapOptions& opts = {});

/// Closed-graph constant: pairs from the whole vertex set of a connected
/// graph, normalized by m(A) ^ m(B).
IsocapResult alpha_closed(const WeightedGraph& g, Exponent p,
                          const IsocapOptions& opts = {});

/// Dirichlet constant along truncations of an infinite family.
std::vector<std::pair<int, double>> alpha_dirichlet_infinite(
    const std::string& family, Exponent p, const std::vector<int>& radii,
    const IsocapOptions& opts = {});

/// Closed-graph constant of the measure-rescaled domain for each k.
/// Capacities are shared across k (they do not depend on the measure),
/// so the pair scan runs once.
std::vector<std::pair<int, double>> alpha_rescaled_sequence(
    const Domain& d, Exponent p, const std::vector<int>& ks,
    const IsocapOptions& opts = {});

/// inf over nonempty W inside omega of cut-weight(W) / m(W).
double cheeger_dirichlet(const Domain& d, const EnumLimits& limits = {});

/// inf over nonempty proper W of cut-weight(W) / (m(W) ^ m(W^c)).
double cheeger_closed(const WeightedGraph& g, const EnumLimits& limits = {});

/// All four pair-type constants from a single enumeration over the
/// closure (used by the verification harness; equivalent to calling the
/// individual operations).
struct AlphaBundle {
  std::optional<IsocapResult> neumann;
  std::optional<IsocapResult> neumann_bar;
  std::optional<IsocapResult> steklov;
  std::optional<IsocapResult> steklov_bar;
};
AlphaBundle alpha_pair_bundle(const Domain& d, Exponent p,
                              const IsocapOptions& opts = {});

}  // namespace pcap
