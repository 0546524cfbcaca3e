#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pcap/energy.hpp"
#include "pcap/graph.hpp"

namespace pcap {

struct SolverOptions {
  double energy_rel_tol = 1e-12;
  double residual_tol = 1e-8;
  int max_iterations = 10000;
  /// Run the damped-Newton path even at p = 2 (used by the oracle
  /// cross-checks); the direct linear solve is skipped entirely.
  bool force_iterative = false;
};

/// Outcome of a constrained energy minimization on a graph.
struct PinnedSolve {
  std::vector<double> values;  // full vector, pinned entries as given
  int iterations = 0;
  double residual = 0.0;       // max |m-normalized p-Laplacian| over free vertices
  bool used_direct = false;
};

/// Minimizes the p-energy of x over the non-pinned vertices of g, holding
/// x fixed at the given values on `pinned_idx`. Free vertices that cannot
/// be reached from a pinned vertex are set to 0 and excluded. Throws
/// ConvergenceError if the iteration cap is exhausted.
PinnedSolve minimize_energy(const WeightedGraph& g,
                            std::span<const int> pinned_idx,
                            std::span<const double> pinned_val, double p,
                            const SolverOptions& opts = {});

struct CapacityResult {
  double value = 0.0;  // +infinity sentinel when the constraint set is empty
  std::optional<Potential> potential;
  int iterations = 0;
  double residual = 0.0;
  bool ill_conditioned = false;  // p < 1.1 or p > 8

  bool is_infinite() const;
};

/// Cap_p of the pair (a, b) inside the domain: least p-energy over
/// potentials equal to 1 on a and 0 on b. Empty a or b gives 0;
/// overlapping a and b give the infinite sentinel.
CapacityResult capacity(const Domain& d, const VertexSubset& a,
                        const VertexSubset& b, Exponent p,
                        const SolverOptions& opts = {});

/// Cap_p(a, boundary) -- the quantity entering the Dirichlet-type
/// isocapacitary constant.
CapacityResult capacity_to_boundary(const Domain& d, const VertexSubset& a,
                                    Exponent p, const SolverOptions& opts = {});

struct CapacitySequence {
  struct Entry {
    int radius;
    double value;
  };
  std::vector<Entry> entries;
  double last_gap = 0.0;  // |v_last - v_prev|, convergence estimate
};

/// Capacity of a finite set along truncations of an infinite family: at
/// radius r the potential is grounded on the sphere of radius r. The
/// values are non-increasing in r.
CapacitySequence capacity_infinite(const std::string& family,
                                   const std::vector<VertexId>& a, Exponent p,
                                   const std::vector<int>& radii,
                                   const SolverOptions& opts = {});

namespace detail {

struct RawCapacity {
  double value = 0.0;
  std::vector<double> values;
  int iterations = 0;
  double residual = 0.0;
};

/// Capacity between two index sets of a bare graph (no conventions:
/// callers must pass disjoint nonempty sets).
RawCapacity capacity_raw(const WeightedGraph& g, std::span<const int> a_idx,
                         std::span<const int> b_idx, double p,
                         const SolverOptions& opts);

}  // namespace detail

}  // namespace pcap
