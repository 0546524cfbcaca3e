#include "pcap/capacity.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "pcap/errors.hpp"

namespace pcap {

namespace {

using detail::energy_raw;
using detail::laplacian_raw;

struct Problem {
  const WeightedGraph* g;
  std::vector<char> pinned;       // per vertex
  std::vector<int> free_idx;      // optimized vertices
  std::vector<int> pos_of;        // vertex -> position in free_idx, or -1
};

/// Free vertices reachable from some pinned vertex; the rest are fixed at 0.
Problem setup_problem(const WeightedGraph& g, std::span<const int> pinned_idx,
                      std::vector<double>& x) {
  Problem pb;
  pb.g = &g;
  pb.pinned.assign(g.size(), 0);
  for (int i : pinned_idx) pb.pinned[i] = 1;

  std::vector<char> reached(g.size(), 0);
  std::deque<int> queue;
  for (int i : pinned_idx) {
    reached[i] = 1;
    queue.push_back(i);
  }
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (const auto& [u, w] : g.neighbors(v)) {
      (void)w;
      if (!reached[u]) {
        reached[u] = 1;
        queue.push_back(u);
      }
    }
  }
  pb.pos_of.assign(g.size(), -1);
  for (int i = 0; i < g.size(); ++i) {
    if (pb.pinned[i]) continue;
    if (!reached[i]) {
      x[i] = 0.0;  // disconnected from every constraint
      continue;
    }
    pb.pos_of[i] = static_cast<int>(pb.free_idx.size());
    pb.free_idx.push_back(i);
  }
  return pb;
}

double max_residual(const Problem& pb, const std::vector<double>& x, double p) {
  double r = 0.0;
  for (int i : pb.free_idx)
    r = std::max(r, std::abs(laplacian_raw(*pb.g, x, p, i)));
  return r;
}

/// Exact solve of the quadratic (p = 2) problem.
void solve_direct_p2(const Problem& pb, std::vector<double>& x) {
  const int nf = static_cast<int>(pb.free_idx.size());
  if (nf == 0) return;
  const WeightedGraph& g = *pb.g;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(nf, nf);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nf);
  for (int fi = 0; fi < nf; ++fi) {
    int i = pb.free_idx[fi];
    for (const auto& [j, w] : g.neighbors(i)) {
      A(fi, fi) += w;
      if (pb.pos_of[j] >= 0)
        A(fi, pb.pos_of[j]) -= w;
      else
        rhs(fi) += w * x[j];
    }
  }
  Eigen::VectorXd sol = A.ldlt().solve(rhs);
  for (int fi = 0; fi < nf; ++fi) x[pb.free_idx[fi]] = sol(fi);
}

struct NewtonOutcome {
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

/// Damped Newton with Armijo backtracking on the restricted energy.
NewtonOutcome newton_minimize(const Problem& pb, std::vector<double>& x,
                              double p, double energy_rel_tol,
                              double residual_tol, int max_iter) {
  const int nf = static_cast<int>(pb.free_idx.size());
  NewtonOutcome out;
  if (nf == 0) {
    out.converged = true;
    return out;
  }
  const WeightedGraph& g = *pb.g;
  Eigen::VectorXd grad(nf), dir(nf);
  Eigen::MatrixXd H(nf, nf);
  std::vector<double> trial(x.size());
  double energy = energy_raw(g, x, p);

  for (int it = 0; it < max_iter; ++it) {
    out.iterations = it;
    grad.setZero();
    H.setZero();
    for (int fi = 0; fi < nf; ++fi) {
      int i = pb.free_idx[fi];
      for (const auto& [j, w] : g.neighbors(i)) {
        double t = x[i] - x[j];
        grad(fi) += p * w * phi_p(t, p);
        double h = p * w * phi_p_prime(t, p);
        H(fi, fi) += h;
        if (pb.pos_of[j] >= 0) H(fi, pb.pos_of[j]) -= h;
      }
    }
    out.residual = max_residual(pb, x, p);
    double gnorm = grad.norm();
    if (out.residual < residual_tol && gnorm < 1e-14 * (1.0 + energy)) {
      out.converged = true;
      return out;
    }

    double ridge = 1e-14 * (1.0 + H.diagonal().maxCoeff());
    H.diagonal().array() += ridge;
    dir = H.ldlt().solve(-grad);
    double slope = grad.dot(dir);
    if (!dir.allFinite() || slope >= 0.0) {
      dir = -grad;
      slope = -gnorm * gnorm;
    }

    double step = 1.0;
    double new_energy = energy;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      trial = x;
      for (int fi = 0; fi < nf; ++fi) trial[pb.free_idx[fi]] += step * dir(fi);
      new_energy = energy_raw(g, trial, p);
      if (new_energy <= energy + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      out.converged = out.residual < residual_tol;
      return out;
    }
    x = trial;
    double decrease = (energy - new_energy) / (1.0 + std::abs(energy));
    energy = new_energy;
    out.residual = max_residual(pb, x, p);
    if (decrease < energy_rel_tol && out.residual < residual_tol) {
      out.converged = true;
      out.iterations = it + 1;
      return out;
    }
  }
  out.residual = max_residual(pb, x, p);
  out.converged = out.residual < residual_tol;
  return out;
}

}  // namespace

PinnedSolve minimize_energy(const WeightedGraph& g,
                            std::span<const int> pinned_idx,
                            std::span<const double> pinned_val, double p,
                            const SolverOptions& opts) {
  if (pinned_idx.size() != pinned_val.size())
    throw std::invalid_argument("minimize_energy: index/value size mismatch");
  if (pinned_idx.empty())
    throw std::invalid_argument("minimize_energy: nothing pinned");

  PinnedSolve out;
  out.values.assign(g.size(), 0.0);
  double pin_lo = pinned_val[0], pin_hi = pinned_val[0];
  for (std::size_t k = 0; k < pinned_idx.size(); ++k) {
    out.values[pinned_idx[k]] = pinned_val[k];
    pin_lo = std::min(pin_lo, pinned_val[k]);
    pin_hi = std::max(pin_hi, pinned_val[k]);
  }
  Problem pb = setup_problem(g, pinned_idx, out.values);

  if (p == 2.0 && !opts.force_iterative) {
    solve_direct_p2(pb, out.values);
    out.residual = max_residual(pb, out.values, p);
    out.used_direct = true;
    return out;
  }

  // Feasible interior start: the quadratic solution (or the pinned mean
  // when the quadratic shortcut is disabled for cross-checking).
  if (opts.force_iterative) {
    double mid = 0.5 * (pin_lo + pin_hi);
    for (int i : pb.free_idx) out.values[i] = mid;
  } else {
    solve_direct_p2(pb, out.values);
  }

  int budget = opts.max_iterations;
  NewtonOutcome nw = newton_minimize(pb, out.values, p, opts.energy_rel_tol,
                                     opts.residual_tol, budget / 2);
  out.iterations = nw.iterations;

  if (!nw.converged) {
    // Direct descent stalled: continuation from the quadratic exponent.
    std::vector<double> cont = out.values;
    for (int i = 0; i < static_cast<int>(cont.size()); ++i)
      if (!pb.pinned[i] && pb.pos_of[i] >= 0) cont[i] = 0.0;
    std::vector<double> xs(out.values.size(), 0.0);
    for (std::size_t k = 0; k < pinned_idx.size(); ++k)
      xs[pinned_idx[k]] = pinned_val[k];
    solve_direct_p2(pb, xs);
    const int steps = 4;
    for (int s = 1; s <= steps; ++s) {
      double ps = 2.0 * std::pow(p / 2.0, static_cast<double>(s) / steps);
      double rtol = (s == steps) ? opts.residual_tol : 1e-6;
      NewtonOutcome stage = newton_minimize(pb, xs, ps, opts.energy_rel_tol,
                                            rtol, budget / 2 / steps);
      out.iterations += stage.iterations;
      nw = stage;
    }
    if (nw.converged) out.values = xs;
    if (!nw.converged) {
      double best = energy_raw(g, xs, p);
      throw ConvergenceError("energy minimization did not converge", best,
                             nw.residual, out.iterations);
    }
  }
  out.residual = max_residual(pb, out.values, p);
  return out;
}

bool CapacityResult::is_infinite() const { return std::isinf(value); }

namespace detail {

RawCapacity capacity_raw(const WeightedGraph& g, std::span<const int> a_idx,
                         std::span<const int> b_idx, double p,
                         const SolverOptions& opts) {
  std::vector<int> pinned;
  std::vector<double> vals;
  pinned.reserve(a_idx.size() + b_idx.size());
  vals.reserve(pinned.capacity());
  for (int i : a_idx) {
    pinned.push_back(i);
    vals.push_back(1.0);
  }
  for (int i : b_idx) {
    pinned.push_back(i);
    vals.push_back(0.0);
  }
  PinnedSolve ps = minimize_energy(g, pinned, vals, p, opts);
  RawCapacity out;
  out.values = std::move(ps.values);
  out.iterations = ps.iterations;
  out.residual = ps.residual;
  out.value = energy_raw(g, out.values, p);
  return out;
}

}  // namespace detail

namespace {

std::vector<int> indices_of(const WeightedGraph& g, const VertexSubset& s) {
  std::vector<int> idx;
  idx.reserve(s.size());
  for (const auto& id : s.members) idx.push_back(g.index_of(id));
  return idx;
}

bool intersects(const VertexSubset& a, const VertexSubset& b) {
  for (const auto& id : a.members)
    if (b.contains(id)) return true;
  return false;
}

}  // namespace

CapacityResult capacity(const Domain& d, const VertexSubset& a,
                        const VertexSubset& b, Exponent p,
                        const SolverOptions& opts) {
  CapacityResult out;
  out.ill_conditioned = p.value() < 1.1 || p.value() > 8.0;
  if (a.empty() || b.empty()) {
    out.value = 0.0;
    return out;
  }
  if (intersects(a, b)) {
    out.value = std::numeric_limits<double>::infinity();
    return out;
  }
  const WeightedGraph& g = d.boundary_graph();
  auto raw = detail::capacity_raw(g, indices_of(g, a), indices_of(g, b),
                                  p.value(), opts);

  // Equilibrium potentials obey the maximum principle; anything clearly
  // outside [0,1] means the solve went wrong.
  for (double& v : raw.values) {
    if (v < -1e-7 || v > 1.0 + 1e-7)
      throw ConvergenceError("equilibrium potential escaped [0,1]", raw.value,
                             raw.residual, raw.iterations);
    v = std::clamp(v, 0.0, 1.0);
  }
  out.value = raw.value;
  out.iterations = raw.iterations;
  out.residual = raw.residual;
  if (out.value != 0.0) out.potential = make_potential(d, std::move(raw.values));
  return out;
}

CapacityResult capacity_to_boundary(const Domain& d, const VertexSubset& a,
                                    Exponent p, const SolverOptions& opts) {
  for (const auto& id : a.members)
    if (!d.omega().contains(id))
      throw std::invalid_argument("capacity_to_boundary: '" + id +
                                  "' is not interior");
  return capacity(d, a, d.boundary(), p, opts);
}

CapacitySequence capacity_infinite(const std::string& family,
                                   const std::vector<VertexId>& a, Exponent p,
                                   const std::vector<int>& radii,
                                   const SolverOptions& opts) {
  if (radii.empty()) return {};
  int rmin = *std::min_element(radii.begin(), radii.end());
  Domain smallest = truncation_domain(family, rmin);
  CapacitySequence seq;
  for (int r : radii) {
    Domain d = truncation_domain(family, r);
    VertexSubset aset = make_subset(d.boundary_graph(), a);
    for (const auto& id : aset.members)
      if (!smallest.omega().contains(id))
        throw std::invalid_argument(
            "capacity_infinite: set not contained in the smallest truncation");
    CapacityResult c = capacity_to_boundary(d, aset, p, opts);
    seq.entries.push_back({r, c.value});
  }
  auto n = seq.entries.size();
  if (n >= 2)
    seq.last_gap =
        std::abs(seq.entries[n - 1].value - seq.entries[n - 2].value);
  return seq;
}

}  // namespace pcap
