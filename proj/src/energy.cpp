#include "pcap/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pcap {

Exponent::Exponent(double p) : p_(p) {
  if (!(p > 1.0) || !std::isfinite(p))
    throw std::invalid_argument("exponent must satisfy 1 < p < infinity");
}

Potential make_potential(const Domain& d, std::vector<double> values) {
  if (static_cast<int>(values.size()) != d.closure_size())
    throw std::invalid_argument("potential must cover the whole closure");
  return Potential{d, std::move(values)};
}

Potential make_potential(const Domain& d,
                         const std::function<double(const VertexId&)>& f) {
  std::vector<double> v(d.closure_size());
  for (int i = 0; i < d.closure_size(); ++i)
    v[i] = f(d.boundary_graph().id(i));
  return Potential{d, std::move(v)};
}

double phi_p(double t, double p) {
  if (t == 0.0) return 0.0;
  double a = std::pow(std::abs(t), p - 1.0);
  return t > 0.0 ? a : -a;
}

double phi_p_prime(double t, double p, double floor) {
  double a = std::max(std::abs(t), floor);
  return (p - 1.0) * std::pow(a, p - 2.0);
}

namespace detail {

double energy_raw(const WeightedGraph& g, std::span<const double> x, double p) {
  double e = 0.0;
  for (const Edge& ed : g.edges())
    e += ed.w * std::pow(std::abs(x[ed.v] - x[ed.u]), p);
  return e;
}

double energy_mixed_raw(const WeightedGraph& g, std::span<const double> f,
                        std::span<const double> gvals, double p) {
  double e = 0.0;
  for (const Edge& ed : g.edges())
    e += ed.w * phi_p(f[ed.v] - f[ed.u], p) * (gvals[ed.v] - gvals[ed.u]);
  return e;
}

double laplacian_raw(const WeightedGraph& g, std::span<const double> x,
                     double p, int i) {
  double s = 0.0;
  for (const auto& [j, w] : g.neighbors(i)) s += w * phi_p(x[j] - x[i], p);
  return s / g.measure(i);
}

double pmean_raw(std::span<const double> values, std::span<const double> masses,
                 double p) {
  double lo = values[0], hi = values[0];
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (lo == hi) return lo;

  auto deriv = [&](double c) {
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i)
      s += masses[i] * phi_p(c - values[i], p);
    return s;
  };

  // Safeguarded Newton on the increasing derivative, bisection fallback.
  double c = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    double d = deriv(c);
    if (d > 0.0)
      hi = c;
    else
      lo = c;
    if (hi - lo <= 1e-12) break;
    double d2 = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i)
      d2 += masses[i] * phi_p_prime(c - values[i], p);
    double next = (d2 > 0.0) ? c - d / d2 : c;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    c = next;
  }
  return 0.5 * (lo + hi);
}

double lp_norm_raw(std::span<const double> values, std::span<const double> masses,
                   double p) {
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i)
    s += masses[i] * std::pow(std::abs(values[i]), p);
  return std::pow(s, 1.0 / p);
}

}  // namespace detail

namespace {

void check_host(const Domain& d, const Potential& f, const char* who) {
  if (static_cast<int>(f.values.size()) != d.closure_size())
    throw std::invalid_argument(std::string(who) +
                                ": potential does not match the domain");
}

}  // namespace

double p_energy(const Domain& d, const Potential& f, Exponent p) {
  check_host(d, f, "p_energy");
  return detail::energy_raw(d.boundary_graph(), f.values, p.value());
}

double p_energy_mixed(const Domain& d, const Potential& f, const Potential& g,
                      Exponent p) {
  check_host(d, f, "p_energy_mixed");
  check_host(d, g, "p_energy_mixed");
  return detail::energy_mixed_raw(d.boundary_graph(), f.values, g.values,
                                  p.value());
}

double p_laplacian(const Domain& d, const Potential& f, Exponent p,
                   const VertexId& x) {
  check_host(d, f, "p_laplacian");
  int i = d.boundary_graph().index_of(x);
  if (!d.is_interior(i))
    throw std::invalid_argument("p_laplacian: vertex '" + x +
                                "' is not interior");
  return detail::laplacian_raw(d.boundary_graph(), f.values, p.value(), i);
}

double normal_derivative(const Domain& d, const Potential& f, Exponent p,
                         const VertexId& z) {
  check_host(d, f, "normal_derivative");
  int i = d.boundary_graph().index_of(z);
  if (d.is_interior(i))
    throw std::invalid_argument("normal_derivative: vertex '" + z +
                                "' is not on the boundary");
  // Boundary-graph neighbors of z are exactly its interior neighbors.
  return -detail::laplacian_raw(d.boundary_graph(), f.values, p.value(), i);
}

double green_residual(const Domain& d, const Potential& f, const Potential& g,
                      Exponent p) {
  check_host(d, f, "green_residual");
  check_host(d, g, "green_residual");
  const WeightedGraph& go = d.boundary_graph();
  double lhs = 0.0;
  for (int i : d.interior_indices())
    lhs -= detail::laplacian_raw(go, f.values, p.value(), i) * g.values[i] *
           go.measure(i);
  for (int i : d.boundary_indices())
    lhs += -detail::laplacian_raw(go, f.values, p.value(), i) * g.values[i] *
           go.measure(i);
  double rhs = detail::energy_mixed_raw(go, f.values, g.values, p.value());
  return std::abs(lhs - rhs);
}

double lp_norm(const Potential& f, Exponent p, const VertexSubset& over) {
  const WeightedGraph& g = f.host.boundary_graph();
  double s = 0.0;
  for (const auto& id : over.members) {
    int i = g.index_of(id);
    s += g.measure(i) * std::pow(std::abs(f.values[i]), p.value());
  }
  return std::pow(s, 1.0 / p.value());
}

double linf_norm(const Potential& f, const VertexSubset& over) {
  const WeightedGraph& g = f.host.boundary_graph();
  double s = 0.0;
  for (const auto& id : over.members)
    s = std::max(s, std::abs(f.values[g.index_of(id)]));
  return s;
}

double p_mean(const Potential& f, Exponent p, const VertexSubset& over) {
  if (over.empty()) throw std::invalid_argument("p_mean: empty vertex set");
  const WeightedGraph& g = f.host.boundary_graph();
  std::vector<double> vals, masses;
  vals.reserve(over.size());
  masses.reserve(over.size());
  for (const auto& id : over.members) {
    int i = g.index_of(id);
    vals.push_back(f.values[i]);
    masses.push_back(g.measure(i));
  }
  return detail::pmean_raw(vals, masses, p.value());
}

}  // namespace pcap
