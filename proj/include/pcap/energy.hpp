#pragma once

#include <functional>
#include <span>
#include <vector>

#include "pcap/graph.hpp"

namespace pcap {

/// Exponent p of the nonlinear operators, restricted to 1 < p < infinity.
class Exponent {
 public:
  explicit Exponent(double p);
  double value() const { return p_; }

 private:
  double p_;
};

/// Real-valued function on the closure of a domain, indexed like the
/// domain's boundary graph.
struct Potential {
  Domain host;
  std::vector<double> values;

  double value(int closure_index) const { return values[closure_index]; }
  double at(const VertexId& id) const {
    return values[host.boundary_graph().index_of(id)];
  }
};

Potential make_potential(const Domain& d, std::vector<double> values);
Potential make_potential(const Domain& d,
                         const std::function<double(const VertexId&)>& f);

/// phi_p(t) = |t|^{p-2} t, evaluated as sign(t)|t|^{p-1} with value 0 at 0.
double phi_p(double t, double p);
/// Derivative (p-1)|t|^{p-2}, clamped near t = 0 so Hessians stay finite.
double phi_p_prime(double t, double p, double floor = 1e-12);

/// Sum of w |f(y)-f(x)|^p over the edges of the boundary graph, each
/// unordered edge counted once.
double p_energy(const Domain& d, const Potential& f, Exponent p);

/// Mixed form: w |f(y)-f(x)|^{p-2} (f(y)-f(x)) (g(y)-g(x)) summed over the
/// same edges; the nonlinear weight comes from f.
double p_energy_mixed(const Domain& d, const Potential& f, const Potential& g,
                      Exponent p);

/// Nonlinear Laplacian at x in the interior.
double p_laplacian(const Domain& d, const Potential& f, Exponent p,
                   const VertexId& x);

/// Outward normal derivative at z in the boundary; equals the negated
/// boundary-graph Laplacian at z.
double normal_derivative(const Domain& d, const Potential& f, Exponent p,
                         const VertexId& z);

/// |<-Lap_p f, g>_interior + <normal term, g>_boundary - E_p(f,g)|.
double green_residual(const Domain& d, const Potential& f, const Potential& g,
                      Exponent p);

double lp_norm(const Potential& f, Exponent p, const VertexSubset& over);
double linf_norm(const Potential& f, const VertexSubset& over);

/// Unique minimizer of c -> sum m(x) |f(x)-c|^p over the given vertices,
/// found by safeguarded Newton/bisection on the derivative to 1e-12 on c.
double p_mean(const Potential& f, Exponent p, const VertexSubset& over);

namespace detail {

// Raw-vector versions used by the solvers; x is indexed like g.
double energy_raw(const WeightedGraph& g, std::span<const double> x, double p);
double energy_mixed_raw(const WeightedGraph& g, std::span<const double> f,
                        std::span<const double> gvals, double p);
/// m-normalized p-Laplacian of the graph at vertex i.
double laplacian_raw(const WeightedGraph& g, std::span<const double> x,
                     double p, int i);
double pmean_raw(std::span<const double> values, std::span<const double> masses,
                 double p);
double lp_norm_raw(std::span<const double> values, std::span<const double> masses,
                   double p);

}  // namespace detail

}  // namespace pcap
