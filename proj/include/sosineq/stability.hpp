// Exponential L2 stability certification for linear one-dimensional PDEs
// u_t = sum_k A_k(x) d^k u / dx^k on [0,1]: builds the weight-positivity and
// energy-decay integral inequalities over a polynomial weight P(x), reduces
// them to one SOS feasibility program, and converts a solution into a
// checked certificate plus explicit decay constants. Also drives bisection
// line searches over a scalar problem parameter.
#pragma once

#include <functional>
#include <vector>

#include "sosineq/certificate.hpp"
#include "sosineq/certify.hpp"
#include "sosineq/program.hpp"
#include "sosineq/sdp.hpp"

namespace sosineq {

// Dynamics u_t = sum_k A[k](x) d^k u / dx^k with homogeneous boundary atoms;
// A[k] is the n x n coefficient of the k-th spatial derivative. Spatial
// order up to 2 is supported.
struct StabilityInput {
  int n = 1;
  std::vector<PolyMat> A;
  std::vector<BoundaryAtom> atoms;
};

struct StabilityOptions {
  int deg_p = 2;
  int deg_h = -1;          // default: degree of the decay integrand + 2
  int deg_N = -1;          // default: deg_h + 2 (decay constraint only)
  double rate = 0.0;       // targeted decay rate of the weighted energy
  double eps_floor = -1.0; // default: 1e-6 * max(1, largest |coeff| in A)
  bool p_identity = false; // pin P = I (no weight decision variables)
  SolverConfig solver;
};

// The assembled decision program, exposed for tests and for certificate
// construction.
struct StabilityProgram {
  SosProgram prog;
  MultiplierTemplate tmpl;
  JetSpec jet;                                       // order-theta jet
  int deg_p = 0, deg_h = 0, deg_N = 0;               // resolved values
  double eps_floor = 0.0;
  std::vector<std::vector<std::vector<int>>> p_vars; // [a][b][t], a <= b
  int eps1 = -1, eps2 = -1;
  bool p_identity = false;
};

StabilityProgram build_stability_program(const StabilityInput& in, const StabilityOptions& opt);

// Eigenvalue range of a symmetric polynomial matrix over [0,1]: extrema over
// 257 Chebyshev sample points widened by a first-order margin L*delta, with
// L a sampled bound on the spectral norm of dP/dx and delta the mesh width.
struct NormBounds {
  double lam_min = 0.0;
  double lam_max = 0.0;
  double margin = 0.0;
};

NormBounds norm_bounds(const PolyMat& P);

// Constants of the bound |u(t)|^2 <= (c2/c1) |u(t0)|^2 exp(-(c3/c2)(t-t0))
// obtained from c1 = lam_min/2, c2 = lam_max/2, c3 = eps2 for the energy
// V = 1/2 integral of u'P u.
struct ExponentialBound {
  double c1 = 0.0, c2 = 0.0, c3 = 0.0;
  double rate = 0.0;       // c3/c2, decay gained beyond the targeted rate
  double prefactor = 0.0;  // c2/c1
};

ExponentialBound exponential_bound(double lam_min, double lam_max, double eps2);

struct StabilityReport {
  bool certified = false;
  SolveStatus status = SolveStatus::NumericalTrouble;
  double eps1 = 0.0, eps2 = 0.0;
  PolyMat P;
  std::vector<Poly> h;
  NormBounds norms;
  bool norm_ok = false;
  ExponentialBound bound;
  double total_rate = 0.0;  // targeted rate + c3/c2, for the squared norm
  Certificate cert;
  CheckReport check;
};

// Solve and independently re-check. certified requires: solver returned a
// usable point, the certificate passes the checker, eps2 > 0, and the
// sampled weight eigenvalue lower bound stays positive after its margin.
StabilityReport certify_stability(const StabilityInput& in, const StabilityOptions& opt);

struct SweepProbe {
  double param = 0.0;
  bool feasible = false;
  double total_rate = 0.0;
};

struct SweepResult {
  bool found = false;
  bool none_below_lo = false;  // the first probe already failed
  double best = 0.0;           // largest certified parameter value
  std::vector<SweepProbe> probes;
};

using ProbeCallback = std::function<void(double, const StabilityReport&)>;

// Largest certified parameter on a bisection grid of width <= tol, assuming
// feasibility at lo and scanning toward hi. If building the problem at lo
// throws a domain error (e.g. a reciprocal coefficient at lo = 0) the search
// starts at lo + tol instead.
SweepResult bisect_param(const std::function<StabilityInput(double)>& make,
                         const StabilityOptions& opt, double lo, double hi, double tol,
                         const ProbeCallback& on_probe = {});

}  // namespace sosineq
