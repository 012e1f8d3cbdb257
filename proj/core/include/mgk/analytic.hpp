#pragma once

#include <map>
#include <string>
#include <vector>

#include "mgk/dist.hpp"

namespace mgk {

// Arrival rate, service distribution and server count for one system.
// Stability (rho < 1) is enforced at construction.
struct LoadContext {
    double lambda;
    ServiceDist dist;
    int k;

    LoadContext(double lambda, ServiceDist dist, int k);
    double rho() const { return lambda * dist.mean(); }
};

// rho_{<=x} = lambda E[S 1(S <= x)], the load due to jobs of size at most x.
double rho_le(const LoadContext& ctx, double x);

// rho_{x-bar} = lambda E[min(S, x)], the load with service truncated at age x.
double rho_bar(const LoadContext& ctx, double x);

// E[B(V)] = E[V] / (1 - rho_rel) for a relevant busy period started by work
// with mean `work`. Rejects rho_rel >= 1.
double busy_mean(double work, double rho_rel);

// Mean waiting time of a size-x job under single-server PSJF:
//   lambda * E[S^2 1(S <= x)] / (2 (1 - rho_{<=x})^2).
double psjf1_wait_mean(const LoadContext& ctx, double x);

struct Srpt1Response {
    double wait;
    double residence;
    double total() const { return wait + residence; }
};

// Exact M/G/1 SRPT mean response of a size-x job (Schrage-Miller):
//   wait = lambda (E[S^2 1(S<=x)] + x^2 (1 - F(x))) / (2 (1 - rho_{<=x})^2)
//   residence = integral_0^x dt / (1 - rho_{<=t}).
Srpt1Response srpt1_response_mean(const LoadContext& ctx, double x);

struct Fb1Response {
    double wait_part;       // E[B_xbar(RelWork)]
    double residence_part;  // x / (1 - rho_xbar)
    double total() const { return wait_part + residence_part; }
};

// Classical M/G/1 FB mean response of a size-x job, split as
//   wait_part = lambda E[min(S,x)^2] / (2 (1 - rho_xbar)^2)
//   residence_part = x / (1 - rho_xbar).
Fb1Response fb1_response_mean(const LoadContext& ctx, double x);

// H(x): SRPT-1 wait plus a relevant busy period started by 2kx.
double bound_H(const LoadContext& ctx, double x);

// I(x): PSJF-1 wait + k rho_{<=x} x / (1 - rho_{<=x}) + k integral_0^x
// dt/(1 - rho_{<=t}). Always <= bound_H.
double bound_I(const LoadContext& ctx, double x);

enum class Policy { SRPT, PSJF, RS, FB, FCFS };

std::string policy_name(Policy p);

// Per-size mean response bounds for the k-server variants.
// PSJF: psjf1_wait + (2k-1)x / (1 - rho_{<=x}).
// FB:   fb1 wait_part + (2k-1)x / (1 - rho_xbar), the mean of
//       B_xbar(RelWork + (2k-1)x).
// RS:   partial -- only the busy-period increment (2k-1)x / (1 - rho_{<=x});
//       the simulated RS-1 waiting term must be added by the caller.
struct PolicyBound {
    double value;
    bool partial;  // true for RS: missing the RS-1 waiting term
};
PolicyBound policy_bound(const LoadContext& ctx, double x, Policy policy);

// E[g(S)] with divergence detection; throws std::runtime_error if the
// quadrature fails to converge.
double mean_over_sizes(const LoadContext& ctx,
                       const std::function<double(double)>& per_x_fn);

struct BoundReport {
    double x;
    double rho_le_x;
    double H;
    double I;
    std::map<Policy, double> policy_bounds;  // PSJF and FB full, RS increment only
};

BoundReport bound_report(const LoadContext& ctx, double x);

}  // namespace mgk
