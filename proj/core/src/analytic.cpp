#include "mgk/analytic.hpp"

#include <cmath>
#include <stdexcept>

#include "mgk/quadrature.hpp"

namespace mgk {

LoadContext::LoadContext(double lambda_, ServiceDist dist_, int k_)
    : lambda(lambda_), dist(std::move(dist_)), k(k_) {
    if (k < 1) throw std::invalid_argument("LoadContext: k must be >= 1");
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("LoadContext: lambda must be finite and nonnegative");
    if (!(rho() < 1.0))
        throw std::invalid_argument("LoadContext: unstable, rho = lambda E[S] must be < 1");
}

double rho_le(const LoadContext& ctx, double x) {
    return ctx.lambda * ctx.dist.partial_mean(x);
}

double rho_bar(const LoadContext& ctx, double x) {
    return ctx.lambda * ctx.dist.trunc_mean(x);
}

double busy_mean(double work, double rho_rel) {
    if (!(work >= 0.0)) throw std::invalid_argument("busy_mean: work must be >= 0");
    if (!(rho_rel >= 0.0 && rho_rel < 1.0))
        throw std::invalid_argument("busy_mean: relevant load must be in [0, 1)");
    return work / (1.0 - rho_rel);
}

double psjf1_wait_mean(const LoadContext& ctx, double x) {
    double r = rho_le(ctx, x);
    double denom = 1.0 - r;
    return ctx.lambda * ctx.dist.partial_m2(x) / (2.0 * denom * denom);
}

namespace {

// integral_0^x dt / (1 - rho_{<=t}); smooth, so plain adaptive Simpson.
double inverse_slack_integral(const LoadContext& ctx, double x) {
    if (x == 0.0) return 0.0;
    auto f = [&ctx](double t) { return 1.0 / (1.0 - rho_le(ctx, t)); };
    return integrate(f, 0.0, x).value;
}

}  // namespace

Srpt1Response srpt1_response_mean(const LoadContext& ctx, double x) {
    double r = rho_le(ctx, x);
    double denom = 1.0 - r;
    double tail = 1.0 - ctx.dist.cdf(x);
    double wait = ctx.lambda * (ctx.dist.partial_m2(x) + x * x * tail) /
                  (2.0 * denom * denom);
    double residence = inverse_slack_integral(ctx, x);
    return {wait, residence};
}

Fb1Response fb1_response_mean(const LoadContext& ctx, double x) {
    double rb = rho_bar(ctx, x);
    if (!(rb < 1.0)) throw std::invalid_argument("fb1_response_mean: rho_bar >= 1");
    double denom = 1.0 - rb;
    double wait = ctx.lambda * ctx.dist.trunc_m2(x) / (2.0 * denom * denom);
    return {wait, x / denom};
}

double bound_H(const LoadContext& ctx, double x) {
    double wait = srpt1_response_mean(ctx, x).wait;
    return wait + busy_mean(2.0 * ctx.k * x, rho_le(ctx, x));
}

double bound_I(const LoadContext& ctx, double x) {
    double r = rho_le(ctx, x);
    return psjf1_wait_mean(ctx, x) + ctx.k * r * x / (1.0 - r) +
           ctx.k * inverse_slack_integral(ctx, x);
}

std::string policy_name(Policy p) {
    switch (p) {
        case Policy::SRPT: return "srpt";
        case Policy::PSJF: return "psjf";
        case Policy::RS: return "rs";
        case Policy::FB: return "fb";
        case Policy::FCFS: return "fcfs";
    }
    return "?";
}

PolicyBound policy_bound(const LoadContext& ctx, double x, Policy policy) {
    double inc = (2.0 * ctx.k - 1.0) * x;
    switch (policy) {
        case Policy::PSJF:
            return {psjf1_wait_mean(ctx, x) + busy_mean(inc, rho_le(ctx, x)), false};
        case Policy::FB:
            return {fb1_response_mean(ctx, x).wait_part + busy_mean(inc, rho_bar(ctx, x)),
                    false};
        case Policy::RS:
            // No closed-form RS-1 waiting time; the caller adds a simulated one.
            return {busy_mean(inc, rho_le(ctx, x)), true};
        default:
            throw std::invalid_argument("policy_bound: only PSJF, RS, FB have bounds");
    }
}

double mean_over_sizes(const LoadContext& ctx,
                       const std::function<double(double)>& per_x_fn) {
    bool converged = true;
    double v = ctx.dist.expect(per_x_fn, &converged);
    if (!converged)
        throw std::runtime_error("mean_over_sizes: quadrature failed to converge");
    return v;
}

BoundReport bound_report(const LoadContext& ctx, double x) {
    BoundReport rep;
    rep.x = x;
    rep.rho_le_x = rho_le(ctx, x);
    rep.H = bound_H(ctx, x);
    rep.I = bound_I(ctx, x);
    rep.policy_bounds[Policy::PSJF] = policy_bound(ctx, x, Policy::PSJF).value;
    rep.policy_bounds[Policy::FB] = policy_bound(ctx, x, Policy::FB).value;
    rep.policy_bounds[Policy::RS] = policy_bound(ctx, x, Policy::RS).value;
    return rep;
}

}  // namespace mgk
