#pragma once

#include <functional>
#include <limits>
#include <string>
#include <variant>

#include "mgk/rng.hpp"

namespace mgk {

struct Uniform {
    double a, b;
};
struct Exponential {
    double rate;
};
struct Hyperexp2 {
    double p1, rate1, rate2;
};
struct Pareto {
    double xm, alpha;
};
struct BoundedPareto {
    double lower, upper, alpha;
};
struct Deterministic {
    double c;
};

// Bundle returned by moments(): everything the load, busy-period and bound
// formulas consume at a single size cutoff x.
struct Moments {
    double pdf;           // f_S(x)
    double cdf;           // F_S(x)
    double mean;          // E[S]
    double partial_mean;  // E[S 1(S <= x)]
    double partial_m2;    // E[S^2 1(S <= x)]
    double trunc_mean;    // E[min(S, x)]
};

// Parametric service requirement distribution. Immutable after construction
// and safe to share across threads.
class ServiceDist {
   public:
    using Variant =
        std::variant<Uniform, Exponential, Hyperexp2, Pareto, BoundedPareto, Deterministic>;

    // Validates parameters; throws std::invalid_argument on violation.
    // Pareto tails with alpha <= 2 fall outside the heavy-traffic hypotheses
    // and are rejected unless allow_heavy_tail is set.
    explicit ServiceDist(Variant v, bool allow_heavy_tail = false);

    double pdf(double x) const;
    double cdf(double x) const;
    double mean() const;
    double second_moment() const;      // E[S^2]
    double partial_mean(double x) const;   // E[S 1(S <= x)]
    double partial_m2(double x) const;     // E[S^2 1(S <= x)]
    double trunc_mean(double x) const;     // E[min(S, x)]
    double trunc_m2(double x) const;       // E[min(S, x)^2]
    Moments moments(double x) const;

    double sample(RngStream& stream) const;

    // Support bounds; upper is +inf for unbounded distributions.
    double support_lower() const;
    double support_upper() const;

    // E[g(S)] by adaptive quadrature against the density (exact for the
    // Deterministic atom). Returns the value; sets *converged if given.
    double expect(const std::function<double(double)>& g,
                  bool* converged = nullptr) const;

    const Variant& variant() const { return v_; }
    std::string kind() const;

   private:
    Variant v_;
};

// Two-phase balanced-means hyperexponential with given mean and squared
// coefficient of variation. Requires scv > 1.
ServiceDist hyperexp_from_mean_scv(double mean, double scv);

}  // namespace mgk
