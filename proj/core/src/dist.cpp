#include "mgk/dist.hpp"

#include <cmath>
#include <stdexcept>

#include "mgk/quadrature.hpp"

namespace mgk {

namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

void check_cutoff(double x) {
    if (!std::isfinite(x) || x < 0.0)
        throw std::invalid_argument("size cutoff must be finite and nonnegative");
}

// Bounded Pareto helper: integral of t^m * C t^(-alpha-1) over [lo, hi].
double bpareto_moment(double C, double alpha, double m, double lo, double hi) {
    double p = m - alpha;
    if (std::abs(p) < 1e-12) return C * std::log(hi / lo);
    return C / p * (std::pow(hi, p) - std::pow(lo, p));
}

}  // namespace

ServiceDist::ServiceDist(Variant v, bool allow_heavy_tail) : v_(std::move(v)) {
    std::visit(
        [&](const auto& d) {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Uniform>) {
                require(d.a >= 0.0 && d.a < d.b, "Uniform: need 0 <= a < b");
            } else if constexpr (std::is_same_v<T, Exponential>) {
                require(d.rate > 0.0, "Exponential: rate must be positive");
            } else if constexpr (std::is_same_v<T, Hyperexp2>) {
                require(d.p1 >= 0.0 && d.p1 <= 1.0, "Hyperexp2: need 0 <= p1 <= 1");
                require(d.rate1 > 0.0 && d.rate2 > 0.0, "Hyperexp2: rates must be positive");
            } else if constexpr (std::is_same_v<T, Pareto>) {
                require(d.xm > 0.0, "Pareto: xm must be positive");
                require(d.alpha > 0.0, "Pareto: alpha must be positive");
                if (!allow_heavy_tail)
                    require(d.alpha > 2.0, "Pareto: alpha <= 2 is outside the heavy-traffic "
                                           "hypotheses (pass allow_heavy_tail to override)");
            } else if constexpr (std::is_same_v<T, BoundedPareto>) {
                require(d.lower > 0.0 && d.lower < d.upper, "BoundedPareto: need 0 < L < U");
                require(d.alpha > 0.0, "BoundedPareto: alpha must be positive");
            } else if constexpr (std::is_same_v<T, Deterministic>) {
                require(d.c > 0.0, "Deterministic: c must be positive");
            }
        },
        v_);
    require(std::isfinite(mean()) && mean() > 0.0, "distribution mean must be finite and positive");
}

double ServiceDist::pdf(double x) const {
    check_cutoff(x);
    return std::visit(
        [x](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Uniform>) {
                return (x >= d.a && x <= d.b) ? 1.0 / (d.b - d.a) : 0.0;
            } else if constexpr (std::is_same_v<T, Exponential>) {
                return d.rate * std::exp(-d.rate * x);
            } else if constexpr (std::is_same_v<T, Hyperexp2>) {
                return d.p1 * d.rate1 * std::exp(-d.rate1 * x) +
                       (1.0 - d.p1) * d.rate2 * std::exp(-d.rate2 * x);
            } else if constexpr (std::is_same_v<T, Pareto>) {
                if (x < d.xm) return 0.0;
                return d.alpha * std::pow(d.xm, d.alpha) / std::pow(x, d.alpha + 1.0);
            } else if constexpr (std::is_same_v<T, BoundedPareto>) {
                if (x < d.lower || x > d.upper) return 0.0;
                double C = d.alpha * std::pow(d.lower, d.alpha) /
                           (1.0 - std::pow(d.lower / d.upper, d.alpha));
                return C * std::pow(x, -d.alpha - 1.0);
            } else {
                // Atom: no density.
                (void)d;
                return 0.0;
            }
        },
        v_);
}

double ServiceDist::cdf(double x) const {
    check_cutoff(x);
    return std::visit(
        [x](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Uniform>) {
                if (x <= d.a) return 0.0;
                if (x >= d.b) return 1.0;
                return (x - d.a) / (d.b - d.a);
            } else if constexpr (std::is_same_v<T, Exponential>) {
                return 1.0 - std::exp(-d.rate * x);
            } else if constexpr (std::is_same_v<T, Hyperexp2>) {
                return 1.0 - d.p1 * std::exp(-d.rate1 * x) -
                       (1.0 - d.p1) * std::exp(-d.rate2 * x);
            } else if constexpr (std::is_same_v<T, Pareto>) {
                if (x <= d.xm) return 0.0;
                return 1.0 - std::pow(d.xm / x, d.alpha);
            } else if constexpr (std::is_same_v<T, BoundedPareto>) {
                if (x <= d.lower) return 0.0;
                if (x >= d.upper) return 1.0;
                return (1.0 - std::pow(d.lower / x, d.alpha)) /
                       (1.0 - std::pow(d.lower / d.upper, d.alpha));
            } else {
                // The atom at c is included at x = c ("size at most x").
                return x >= d.c ? 1.0 : 0.0;
            }
        },
        v_);
}

double ServiceDist::mean() const {
    return std::visit(
        [](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Uniform>) {
                return 0.5 * (d.a + d.b);
            } else if constexpr (std::is_same_v<T, Exponential>) {
                return 1.0 / d.rate;
            } else if constexpr (std::is_same_v<T, Hyperexp2>) {
                return d.p1 / d.rate1 + (1.0 - d.p1) / d.rate2;
            } else if constexpr (std::is_same_v<T, Pareto>) {
                if (d.alpha <= 1.0) return std::numeric_limits<double>::infinity();
                return d.alpha * d.xm / (d.alpha - 1.0);
            } else if constexpr (std::is_same_v<T, BoundedPareto>) {
                double C = d.alpha * std::pow(d.lower, d.alpha) /
                           (1.0 - std::pow(d.lower / d.upper, d.alpha));
                return bpareto_moment(C, d.alpha, 1.0, d.lower, d.upper);
            } else {
                return d.c;
            }
        },
        v_);
}

double ServiceDist::second_moment() const {
    return std::visit(
        [](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Uniform>) {
                return (d.b * d.b * d.b - d.a * d.a * d.a) / (3.0 * (d.b - d.a));
            } else if constexpr (std::is_same_v<T, Exponential>) {
                return 2.0 / (d.rate * d.rate);
            } else if constexpr (std::is_same_v<T, Hyperexp2>) {
                return 2.0 * d.p1 / (d.rate1 * d.rate1) +
                       2.0 * (1.0 - d.p1) / (d.rate2 * d.rate2);
            } else if constexpr (std::is_same_v<T, Pareto>) {
                if (d.alpha <= 2.0) return std::numeric_limits<double>::infinity();
                return d.alpha * d.xm * d.xm / (d.alpha - 2.0);
            } else if constexpr (std::is_same_v<T, BoundedPareto>) {
                double C = d.alpha * std::pow(d.lower, d.alpha) /
                           (1.0 - std::pow(d.lower / d.upper, d.alpha));
                return bpareto_moment(C, d.alpha, 2.0, d.lower, d.upper);
            } else {
                return d.c * d.c;
            }
        },
        v_);
}

double ServiceDist::partial_mean(double x) const {
    check_cutoff(x);
    return std::visit(
        [x](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Uniform>) {
                if (x <= d.a) return 0.0;
                double hi = std::min(x, d.b);
                return (hi * hi - d.a * d.a) / (2.0 * (d.b - d.a));
            } else if constexpr (std::is_same_v<T, Exponential>) {
                double r = d.rate;
                return (1.0 - std::exp(-r * x) * (1.0 + r * x)) / r;
            } else if constexpr (std::is_same_v<T, Hyperexp2>) {
                auto branch = [x](double r) {
                    return (1.0 - std::exp(-r * x) * (1.0 + r * x)) / r;
                };
                return d.p1 * branch(d.rate1) + (1.0 - d.p1) * branch(d.rate2);
            } else if constexpr (std::is_same_v<T, Pareto>) {
                if (x <= d.xm) return 0.0;
                double m = d.alpha * d.xm / (d.alpha - 1.0);
                return m * (1.0 - std::pow(d.xm / x, d.alpha - 1.0));
            } else if constexpr (std::is_same_v<T, BoundedPareto>) {
                if (x <= d.lower) return 0.0;
                double C = d.alpha * std::pow(d.lower, d.alpha) /
                           (1.0 - std::pow(d.lower / d.upper, d.alpha));
                return bpareto_moment(C, d.alpha, 1.0, d.lower, std::min(x, d.upper));
            } else {
                return x >= d.c ? d.c : 0.0;
            }
        },
        v_);
}

double ServiceDist::partial_m2(double x) const {
    check_cutoff(x);
    return std::visit(
        [x](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Uniform>) {
                if (x <= d.a) return 0.0;
                double hi = std::min(x, d.b);
                return (hi * hi * hi - d.a * d.a * d.a) / (3.0 * (d.b - d.a));
            } else if constexpr (std::is_same_v<T, Exponential>) {
                double r = d.rate;
                return 2.0 / (r * r) -
                       std::exp(-r * x) * (x * x + 2.0 * x / r + 2.0 / (r * r));
            } else if constexpr (std::is_same_v<T, Hyperexp2>) {
                auto branch = [x](double r) {
                    return 2.0 / (r * r) -
                           std::exp(-r * x) * (x * x + 2.0 * x / r + 2.0 / (r * r));
                };
                return d.p1 * branch(d.rate1) + (1.0 - d.p1) * branch(d.rate2);
            } else if constexpr (std::is_same_v<T, Pareto>) {
                if (x <= d.xm) return 0.0;
                double m2 = d.alpha * d.xm * d.xm / (d.alpha - 2.0);
                return m2 * (1.0 - std::pow(d.xm / x, d.alpha - 2.0));
            } else if constexpr (std::is_same_v<T, BoundedPareto>) {
                if (x <= d.lower) return 0.0;
                double C = d.alpha * std::pow(d.lower, d.alpha) /
                           (1.0 - std::pow(d.lower / d.upper, d.alpha));
                return bpareto_moment(C, d.alpha, 2.0, d.lower, std::min(x, d.upper));
            } else {
                return x >= d.c ? d.c * d.c : 0.0;
            }
        },
        v_);
}

double ServiceDist::trunc_mean(double x) const {
    // E[min(S, x)] = E[S 1(S <= x)] + x (1 - F(x)).
    return partial_mean(x) + x * (1.0 - cdf(x));
}

double ServiceDist::trunc_m2(double x) const {
    return partial_m2(x) + x * x * (1.0 - cdf(x));
}

Moments ServiceDist::moments(double x) const {
    check_cutoff(x);
    return {pdf(x), cdf(x), mean(), partial_mean(x), partial_m2(x), trunc_mean(x)};
}

double ServiceDist::sample(RngStream& stream) const {
    return std::visit(
        [&stream](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Uniform>) {
                return d.a + (d.b - d.a) * stream.uniform();
            } else if constexpr (std::is_same_v<T, Exponential>) {
                return stream.exponential(d.rate);
            } else if constexpr (std::is_same_v<T, Hyperexp2>) {
                double rate = stream.uniform() < d.p1 ? d.rate1 : d.rate2;
                return stream.exponential(rate);
            } else if constexpr (std::is_same_v<T, Pareto>) {
                return d.xm * std::pow(stream.uniform(), -1.0 / d.alpha);
            } else if constexpr (std::is_same_v<T, BoundedPareto>) {
                double u = stream.uniform();
                double la = std::pow(d.lower, -d.alpha);
                double ua = std::pow(d.upper, -d.alpha);
                return std::pow(la - u * (la - ua), -1.0 / d.alpha);
            } else {
                return d.c;
            }
        },
        v_);
}

double ServiceDist::support_lower() const {
    return std::visit(
        [](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Uniform>) return d.a;
            else if constexpr (std::is_same_v<T, Pareto>) return d.xm;
            else if constexpr (std::is_same_v<T, BoundedPareto>) return d.lower;
            else if constexpr (std::is_same_v<T, Deterministic>) return d.c;
            else return 0.0;
        },
        v_);
}

double ServiceDist::support_upper() const {
    return std::visit(
        [](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Uniform>) return d.b;
            else if constexpr (std::is_same_v<T, BoundedPareto>) return d.upper;
            else if constexpr (std::is_same_v<T, Deterministic>) return d.c;
            else return std::numeric_limits<double>::infinity();
        },
        v_);
}

double ServiceDist::expect(const std::function<double(double)>& g, bool* converged) const {
    if (std::holds_alternative<Deterministic>(v_)) {
        if (converged) *converged = true;
        return g(std::get<Deterministic>(v_).c);
    }
    auto integrand = [this, &g](double x) { return g(x) * pdf(x); };
    double lo = support_lower();
    double hi = support_upper();
    QuadratureResult r = std::isfinite(hi) ? integrate(integrand, lo, hi, 1e-9, 1e-12)
                                           : integrate_to_inf(integrand, lo, 1e-9, 1e-12);
    if (converged) *converged = r.converged;
    return r.value;
}

std::string ServiceDist::kind() const {
    return std::visit(
        [](const auto& d) -> std::string {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Uniform>) return "uniform";
            else if constexpr (std::is_same_v<T, Exponential>) return "exponential";
            else if constexpr (std::is_same_v<T, Hyperexp2>) return "hyperexp2";
            else if constexpr (std::is_same_v<T, Pareto>) return "pareto";
            else if constexpr (std::is_same_v<T, BoundedPareto>) return "bounded_pareto";
            else return "deterministic";
        },
        v_);
}

ServiceDist hyperexp_from_mean_scv(double mean, double scv) {
    if (!(mean > 0.0)) throw std::invalid_argument("hyperexp: mean must be positive");
    if (!(scv > 1.0))
        throw std::invalid_argument("hyperexp: two-phase balanced form requires scv > 1");
    // Balanced means: each phase carries half the work, p1/rate1 = p2/rate2.
    double delta = std::sqrt((scv - 1.0) / (scv + 1.0));
    double p1 = 0.5 * (1.0 + delta);
    double rate1 = 2.0 * p1 / mean;
    double rate2 = 2.0 * (1.0 - p1) / mean;
    return ServiceDist(Hyperexp2{p1, rate1, rate2});
}

}  // namespace mgk
