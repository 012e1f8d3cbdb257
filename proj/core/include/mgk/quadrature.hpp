#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>

namespace mgk {

// Adaptive Simpson integration. Relative tolerance 1e-9 with an absolute
// floor of 1e-12; subdivision is capped so pathological integrands fail
// loudly instead of spinning.
struct QuadratureResult {
    double value = 0.0;
    bool converged = true;
    std::uint64_t evals = 0;
};

namespace detail {

struct SimpsonState {
    const std::function<double(double)>& f;
    double rel_tol;
    double abs_tol;
    std::uint64_t max_evals;
    std::uint64_t evals = 0;
    bool converged = true;
};

inline double simpson_panel(double fa, double fm, double fb, double h) {
    return h / 6.0 * (fa + 4.0 * fm + fb);
}

inline double simpson_recurse(SimpsonState& st, double a, double b, double fa,
                              double fm, double fb, double whole, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m);
    double rm = 0.5 * (m + b);
    double flm = st.f(lm);
    double frm = st.f(rm);
    st.evals += 2;
    double left = simpson_panel(fa, flm, fm, m - a);
    double right = simpson_panel(fm, frm, fb, b - m);
    double delta = left + right - whole;
    double tol = std::max(st.abs_tol, st.rel_tol * std::abs(left + right));
    if (std::abs(delta) <= 15.0 * tol || depth <= 0 || st.evals > st.max_evals) {
        if (depth <= 0 || st.evals > st.max_evals) {
            if (std::abs(delta) > 15.0 * tol) st.converged = false;
        }
        return left + right + delta / 15.0;
    }
    return simpson_recurse(st, a, m, fa, flm, fm, left, depth - 1) +
           simpson_recurse(st, m, b, fm, frm, fb, right, depth - 1);
}

}  // namespace detail

inline QuadratureResult integrate(const std::function<double(double)>& f,
                                  double a, double b, double rel_tol = 1e-9,
                                  double abs_tol = 1e-12,
                                  std::uint64_t max_evals = 1000000) {
    if (!(a <= b)) throw std::invalid_argument("integrate: a > b");
    if (a == b) return {0.0, true, 0};
    detail::SimpsonState st{f, rel_tol, abs_tol, max_evals};
    double fa = f(a);
    double fm = f(0.5 * (a + b));
    double fb = f(b);
    st.evals = 3;
    double whole = detail::simpson_panel(fa, fm, fb, b - a);
    double v = detail::simpson_recurse(st, a, b, fa, fm, fb, whole, 48);
    return {v, st.converged, st.evals};
}

// Integral over [a, inf) via the substitution u = 1/(1+x), x = (1-u)/u.
inline QuadratureResult integrate_to_inf(const std::function<double(double)>& f,
                                         double a, double rel_tol = 1e-9,
                                         double abs_tol = 1e-12) {
    auto g = [&f](double u) {
        double x = (1.0 - u) / u;
        return f(x) / (u * u);
    };
    double u_hi = 1.0 / (1.0 + a);
    // Stay clear of u = 0; the integrands we see decay fast enough that the
    // remainder below u = 1e-12 is negligible against abs_tol.
    return integrate(g, 1e-12, u_hi, rel_tol, abs_tol);
}

}  // namespace mgk
