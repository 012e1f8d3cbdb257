#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mgk/dist.hpp"
#include "mgk/quadrature.hpp"

using namespace mgk;

TEST_CASE("uniform(0,2) closed-form moments") {
    ServiceDist d(Uniform{0, 2});
    CHECK(d.mean() == doctest::Approx(1.0));
    CHECK(d.second_moment() == doctest::Approx(4.0 / 3.0));
    CHECK(d.pdf(1.0) == doctest::Approx(0.5));
    CHECK(d.cdf(1.0) == doctest::Approx(0.5));
    CHECK(d.cdf(3.0) == doctest::Approx(1.0));
    CHECK(d.partial_mean(1.0) == doctest::Approx(0.25));
    CHECK(d.partial_m2(1.0) == doctest::Approx(1.0 / 6.0));
    CHECK(d.trunc_mean(1.0) == doctest::Approx(0.75));
    CHECK(d.trunc_m2(1.0) == doctest::Approx(2.0 / 3.0));
    CHECK(d.partial_mean(2.0) == doctest::Approx(1.0));
    Moments m = d.moments(1.0);
    CHECK(m.partial_mean == doctest::Approx(0.25));
    CHECK(m.trunc_mean == doctest::Approx(0.75));
}

TEST_CASE("exponential closed-form moments") {
    ServiceDist d(Exponential{2.0});
    CHECK(d.mean() == doctest::Approx(0.5));
    CHECK(d.second_moment() == doctest::Approx(0.5));
    double x = 0.7;
    CHECK(d.trunc_mean(x) == doctest::Approx((1 - std::exp(-2 * x)) / 2));
    // E[S 1(S<=x)] = (1 - e^{-rx}) / r - x e^{-rx}
    CHECK(d.partial_mean(x) ==
          doctest::Approx((1 - std::exp(-2 * x)) / 2 - x * std::exp(-2 * x)));
}

TEST_CASE("balanced-means hyperexponential from (mean, scv)") {
    ServiceDist d = hyperexp_from_mean_scv(1.0, 10.0);
    const auto& h = std::get<Hyperexp2>(d.variant());
    CHECK(h.p1 == doctest::Approx(0.95226701686));
    CHECK(h.rate1 == doctest::Approx(2 * h.p1));
    CHECK(h.rate2 == doctest::Approx(2 * (1 - h.p1)));
    // balanced means: each branch carries half the mean
    CHECK(h.p1 / h.rate1 == doctest::Approx(0.5));
    CHECK(d.mean() == doctest::Approx(1.0));
    CHECK(d.second_moment() == doctest::Approx(11.0));  // scv + 1
    CHECK_THROWS(hyperexp_from_mean_scv(1.0, 1.0));
    CHECK_THROWS(hyperexp_from_mean_scv(1.0, 0.5));
}

TEST_CASE("deterministic atom") {
    ServiceDist d(Deterministic{2.0});
    CHECK(d.mean() == doctest::Approx(2.0));
    CHECK(d.second_moment() == doctest::Approx(4.0));
    CHECK(d.cdf(2.0) == doctest::Approx(1.0));
    CHECK(d.cdf(1.99) == doctest::Approx(0.0));
    CHECK(d.trunc_mean(1.0) == doctest::Approx(1.0));
    CHECK(d.partial_mean(1.0) == doctest::Approx(0.0));
    CHECK(d.expect([](double s) { return s * s; }) == doctest::Approx(4.0));
}

TEST_CASE("moments agree with direct quadrature") {
    for (ServiceDist d : {ServiceDist(Uniform{0.5, 3.0}),
                          ServiceDist(BoundedPareto{0.5, 10.0, 1.5}),
                          hyperexp_from_mean_scv(2.0, 5.0)}) {
        CAPTURE(d.kind());
        CHECK(d.expect([](double s) { return s; }) == doctest::Approx(d.mean()));
        CHECK(d.expect([](double s) { return s * s; }) ==
              doctest::Approx(d.second_moment()));
        double x = 1.3;
        CHECK(d.expect([&](double s) { return s <= x ? s : 0.0; }) ==
              doctest::Approx(d.partial_mean(x)).epsilon(1e-6));
        CHECK(d.expect([&](double s) { return std::min(s, x); }) ==
              doctest::Approx(d.trunc_mean(x)).epsilon(1e-6));
    }
}

TEST_CASE("parameter validation") {
    CHECK_THROWS(ServiceDist(Uniform{2, 1}));
    CHECK_THROWS(ServiceDist(Uniform{-1, 1}));
    CHECK_THROWS(ServiceDist(Exponential{0.0}));
    CHECK_THROWS(ServiceDist(Hyperexp2{1.5, 1, 1}));
    CHECK_THROWS(ServiceDist(BoundedPareto{2, 1, 1.5}));
    CHECK_THROWS(ServiceDist(Deterministic{0.0}));
    // infinite-variance tails are opt-in
    CHECK_THROWS(ServiceDist(Pareto{1.0, 1.5}));
    CHECK_NOTHROW(ServiceDist(Pareto{1.0, 1.5}, true));
    CHECK_NOTHROW(ServiceDist(Pareto{1.0, 2.5}));
}

TEST_CASE("sampling matches moments") {
    RngStream rng(123);
    for (ServiceDist d :
         {ServiceDist(Uniform{0, 2}), hyperexp_from_mean_scv(1.0, 10.0)}) {
        CAPTURE(d.kind());
        const int n = 400000;
        double s = 0, s2 = 0;
        for (int i = 0; i < n; ++i) {
            double v = d.sample(rng);
            CHECK(v >= 0.0);
            s += v;
            s2 += v * v;
        }
        double mean = s / n;
        double sd = std::sqrt(d.second_moment() - d.mean() * d.mean());
        CHECK(std::abs(mean - d.mean()) < 5 * sd / std::sqrt(double(n)));
        double m2 = s2 / n;
        CHECK(m2 == doctest::Approx(d.second_moment()).epsilon(0.05));
    }
}

TEST_CASE("sampling is deterministic per seed") {
    ServiceDist d = hyperexp_from_mean_scv(1.0, 10.0);
    RngStream a(7), b(7), c(8);
    bool all_equal = true, any_diff = false;
    for (int i = 0; i < 1000; ++i) {
        double va = d.sample(a);
        if (va != d.sample(b)) all_equal = false;
        if (va != d.sample(c)) any_diff = true;
    }
    CHECK(all_equal);
    CHECK(any_diff);
}

TEST_CASE("adaptive quadrature basics") {
    auto r = integrate([](double x) { return x * x; }, 0, 3);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(9.0));
    auto g = integrate_to_inf([](double x) { return std::exp(-x); }, 0);
    CHECK(g.converged);
    CHECK(g.value == doctest::Approx(1.0));
}
