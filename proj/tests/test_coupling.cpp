#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mgk/coupling.hpp"

using namespace mgk;

namespace {

const std::vector<double> kGrid{0.25, 0.5, 1.0, 1.5};

std::vector<Arrival> sample_arrivals(double rho, const ServiceDist& d,
                                     std::uint64_t seed, std::size_t n) {
    return ArrivalSequence::poisson(rho / d.mean(), d, seed).take(n);
}

}  // namespace

TEST_CASE("delta stays within the worst-case bound for every policy") {
    ServiceDist dists[] = {ServiceDist(Uniform{0, 2}), hyperexp_from_mean_scv(1, 10)};
    double quantum = 0.01;
    for (const ServiceDist& d : dists) {
        for (int k : {2, 10}) {
            for (Policy p : {Policy::SRPT, Policy::PSJF, Policy::RS, Policy::FB}) {
                for (std::uint64_t seed : {1, 2, 3}) {
                    CAPTURE(d.kind());
                    CAPTURE(k);
                    CAPTURE(policy_name(p));
                    auto arrivals = sample_arrivals(0.8, d, seed, 400);
                    auto traces = run_coupled(
                        standard_pair(p, p == Policy::FB ? quantum : 0.0), k, arrivals,
                        kGrid, {});
                    for (const DeltaTrace& t : traces) {
                        CHECK(t.violations.empty());
                        CHECK(t.max_delta <= t.bound + 1e-9);
                        CHECK(t.monotone_ok);
                    }
                }
            }
        }
    }
}

TEST_CASE("rs relevance threshold flag switches to remaining <= x") {
    auto arrivals = sample_arrivals(0.8, ServiceDist(Uniform{0, 2}), 4, 300);
    auto pair = standard_pair(Policy::RS, 0.0, true);
    CHECK(pair.relk == Relevance::RemainingLeX);
    auto traces = run_coupled(pair, 2, arrivals, kGrid, {});
    // no worst-case bound is claimed for the alternate relevance notion
    for (const DeltaTrace& t : traces) {
        CHECK(std::isinf(t.bound));
        CHECK(t.violations.empty());
        CHECK(std::isfinite(t.max_delta));
    }
}

TEST_CASE("improved pair: delta <= x * relevant-busy servers at every event") {
    ServiceDist dists[] = {ServiceDist(Uniform{0, 2}), hyperexp_from_mean_scv(1, 10)};
    CoupledOptions opts;
    opts.keep_events = true;
    for (const ServiceDist& d : dists) {
        for (int k : {2, 10}) {
            for (std::uint64_t seed : {1, 2, 3}) {
                CAPTURE(d.kind());
                CAPTURE(k);
                auto arrivals = sample_arrivals(0.9, d, seed, 400);
                auto traces = run_coupled(improved_pair(), k, arrivals, kGrid, opts);
                for (const DeltaTrace& t : traces) {
                    REQUIRE_FALSE(t.events.empty());
                    ImprovedDeltaResult r = check_improved_delta(t);
                    CAPTURE(t.x);
                    CAPTURE(r.worst.time);
                    CHECK(r.ok);
                    // few-jobs events additionally satisfy delta <= m*x
                    for (const DeltaEvent& e : t.events)
                        if (!e.many_jobs) CHECK(e.delta <= t.x * e.relbusy_k + 1e-9);
                }
            }
        }
    }
    CHECK_THROWS(check_improved_delta(DeltaTrace{}));
}

TEST_CASE("coupled systems drain the same finite sequence") {
    std::vector<Arrival> jobs{{0, 1}, {0, 1}, {0, 2}, {0, 2}};
    CoupledOptions opts;
    opts.keep_events = true;
    opts.validate = true;
    auto traces = run_coupled(standard_pair(Policy::SRPT), 2, jobs, {1.0}, opts);
    REQUIRE(traces.size() == 1);
    const DeltaTrace& t = traces[0];
    CHECK(t.bound == doctest::Approx(2.0));  // k*x
    CHECK(t.max_delta <= 2.0 + 1e-9);
    CHECK(t.violations.empty());
    // At the end both systems are empty, so delta returns to zero.
    CHECK(t.events.back().delta == doctest::Approx(0.0));
    CHECK(t.events.back().relwork_1 == doctest::Approx(0.0));
}

TEST_CASE("tagged audit: lone job attains the extreme virtual work") {
    auto audits = tagged_audit({Policy::SRPT, 0.0}, 2, {{0, 1}});
    REQUIRE(audits.size() == 1);
    const TaggedAudit& a = audits[0];
    CHECK(a.response() == doctest::Approx(2.0));  // k*x on an empty system
    CHECK(a.tagged_work == doctest::Approx(1.0));
    CHECK(a.virt_work == doctest::Approx(1.0));  // exactly (k-1)*x
    CHECK(a.old_work == doctest::Approx(0.0));
    CHECK(a.new_work == doctest::Approx(0.0));
}

TEST_CASE("tagged audit: capacity decomposition is exact and bounded") {
    ServiceDist d(Uniform{0, 2});
    double quantum = 0.01;
    for (Policy p : {Policy::SRPT, Policy::PSJF, Policy::RS, Policy::FB}) {
        for (int k : {2, 10}) {
            CAPTURE(policy_name(p));
            CAPTURE(k);
            auto arrivals = sample_arrivals(0.8, d, 11, 300);
            PolicySpec spec{p, p == Policy::FB ? quantum : 0.0};
            auto audits = tagged_audit(spec, k, arrivals);
            CHECK(audits.size() == 300);
            for (const TaggedAudit& a : audits) {
                // elapsed capacity during the sojourn splits into the four parts
                CHECK(a.total_work() == doctest::Approx(a.response()).epsilon(1e-9));
                double slack = p == Policy::FB ? k * quantum : 0.0;
                CHECK(a.virt_work <= (k - 1) * a.size + slack + 1e-9);
                CHECK(a.tagged_work == doctest::Approx(a.size));
            }
        }
    }
    // no relevance notion for FCFS once another job must be classified
    CHECK_THROWS(tagged_audit({Policy::FCFS, 0.0}, 2, {{0, 1}, {0, 1}}));
}
