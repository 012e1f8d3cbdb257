#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mgk/sim.hpp"

using namespace mgk;

namespace {

std::vector<Arrival> scenario() { return {{0, 1}, {0, 1}, {0, 2}, {0, 2}}; }

std::vector<double> completions(const SimStats& s) {
    std::vector<double> c;
    for (const JobRecord& j : s.jobs) c.push_back(j.completion);
    std::sort(c.begin(), c.end());
    return c;
}

}  // namespace

TEST_CASE("two-server scenario: srpt finishes its third job at 6") {
    SimOptions o;
    o.validate = true;
    auto s = run({Policy::SRPT, 0.0}, 2, ArrivalSequence::explicit_list(scenario()), o);
    CHECK(completions(s) == std::vector<double>{2, 2, 6, 6});
    CHECK(alt_schedule_counterexample() == std::vector<double>{2, 4, 4});
}

TEST_CASE("scenario under srpt-1 and srpt-4") {
    SimOptions o;
    o.validate = true;
    auto s1 = run({Policy::SRPT, 0.0}, 1, ArrivalSequence::explicit_list(scenario()), o);
    CHECK(completions(s1) == std::vector<double>{1, 2, 4, 6});
    auto s4 = run({Policy::SRPT, 0.0}, 4, ArrivalSequence::explicit_list(scenario()), o);
    CHECK(completions(s4) == std::vector<double>{4, 4, 8, 8});
}

TEST_CASE("fcfs hand trace with staggered arrivals") {
    // k=1: sizes 2,1 arriving at 0 and 0.5 -> completions 2, 3.
    SimOptions o;
    o.validate = true;
    auto s = run({Policy::FCFS, 0.0}, 1,
                 ArrivalSequence::explicit_list({{0, 2}, {0.5, 1}}), o);
    CHECK(completions(s) == std::vector<double>{2, 3});
}

TEST_CASE("m/m/1 fcfs matches 1/(mu - lambda)") {
    SimOptions o;
    o.n_completions = 400000;
    o.validate = true;
    auto s = run({Policy::FCFS, 0.0}, 1,
                 ArrivalSequence::poisson(0.5, ServiceDist(Exponential{1.0}), 42), o);
    MeanResponse m = mean_response(s);
    CHECK_FALSE(m.insufficient);
    CHECK(std::abs(m.mean - 2.0) < 3 * m.ci_halfwidth);
    CHECK(m.ci_halfwidth < 0.1);
}

TEST_CASE("identical seed gives bit-identical records") {
    SimOptions o;
    o.n_completions = 20000;
    auto arr = ArrivalSequence::poisson(0.7, hyperexp_from_mean_scv(1, 10), 9);
    auto a = run({Policy::SRPT, 0.0}, 4, arr, o);
    auto b = run({Policy::SRPT, 0.0}, 4, arr, o);
    REQUIRE(a.jobs.size() == b.jobs.size());
    for (std::size_t i = 0; i < a.jobs.size(); ++i) {
        CHECK(a.jobs[i].id == b.jobs[i].id);
        CHECK(a.jobs[i].completion == b.jobs[i].completion);
    }
}

TEST_CASE("all policies run clean with invariant validation on") {
    for (Policy p : {Policy::SRPT, Policy::PSJF, Policy::RS, Policy::FB, Policy::FCFS}) {
        CAPTURE(policy_name(p));
        SimOptions o;
        o.n_completions = 30000;
        o.validate = true;  // served-set priority + work conservation checks
        PolicySpec spec{p, p == Policy::FB ? 0.01 : 0.0};
        auto s = run(spec, 3, ArrivalSequence::poisson(0.8, ServiceDist(Uniform{0, 2}), 5),
                     o);
        CHECK(s.jobs.size() == 30000);
        for (const JobRecord& j : s.jobs)
            CHECK(j.response() >= 3 * j.size - 1e-9);  // k servers of speed 1/k
    }
}

TEST_CASE("streaming accumulators agree with recorded responses") {
    auto arr = ArrivalSequence::poisson(0.8, ServiceDist(Uniform{0, 2}), 17);
    SimOptions rec;
    rec.n_completions = 60000;
    auto sr = run({Policy::SRPT, 0.0}, 2, arr, rec);
    SimOptions stream = rec;
    stream.record_jobs = false;
    stream.size_bins = {{0.95, 1.05}};
    auto ss = run({Policy::SRPT, 0.0}, 2, arr, stream);
    CHECK(ss.jobs.empty());
    MeanResponse a = mean_response(sr), b = mean_response(ss);
    CHECK(a.mean == doctest::Approx(b.mean).epsilon(1e-3));
    MeanResponse bin = mean_response(ss, {{0.95, 1.05}});
    CHECK_FALSE(bin.insufficient);
    CHECK(bin.count > 1000);
    CHECK_THROWS(mean_response(ss, {{0.0, 0.5}}));  // bin was not tracked
}

TEST_CASE("relbusy trajectory average approximates k rho_le") {
    SimOptions o;
    o.n_completions = 200000;
    o.x_grid = {0.5, 1.0};
    o.record_jobs = false;
    auto s = run({Policy::SRPT, 0.0}, 10,
                 ArrivalSequence::poisson(0.8, ServiceDist(Uniform{0, 2}), 21), o);
    CHECK(relbusy_avg(s, 1.0) == doctest::Approx(2.0).epsilon(0.05));
    CHECK(relbusy_avg(s, 0.5) == doctest::Approx(10 * 0.8 * 0.0625).epsilon(0.10));
    CHECK_THROWS(relbusy_avg(s, 0.75));
}

TEST_CASE("relevant-work trajectory matches hand integral on a fixed trace") {
    // One job of size 2 on k=1: remaining decays 2 -> 0 over [0,2].
    // Time-avg of remaining*1(remaining<=1) over [0,2] is (1/2)*int_0^1 r dr = 0.25.
    SimOptions o;
    o.x_grid = {1.0};
    auto s = run({Policy::SRPT, 0.0}, 1, ArrivalSequence::explicit_list({{0, 2}}), o);
    CHECK(s.traj.relwork_le[0] == doctest::Approx(0.25));
    // truncated contribution min(remaining, max(0, 1-attained)): 1 - t for t<1
    CHECK(s.traj.relwork_bar[0] == doctest::Approx(0.25));
    CHECK(s.traj.relbusy_le[0] == doctest::Approx(0.0));  // original size 2 > 1
}

TEST_CASE("fb shares the server across an equal-age cohort") {
    // Two size-1 jobs, k=1 FB: both finish around t=2, neither at t=1.
    SimOptions o;
    o.validate = true;
    auto s = run({Policy::FB, 0.05}, 1, ArrivalSequence::explicit_list({{0, 1}, {0, 1}}),
                 o);
    auto c = completions(s);
    CHECK(c[0] > 1.8);
    CHECK(c[1] == doctest::Approx(2.0));
}

TEST_CASE("srpt preempts a larger job in service") {
    // k=1: size 2 at t=0, size 0.5 at t=0.5 -> small one jumps ahead.
    auto s = run({Policy::SRPT, 0.0}, 1,
                 ArrivalSequence::explicit_list({{0, 2}, {0.5, 0.5}}), SimOptions{});
    REQUIRE(s.jobs.size() == 2);
    CHECK(s.jobs[0].id == 1);
    CHECK(s.jobs[0].completion == doctest::Approx(1.0));
    CHECK(s.jobs[1].completion == doctest::Approx(2.5));
}

TEST_CASE("input validation") {
    CHECK_THROWS(ArrivalSequence::explicit_list({{1, 1}, {0, 1}}));
    CHECK_THROWS(ArrivalSequence::explicit_list({{0, 0}}));
    CHECK_THROWS(ArrivalSequence::poisson(0.0, ServiceDist(Uniform{0, 2}), 1));
    CHECK(ArrivalSequence::poisson(0.5, ServiceDist(Uniform{0, 2}), 1).take(100).size() ==
          100);
    SimOptions o;  // sampled sequence without a stopping rule
    CHECK_THROWS(run({Policy::SRPT, 0.0}, 1,
                     ArrivalSequence::poisson(0.5, ServiceDist(Uniform{0, 2}), 1), o));
    o.n_completions = 10;
    CHECK_THROWS(run({Policy::SRPT, 0.0}, 1,
                     ArrivalSequence::poisson(2.0, ServiceDist(Uniform{0, 2}), 1), o));
    CHECK_THROWS(Simulator({Policy::FB, 0.0}, 1,
                           ArrivalSequence::explicit_list({{0, 1}}).cursor(),
                           SimOptions{}));
}

TEST_CASE("mean_response flags runs too short for a CI") {
    auto s = run({Policy::SRPT, 0.0}, 1, ArrivalSequence::explicit_list({{0, 1}, {0, 1}}),
                 SimOptions{});
    MeanResponse m = mean_response(s);
    CHECK(m.insufficient);
    CHECK(m.count == 2);
}
