#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "mgk/config.hpp"
#include "mgk/sweep.hpp"

using namespace mgk;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempFile {
    std::string path;
    explicit TempFile(const char* name) {
        path = std::string("sweep_test_") + name;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("counterexample report") {
    CounterexampleReport r = counterexample();
    CHECK(r.ok);
    CHECK(r.srpt2_third == 6.0);
    CHECK(r.alt_third == 4.0);
    CHECK(r.srpt2_completions == std::vector<double>{2, 2, 6, 6});
    CHECK(r.alt_completions == std::vector<double>{2, 4, 4});
}

TEST_CASE("ratio csv round-trips exactly") {
    std::vector<RatioRow> rows(2);
    rows[0] = {0.5, 3.25, 0.01, 1.625, 0.005, 2.0, 2.5, 3.0, false, ""};
    rows[1].rho = 0.9;
    rows[1].failed = true;
    rows[1].error = "cell failed, with a comma";
    TempFile f("roundtrip.csv");
    write_ratio_csv(f.path, rows);
    auto back = read_ratio_csv(f.path);
    REQUIRE(back.size() == 2);
    CHECK(back[0].rho == rows[0].rho);
    CHECK(back[0].mean_T_k == rows[0].mean_T_k);
    CHECK(back[0].ratio_bound_H == rows[0].ratio_bound_H);
    CHECK_FALSE(back[0].failed);
    CHECK(back[1].failed);
    CHECK(back[1].error == rows[1].error);
}

TEST_CASE("sweep is deterministic and k=1 gives ratio exactly 1") {
    SweepConfig cfg(ServiceDist(Uniform{0, 2}));
    cfg.k = 1;  // numerator and denominator are the same system
    cfg.rho_grid = {0.5};
    cfg.seeds = {3};
    cfg.n_completions = 20000;
    TempFile csv("det.csv"), svg("det.svg");
    cfg.out_csv = csv.path;
    cfg.out_svg = svg.path;
    auto rows = sweep_ratio(cfg);
    REQUIRE(rows.size() == 1);
    CHECK_FALSE(rows[0].failed);
    // common random numbers: identical runs, ratio is exactly 1
    CHECK(rows[0].ratio_sim == 1.0);
    CHECK(rows[0].ratio_bound_I <= rows[0].ratio_bound_H + 1e-9);
    std::string first = slurp(csv.path), first_svg = slurp(svg.path);
    CHECK(first_svg.find("<svg") != std::string::npos);
    CHECK(first_svg.find("polyline") != std::string::npos);
    sweep_ratio(cfg);
    CHECK(slurp(csv.path) == first);     // byte-identical rerun
    CHECK(slurp(svg.path) == first_svg);
}

TEST_CASE("per-cell failure isolates") {
    SweepConfig cfg(ServiceDist(Uniform{0, 2}));
    cfg.rho_grid = {1.5, 0.5};  // unstable cell plus a good one, unsorted
    cfg.n_completions = 5000;
    auto rows = sweep_ratio(cfg);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].rho == 0.5);  // sorted by rho
    CHECK_FALSE(rows[0].failed);
    CHECK(rows[1].failed);
    CHECK_FALSE(rows[1].error.empty());
}

TEST_CASE("default completion budget scales with 1/(1-rho)") {
    CHECK(default_sweep_completions(0.5) == 1000000);
    CHECK(default_sweep_completions(0.99) == 50000000);
    CHECK(default_sweep_completions(0.9999) == 50000000);  // capped
}

TEST_CASE("distribution literals round-trip through json") {
    nlohmann::json samples = nlohmann::json::array(
        {{{"kind", "uniform"}, {"a", 0.0}, {"b", 2.0}},
         {{"kind", "exponential"}, {"rate", 2.0}},
         {{"kind", "hyperexp2"}, {"mean", 1.0}, {"scv", 10.0}},
         {{"kind", "bounded_pareto"}, {"lower", 0.5}, {"upper", 10.0}, {"alpha", 1.5}},
         {{"kind", "deterministic"}, {"c", 2.0}}});
    for (const auto& j : samples) {
        ServiceDist d = dist_from_json(j);
        nlohmann::json norm = dist_to_json(d);
        // normalized form parses back to the same distribution
        CHECK(dist_to_json(dist_from_json(norm)) == norm);
        CHECK(norm.at("kind") == j.at("kind"));
    }
    ServiceDist h = dist_from_json({{"kind", "hyperexp2"}, {"mean", 1.0}, {"scv", 10.0}});
    CHECK(h.mean() == doctest::Approx(1.0));
    CHECK(h.second_moment() == doctest::Approx(11.0));
    CHECK(dist_from_json({{"kind", "exponential"}, {"mean", 0.5}}).mean() ==
          doctest::Approx(0.5));
    CHECK_THROWS(dist_from_json({{"kind", "weibull"}}));
    CHECK_THROWS(dist_from_json({{"kind", "pareto"}, {"xm", 1.0}, {"alpha", 1.5}}));
}

TEST_CASE("policy names parse") {
    CHECK(policy_from_string("srpt") == Policy::SRPT);
    CHECK(policy_from_string("SRPT") == Policy::SRPT);
    CHECK(policy_from_string("las") == Policy::FB);
    CHECK_THROWS(policy_from_string("lifo"));
}
