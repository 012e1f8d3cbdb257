// Experiment driver. Every subcommand reads one JSON config (--config) and
// accepts --key=value overrides for any field. Exit code 0 only when the
// invoked command's invariant checks all pass.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mgk/analytic.hpp"
#include "mgk/config.hpp"
#include "mgk/coupling.hpp"
#include "mgk/sim.hpp"
#include "mgk/sweep.hpp"

using json = nlohmann::json;
using namespace mgk;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

json load_config(const std::string& path, const std::vector<std::string>& overrides) {
    json cfg = json::object();
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open config " + path);
        in >> cfg;
    }
    for (const std::string& raw : overrides) {
        std::string s = raw;
        if (s.rfind("--", 0) == 0) s = s.substr(2);
        auto eq = s.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("override must be --key=value: " + raw);
        std::string key = s.substr(0, eq), val = s.substr(eq + 1);
        json parsed;
        try {
            parsed = json::parse(val);
        } catch (const json::parse_error&) {
            parsed = val;  // bare string
        }
        cfg[key] = parsed;
    }
    return cfg;
}

ServiceDist dist_from_config(const json& cfg) {
    if (!cfg.contains("dist"))
        throw std::runtime_error("config needs a \"dist\" literal");
    return dist_from_json(cfg.at("dist"));
}

double lambda_from_config(const json& cfg, const ServiceDist& dist) {
    if (cfg.contains("lambda")) return cfg.at("lambda").get<double>();
    if (cfg.contains("rho")) return cfg.at("rho").get<double>() / dist.mean();
    throw std::runtime_error("config needs \"lambda\" or \"rho\"");
}

PolicySpec policy_from_config(const json& cfg, const ServiceDist& dist) {
    Policy p = policy_from_string(cfg.value("policy", std::string("srpt")));
    double q = cfg.value("fb_quantum", 0.0);
    if (p == Policy::FB && q <= 0.0) q = 0.01 * dist.mean();
    return {p, q};
}

std::vector<std::uint64_t> seeds_from_config(const json& cfg) {
    if (cfg.contains("seeds"))
        return cfg.at("seeds").get<std::vector<std::uint64_t>>();
    return {cfg.value("seed", std::uint64_t{1})};
}

// ------------------------------------------------------------- subcommands

int cmd_simulate(const json& cfg) {
    ServiceDist dist = dist_from_config(cfg);
    PolicySpec policy = policy_from_config(cfg, dist);
    int k = cfg.value("k", 1);
    double lambda = lambda_from_config(cfg, dist);
    SimOptions opts;
    opts.n_completions = cfg.value("n_completions", std::uint64_t{100000});
    opts.warmup_fraction = cfg.value("warmup_fraction", 0.2);
    opts.x_grid = cfg.value("x_grid", std::vector<double>{});
    opts.validate = cfg.value("validate", true);
    std::uint64_t seed = cfg.value("seed", std::uint64_t{1});

    SimStats stats = run(policy, k, ArrivalSequence::poisson(lambda, dist, seed), opts);

    bool ok = true;
    std::string jobs_path = cfg.value("jobs_csv", std::string("jobs.csv"));
    if (!jobs_path.empty()) {
        std::ofstream out(jobs_path);
        out << "id,arrival,size,completion,response\n";
        for (const JobRecord& j : stats.jobs) {
            out << j.id << ',' << fmt(j.arrival) << ',' << fmt(j.size) << ','
                << fmt(j.completion) << ',' << fmt(j.response()) << '\n';
            if (j.response() < k * j.size - 1e-9) ok = false;
        }
    }
    MeanResponse mr = mean_response(stats);
    std::string summary_path = cfg.value("summary_csv", std::string("summary.csv"));
    {
        std::ofstream out(summary_path);
        out << "policy,k,lambda,seed,completions,mean_response,ci_halfwidth,end_time\n";
        out << policy_name(policy.kind) << ',' << k << ',' << fmt(lambda) << ','
            << seed << ',' << mr.count << ',' << fmt(mr.mean) << ','
            << fmt(mr.ci_halfwidth) << ',' << fmt(stats.end_time) << '\n';
    }
    std::cout << "simulate: " << policy_name(policy.kind) << "-" << k
              << " mean response " << fmt(mr.mean) << " +- " << fmt(mr.ci_halfwidth)
              << " over " << mr.count << " jobs\n";
    if (!ok) std::cerr << "simulate: response < k*size invariant violated\n";
    return ok ? 0 : 1;
}

int cmd_bounds(const json& cfg) {
    ServiceDist dist = dist_from_config(cfg);
    int k = cfg.value("k", 10);
    double lambda = lambda_from_config(cfg, dist);
    auto x_grid = cfg.value("x_grid", std::vector<double>{});
    if (x_grid.empty()) throw std::runtime_error("bounds needs a nonempty x_grid");
    LoadContext ctx(lambda, dist, k);

    bool ok = true;
    std::string path = cfg.value("summary_csv", std::string("summary.csv"));
    std::ofstream out(path);
    out << "x,rho_le_x,H,I,psjf_bound,fb_bound,rs_increment\n";
    for (double x : x_grid) {
        BoundReport r = bound_report(ctx, x);
        out << fmt(r.x) << ',' << fmt(r.rho_le_x) << ',' << fmt(r.H) << ','
            << fmt(r.I) << ',' << fmt(r.policy_bounds.at(Policy::PSJF)) << ','
            << fmt(r.policy_bounds.at(Policy::FB)) << ','
            << fmt(r.policy_bounds.at(Policy::RS)) << '\n';
        if (r.I > r.H + 1e-9) {
            std::cerr << "bounds: I(x) > H(x) at x=" << fmt(x) << "\n";
            ok = false;
        }
    }
    std::cout << "bounds: wrote " << x_grid.size() << " rows to " << path << "\n";
    return ok ? 0 : 1;
}

int cmd_sweep_ratio(const json& cfg) {
    ServiceDist dist = dist_from_config(cfg);
    SweepConfig sc(dist);
    sc.k = cfg.value("k", 10);
    sc.rho_grid = cfg.value("rho_grid", std::vector<double>{0.8, 0.9, 0.95, 0.99});
    sc.seeds = seeds_from_config(cfg);
    sc.n_completions = cfg.value("n_completions", std::uint64_t{0});
    sc.warmup_fraction = cfg.value("warmup_fraction", 0.2);
    sc.out_csv = cfg.value("ratio_csv", std::string("ratio.csv"));
    sc.out_svg = cfg.value("ratio_svg", std::string("ratio.svg"));

    std::vector<RatioRow> rows = sweep_ratio(sc);
    bool ok = true;
    for (const RatioRow& r : rows) {
        if (r.failed) {
            std::cerr << "sweep-ratio: rho=" << fmt(r.rho) << " failed: " << r.error
                      << "\n";
            ok = false;
            continue;
        }
        std::cout << "rho=" << fmt(r.rho) << " ratio_sim=" << fmt(r.ratio_sim)
                  << " ratio_bound_I=" << fmt(r.ratio_bound_I)
                  << " ratio_bound_H=" << fmt(r.ratio_bound_H) << "\n";
        if (r.ratio_bound_I > r.ratio_bound_H + 1e-9) {
            std::cerr << "sweep-ratio: bound ordering I <= H violated at rho="
                      << fmt(r.rho) << "\n";
            ok = false;
        }
    }
    return ok ? 0 : 1;
}

int cmd_couple(const json& cfg) {
    ServiceDist dist = dist_from_config(cfg);
    int k = cfg.value("k", 2);
    double lambda = lambda_from_config(cfg, dist);
    auto x_grid = cfg.value("x_grid", std::vector<double>{0.25, 0.5, 1.0, 1.5});
    std::size_t n_jobs = cfg.value("n_jobs", std::size_t{1000});
    double fb_quantum = cfg.value("fb_quantum", 0.01 * dist.mean());
    std::vector<std::string> policies =
        cfg.value("policies", std::vector<std::string>{"srpt", "psjf", "rs", "fb",
                                                       "improved"});
    std::vector<std::uint64_t> seeds = seeds_from_config(cfg);

    std::string path = cfg.value("violations_csv", std::string("violations.csv"));
    std::ofstream vio(path);
    vio << "seed,policy,x,time,delta,bound\n";
    std::size_t n_violations = 0;
    bool monotone_ok = true;
    std::vector<double> max_delta(x_grid.size(), 0.0);

    for (std::uint64_t seed : seeds) {
        auto arrivals = ArrivalSequence::poisson(lambda, dist, seed).take(n_jobs);
        for (const std::string& pname : policies) {
            CoupledOptions copts;
            std::vector<DeltaTrace> traces;
            if (pname == "improved") {
                copts.keep_events = true;
                traces = run_coupled(improved_pair(), k, arrivals, x_grid, copts);
                for (const DeltaTrace& t : traces) {
                    ImprovedDeltaResult r = check_improved_delta(t);
                    if (!r.ok) {
                        ++n_violations;
                        vio << seed << ",improved," << fmt(t.x) << ','
                            << fmt(r.worst.time) << ',' << fmt(r.worst.delta) << ','
                            << fmt(t.x * r.worst.relbusy_k) << '\n';
                    }
                }
            } else {
                PolicyPair pair = standard_pair(policy_from_string(pname), fb_quantum);
                traces = run_coupled(pair, k, arrivals, x_grid, copts);
                for (const DeltaTrace& t : traces) {
                    for (const DeltaViolation& v : t.violations) {
                        ++n_violations;
                        vio << seed << ',' << pname << ',' << fmt(t.x) << ','
                            << fmt(v.time) << ',' << fmt(v.delta) << ','
                            << fmt(v.bound) << '\n';
                    }
                    if (!t.monotone_ok) monotone_ok = false;
                }
            }
            for (std::size_t i = 0; i < traces.size(); ++i)
                max_delta[i] = std::max(max_delta[i], traces[i].max_delta);
        }
    }
    for (std::size_t i = 0; i < x_grid.size(); ++i)
        std::cout << "couple: x=" << fmt(x_grid[i])
                  << " max_delta=" << fmt(max_delta[i]) << "\n";
    std::cout << "couple: " << n_violations << " violations -> " << path << "\n";
    if (!monotone_ok)
        std::cerr << "couple: delta failed to decrease within a many-jobs interval\n";
    return (n_violations == 0 && monotone_ok) ? 0 : 1;
}

int cmd_audit(const json& cfg) {
    ServiceDist dist = dist_from_config(cfg);
    PolicySpec policy = policy_from_config(cfg, dist);
    int k = cfg.value("k", 2);
    double lambda = lambda_from_config(cfg, dist);
    std::size_t n_jobs = cfg.value("n_jobs", std::size_t{1000});
    std::vector<std::uint64_t> seeds = seeds_from_config(cfg);

    std::string path = cfg.value("violations_csv", std::string("violations.csv"));
    std::ofstream vio(path);
    vio << "seed,id,size,virt_work,bound\n";
    std::size_t n_violations = 0, n_jobs_total = 0;
    double worst_ratio = 0.0;
    for (std::uint64_t seed : seeds) {
        auto arrivals = ArrivalSequence::poisson(lambda, dist, seed).take(n_jobs);
        for (const TaggedAudit& a : tagged_audit(policy, k, arrivals)) {
            ++n_jobs_total;
            double bound = (k - 1) * a.size +
                           (policy.kind == Policy::FB ? k * policy.fb_quantum : 0.0);
            worst_ratio = std::max(worst_ratio, a.virt_work / ((k - 1) * a.size));
            bool bad = a.virt_work > bound + 1e-9 ||
                       std::abs(a.total_work() - a.response()) > 1e-6;
            if (bad) {
                ++n_violations;
                vio << seed << ',' << a.id << ',' << fmt(a.size) << ','
                    << fmt(a.virt_work) << ',' << fmt(bound) << '\n';
            }
        }
    }
    std::cout << "audit: " << n_jobs_total << " jobs, worst virt/(k-1)size = "
              << fmt(worst_ratio) << ", " << n_violations << " violations -> " << path
              << "\n";
    return n_violations == 0 ? 0 : 1;
}

int cmd_counterexample() {
    CounterexampleReport rep = counterexample();
    std::cout << "srpt-2 completions:";
    for (double c : rep.srpt2_completions) std::cout << ' ' << fmt(c);
    std::cout << "\nalternative schedule completions:";
    for (double c : rep.alt_completions) std::cout << ' ' << fmt(c);
    std::cout << "\nthird completion: srpt-2 " << fmt(rep.srpt2_third)
              << " vs alternative " << fmt(rep.alt_third) << "\n";
    return rep.ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"M/G/k scheduling experiments"};
    app.require_subcommand(1);
    std::string config_path;
    struct Sub {
        CLI::App* cmd;
        std::string name;
    };
    std::vector<Sub> subs;
    for (const char* name :
         {"simulate", "bounds", "sweep-ratio", "couple", "audit", "counterexample"}) {
        CLI::App* c = app.add_subcommand(name);
        c->allow_extras();
        subs.push_back({c, name});
    }
    app.add_option("--config", config_path, "JSON config file")->expected(1);

    CLI11_PARSE(app, argc, argv);
    try {
        for (const Sub& s : subs) {
            if (!s.cmd->parsed()) continue;
            json cfg = load_config(config_path, s.cmd->remaining());
            if (s.name == "simulate") return cmd_simulate(cfg);
            if (s.name == "bounds") return cmd_bounds(cfg);
            if (s.name == "sweep-ratio") return cmd_sweep_ratio(cfg);
            if (s.name == "couple") return cmd_couple(cfg);
            if (s.name == "audit") return cmd_audit(cfg);
            if (s.name == "counterexample") return cmd_counterexample();
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
