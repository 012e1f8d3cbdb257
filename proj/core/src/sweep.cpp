#include "mgk/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mgk {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

struct CellEstimate {
    double mean = 0.0;
    double ci = 0.0;
};

CellEstimate pool_seeds(const std::vector<MeanResponse>& per_seed) {
    CellEstimate out;
    double ss = 0.0;
    for (const MeanResponse& m : per_seed) {
        if (m.insufficient)
            throw std::runtime_error("too few completions for batch-means CI");
        out.mean += m.mean;
        ss += m.ci_halfwidth * m.ci_halfwidth;
    }
    out.mean /= per_seed.size();
    out.ci = std::sqrt(ss) / per_seed.size();
    return out;
}

}  // namespace

std::uint64_t default_sweep_completions(double rho) {
    double n = std::ceil(5e5 / (1.0 - rho));
    return static_cast<std::uint64_t>(std::min(n, 5e7));
}

std::vector<RatioRow> sweep_ratio(const SweepConfig& cfg) {
    if (cfg.rho_grid.empty()) throw std::invalid_argument("sweep_ratio: empty rho grid");
    if (cfg.seeds.empty()) throw std::invalid_argument("sweep_ratio: no seeds");
    std::vector<double> rhos = cfg.rho_grid;
    std::sort(rhos.begin(), rhos.end());

    std::vector<RatioRow> rows;
    rows.reserve(rhos.size());
    for (double rho : rhos) {
        RatioRow row;
        row.rho = rho;
        try {
            if (!(rho > 0.0 && rho < 1.0))
                throw std::invalid_argument("rho must lie in (0, 1)");
            double lambda = rho / cfg.dist.mean();
            std::uint64_t n = cfg.n_completions ? cfg.n_completions
                                                : default_sweep_completions(rho);
            SimOptions opts;
            opts.n_completions = n;
            opts.warmup_fraction = cfg.warmup_fraction;
            opts.record_jobs = false;

            std::vector<MeanResponse> est_k, est_1;
            for (std::uint64_t seed : cfg.seeds) {
                // One shared arrival stream per seed: both systems replay it.
                ArrivalSequence arr = ArrivalSequence::poisson(lambda, cfg.dist, seed);
                est_k.push_back(
                    mean_response(run({Policy::SRPT, 0.0}, cfg.k, arr, opts)));
                est_1.push_back(mean_response(run({Policy::SRPT, 0.0}, 1, arr, opts)));
            }
            CellEstimate ck = pool_seeds(est_k);
            CellEstimate c1 = pool_seeds(est_1);
            row.mean_T_k = ck.mean;
            row.ci_k = ck.ci;
            row.mean_T_1 = c1.mean;
            row.ci_1 = c1.ci;
            row.ratio_sim = ck.mean / c1.mean;

            LoadContext ctx(lambda, cfg.dist, cfg.k);
            double t1 = mean_over_sizes(
                ctx, [&](double x) { return srpt1_response_mean(ctx, x).total(); });
            double num_I =
                mean_over_sizes(ctx, [&](double x) { return bound_I(ctx, x); });
            double num_H =
                mean_over_sizes(ctx, [&](double x) { return bound_H(ctx, x); });
            row.ratio_bound_I = num_I / t1;
            row.ratio_bound_H = num_H / t1;
        } catch (const std::exception& e) {
            row.failed = true;
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    if (!cfg.out_csv.empty()) write_ratio_csv(cfg.out_csv, rows);
    if (!cfg.out_svg.empty()) write_ratio_svg(cfg.out_svg, rows);
    return rows;
}

void write_ratio_csv(const std::string& path, const std::vector<RatioRow>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << "rho,mean_T_k,ci_k,mean_T_1,ci_1,ratio_sim,ratio_bound_I,ratio_bound_H,"
           "failed,error\n";
    for (const RatioRow& r : rows) {
        out << fmt(r.rho) << ',' << fmt(r.mean_T_k) << ',' << fmt(r.ci_k) << ','
            << fmt(r.mean_T_1) << ',' << fmt(r.ci_1) << ',' << fmt(r.ratio_sim) << ','
            << fmt(r.ratio_bound_I) << ',' << fmt(r.ratio_bound_H) << ','
            << (r.failed ? 1 : 0) << ',' << r.error << '\n';
    }
}

std::vector<RatioRow> read_ratio_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty csv: " + path);
    std::vector<RatioRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string tok;
        std::vector<std::string> f;
        while (std::getline(ss, tok, ',')) f.push_back(tok);
        // The error message may itself contain commas; rejoin the tail.
        if (f.size() < 9) throw std::runtime_error("malformed csv row: " + line);
        RatioRow r;
        r.rho = std::stod(f[0]);
        r.mean_T_k = std::stod(f[1]);
        r.ci_k = std::stod(f[2]);
        r.mean_T_1 = std::stod(f[3]);
        r.ci_1 = std::stod(f[4]);
        r.ratio_sim = std::stod(f[5]);
        r.ratio_bound_I = std::stod(f[6]);
        r.ratio_bound_H = std::stod(f[7]);
        r.failed = std::stoi(f[8]) != 0;
        for (std::size_t i = 9; i < f.size(); ++i)
            r.error += (i > 9 ? "," : "") + f[i];
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_ratio_svg(const std::string& path, const std::vector<RatioRow>& rows) {
    constexpr int W = 640, H = 420, ML = 60, MR = 20, MT = 20, MB = 50;
    std::vector<const RatioRow*> ok;
    for (const RatioRow& r : rows)
        if (!r.failed) ok.push_back(&r);

    double x0 = 0.0, x1 = 1.0, y0 = 1.0, y1 = 1.0;
    for (const RatioRow* r : ok) {
        y1 = std::max({y1, r->ratio_sim, r->ratio_bound_I});
        y0 = std::min({y0, r->ratio_sim, r->ratio_bound_I});
    }
    y1 *= 1.05;
    y0 = std::min(y0, 0.9);
    auto px = [&](double rho) {
        return ML + (rho - x0) / (x1 - x0) * (W - ML - MR);
    };
    auto py = [&](double v) { return H - MB - (v - y0) / (y1 - y0) * (H - MT - MB); };

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\""
        << H << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
    out << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    // axes
    out << "<line x1=\"" << ML << "\" y1=\"" << H - MB << "\" x2=\"" << W - MR
        << "\" y2=\"" << H - MB << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << ML << "\" y1=\"" << MT << "\" x2=\"" << ML << "\" y2=\""
        << H - MB << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        double rho = x0 + (x1 - x0) * i / 5.0;
        out << "<text x=\"" << fmt(px(rho)) << "\" y=\"" << H - MB + 18
            << "\" font-size=\"11\" text-anchor=\"middle\">" << fmt(rho) << "</text>\n";
        double v = y0 + (y1 - y0) * i / 5.0;
        out << "<text x=\"" << ML - 6 << "\" y=\"" << fmt(py(v) + 4)
            << "\" font-size=\"11\" text-anchor=\"end\">" << fmt(std::round(v * 100) / 100)
            << "</text>\n";
    }
    out << "<text x=\"" << (ML + W - MR) / 2 << "\" y=\"" << H - 12
        << "\" font-size=\"12\" text-anchor=\"middle\">load</text>\n";

    auto polyline = [&](const char* color, auto get) {
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (const RatioRow* r : ok)
            out << fmt(px(r->rho)) << ',' << fmt(py(get(*r))) << ' ';
        out << "\"/>\n";
    };
    polyline("#1f77b4", [](const RatioRow& r) { return r.ratio_sim; });
    polyline("#d62728", [](const RatioRow& r) { return r.ratio_bound_I; });
    // legend
    out << "<line x1=\"" << ML + 10 << "\" y1=\"" << MT + 12 << "\" x2=\"" << ML + 40
        << "\" y2=\"" << MT + 12 << "\" stroke=\"#1f77b4\" stroke-width=\"1.5\"/>\n"
        << "<text x=\"" << ML + 46 << "\" y=\"" << MT + 16
        << "\" font-size=\"12\">simulated ratio E[T_k]/E[T_1]</text>\n"
        << "<line x1=\"" << ML + 10 << "\" y1=\"" << MT + 30 << "\" x2=\"" << ML + 40
        << "\" y2=\"" << MT + 30 << "\" stroke=\"#d62728\" stroke-width=\"1.5\"/>\n"
        << "<text x=\"" << ML + 46 << "\" y=\"" << MT + 34
        << "\" font-size=\"12\">bound ratio E[I(S)]/E[T_1]</text>\n";
    out << "</svg>\n";
}

CounterexampleReport counterexample() {
    std::vector<Arrival> jobs{{0, 1}, {0, 1}, {0, 2}, {0, 2}};
    SimOptions opts;
    SimStats stats = run({Policy::SRPT, 0.0}, 2, ArrivalSequence::explicit_list(jobs), opts);
    CounterexampleReport rep;
    for (const JobRecord& j : stats.jobs) rep.srpt2_completions.push_back(j.completion);
    std::sort(rep.srpt2_completions.begin(), rep.srpt2_completions.end());
    rep.alt_completions = alt_schedule_counterexample();
    rep.srpt2_third = rep.srpt2_completions.at(2);
    rep.alt_third = rep.alt_completions.at(2);
    rep.ok = std::abs(rep.srpt2_third - 6.0) < 1e-12 &&
             std::abs(rep.alt_third - 4.0) < 1e-12;
    return rep;
}

}  // namespace mgk
