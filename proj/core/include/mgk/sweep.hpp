#pragma once

#include <string>
#include <vector>

#include "mgk/analytic.hpp"
#include "mgk/sim.hpp"

namespace mgk {

// Load-sweep experiment: for each rho, simulate SRPT-k and SRPT-1 on the
// same arrival sequence (common random numbers) and evaluate the analytic
// bound ratios.
struct SweepConfig {
    int k = 10;
    ServiceDist dist;
    std::vector<double> rho_grid;
    std::vector<std::uint64_t> seeds{1};
    std::uint64_t n_completions = 0;  // 0: ceil(5e5 / (1 - rho)), capped at 5e7
    double warmup_fraction = 0.2;
    std::string out_csv;
    std::string out_svg;

    explicit SweepConfig(ServiceDist d) : dist(std::move(d)) {}
};

struct RatioRow {
    double rho = 0.0;
    double mean_T_k = 0.0;
    double ci_k = 0.0;
    double mean_T_1 = 0.0;
    double ci_1 = 0.0;
    double ratio_sim = 0.0;
    double ratio_bound_I = 0.0;
    double ratio_bound_H = 0.0;
    bool failed = false;
    std::string error;
};

std::uint64_t default_sweep_completions(double rho);

// Rows sorted by rho; a per-cell failure flags the row and the sweep
// continues. Writes CSV/SVG when the paths are set.
std::vector<RatioRow> sweep_ratio(const SweepConfig& cfg);

void write_ratio_csv(const std::string& path, const std::vector<RatioRow>& rows);
std::vector<RatioRow> read_ratio_csv(const std::string& path);
void write_ratio_svg(const std::string& path, const std::vector<RatioRow>& rows);

// Fixed two-server regression scenario: jobs of sizes 1, 1, 2, 2 arriving
// at time 0. SRPT on two servers finishes its third job at time 6; the
// fixed alternative schedule finishes its third job at time 4.
struct CounterexampleReport {
    std::vector<double> srpt2_completions;
    std::vector<double> alt_completions;
    double srpt2_third = 0.0;
    double alt_third = 0.0;
    bool ok = false;
};

CounterexampleReport counterexample();

}  // namespace mgk
