#pragma once

#include <vector>

#include "mgk/sim.hpp"

namespace mgk {

// One evaluation point of a coupled pair of systems: relevant work in each,
// their difference, and System k's relevant-server count, recorded at the
// union of both systems' event and relevance-crossing times.
struct DeltaEvent {
    double time;
    double relwork_1;
    double relwork_k;
    double delta;
    int relbusy_k;
    bool many_jobs;  // System k has >= k relevant jobs
};

struct DeltaViolation {
    double time;
    double delta;
    double bound;
};

// System 1 (one speed-1 server) vs System k (k speed-1/k servers) on a
// shared arrival sequence, with a relevance notion per side.
struct PolicyPair {
    PolicySpec sys1;
    PolicySpec sysk;
    Relevance rel1;
    Relevance relk;
};

// Same policy on both sides, standard relevance. rs_remaining_threshold
// switches the RS relevance from the product cutoff x^2 to the coarser
// remaining <= x.
PolicyPair standard_pair(Policy p, double fb_quantum = 0.0,
                         bool rs_remaining_threshold = false);

// PSJF-1 against SRPT-k, for the per-event delta-vs-relevant-servers check.
PolicyPair improved_pair();

struct CoupledOptions {
    bool keep_events = false;  // retain the full per-x event list
    bool validate = false;
    // Worst-case delta bound per unit x: filled by run_coupled from the
    // pair's policy; quantum slack is added for FB.
    double tolerance = 1e-9;
};

struct DeltaTrace {
    Policy policy;  // System k's policy
    double x;
    double bound;      // static worst-case bound on delta (inf for improved pair)
    double max_delta;
    bool monotone_ok;  // delta nonincreasing across many-jobs intervals (SRPT)
    std::vector<DeltaViolation> violations;
    std::vector<DeltaEvent> events;  // only when keep_events
};

// Run the two systems on the identical finite arrival list until both are
// empty; record delta at every event or relevance crossing of either system,
// once per x. For same-policy pairs, violations collect the points where
// delta exceeds the worst-case bound (kx for SRPT and RS, (k-1)x for PSJF,
// (k-1)x plus k*quantum discretization slack for FB).
std::vector<DeltaTrace> run_coupled(const PolicyPair& pair, int k,
                                    const std::vector<Arrival>& arrivals,
                                    const std::vector<double>& x_grid,
                                    const CoupledOptions& opts = {});

struct ImprovedDeltaResult {
    bool ok;
    DeltaEvent worst;   // event with the largest delta - x*relbusy_k margin
    double worst_margin;
};

// Check delta <= x * relbusy_k at every recorded event of a trace produced
// with improved_pair(). Requires keep_events.
ImprovedDeltaResult check_improved_delta(const DeltaTrace& trace);

// Per-completed-job work decomposition in a single k-server system: the
// capacity elapsed during the job's sojourn split into serving the job
// itself, serving relevant jobs present at its arrival, serving relevant
// jobs that arrived later, and virtual work (idling or irrelevant service).
struct TaggedAudit {
    std::uint64_t id;
    double arrival;
    double size;
    double completion;
    double tagged_work;
    double old_work;
    double new_work;
    double virt_work;
    double response() const { return completion - arrival; }
    double total_work() const {
        return tagged_work + old_work + new_work + virt_work;
    }
};

std::vector<TaggedAudit> tagged_audit(const PolicySpec& policy, int k,
                                      const std::vector<Arrival>& arrivals);

}  // namespace mgk
