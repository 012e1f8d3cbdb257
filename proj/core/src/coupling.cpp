#include "mgk/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mgk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double static_bound(Policy p, int k, double x, double fb_quantum) {
    switch (p) {
        case Policy::SRPT: return k * x;
        case Policy::PSJF: return (k - 1) * x;
        case Policy::RS: return k * x;
        case Policy::FB: return (k - 1) * x + k * fb_quantum;
        default: return kInf;
    }
}

}  // namespace

PolicyPair standard_pair(Policy p, double fb_quantum, bool rs_remaining_threshold) {
    Relevance rel = default_relevance(p);
    if (p == Policy::RS && rs_remaining_threshold) rel = Relevance::RemainingLeX;
    PolicySpec spec{p, fb_quantum};
    return {spec, spec, rel, rel};
}

PolicyPair improved_pair() {
    return {PolicySpec{Policy::PSJF, 0.0}, PolicySpec{Policy::SRPT, 0.0},
            Relevance::OriginalLeX, Relevance::RemainingLeX};
}

std::vector<DeltaTrace> run_coupled(const PolicyPair& pair, int k,
                                    const std::vector<Arrival>& arrivals,
                                    const std::vector<double>& x_grid,
                                    const CoupledOptions& opts) {
    ArrivalSequence seq = ArrivalSequence::explicit_list(arrivals);
    SimOptions sim_opts;
    sim_opts.validate = opts.validate;
    Simulator s1(pair.sys1, 1, seq.cursor(), sim_opts);
    Simulator sk(pair.sysk, k, seq.cursor(), sim_opts);

    // The worst-case bound is only claimed for the same policy on both
    // sides with its standard relevance notion.
    bool mixed = pair.sys1.kind != pair.sysk.kind ||
                 pair.relk != default_relevance(pair.sysk.kind);
    std::vector<DeltaTrace> traces;
    traces.reserve(x_grid.size());
    for (double x : x_grid) {
        DeltaTrace t;
        t.policy = pair.sysk.kind;
        t.x = x;
        t.bound = mixed ? kInf
                        : static_bound(pair.sysk.kind, k, x, pair.sysk.fb_quantum);
        t.max_delta = 0.0;
        t.monotone_ok = true;
        traces.push_back(std::move(t));
    }
    std::vector<double> prev_delta(x_grid.size(), 0.0);
    std::vector<char> prev_many(x_grid.size(), 0);

    while (!(s1.done() && sk.done())) {
        double t = std::min(s1.next_event_time(), sk.next_event_time());
        for (double x : x_grid) {
            t = std::min(t, s1.next_crossing_time(x, pair.rel1));
            t = std::min(t, sk.next_crossing_time(x, pair.relk));
        }
        if (!std::isfinite(t)) break;
        s1.advance_to(std::min(t, s1.next_event_time()));
        sk.advance_to(std::min(t, sk.next_event_time()));
        if (s1.now() >= s1.next_event_time()) s1.process_due_events();
        if (sk.now() >= sk.next_event_time()) sk.process_due_events();

        for (std::size_t i = 0; i < x_grid.size(); ++i) {
            double x = x_grid[i];
            DeltaTrace& tr = traces[i];
            double w1 = s1.relevant_work(x, pair.rel1);
            double wk = sk.relevant_work(x, pair.relk);
            double delta = wk - w1;
            int rb = sk.relevant_busy(x, pair.relk);
            bool many = sk.relevant_count(x, pair.relk) >= k;
            tr.max_delta = std::max(tr.max_delta, delta);
            if (delta > tr.bound + opts.tolerance)
                tr.violations.push_back({t, delta, tr.bound});
            if (!mixed && pair.sysk.kind == Policy::SRPT && prev_many[i] && many &&
                delta > prev_delta[i] + opts.tolerance)
                tr.monotone_ok = false;
            if (opts.keep_events) tr.events.push_back({t, w1, wk, delta, rb, many});
            prev_delta[i] = delta;
            prev_many[i] = many;
        }
    }
    return traces;
}

ImprovedDeltaResult check_improved_delta(const DeltaTrace& trace) {
    if (trace.events.empty())
        throw std::invalid_argument("check_improved_delta: trace has no recorded events "
                                    "(run with keep_events)");
    ImprovedDeltaResult res{true, trace.events.front(), -kInf};
    for (const DeltaEvent& e : trace.events) {
        double margin = e.delta - trace.x * e.relbusy_k;
        if (margin > res.worst_margin) {
            res.worst_margin = margin;
            res.worst = e;
        }
    }
    res.ok = res.worst_margin <= 1e-9;
    return res;
}

std::vector<TaggedAudit> tagged_audit(const PolicySpec& policy, int k,
                                      const std::vector<Arrival>& arrivals) {
    ArrivalSequence seq = ArrivalSequence::explicit_list(arrivals);
    SimOptions opts;
    Simulator sim(policy, k, seq.cursor(), opts);

    struct Accum {
        double arrival, size;
        double tagged = 0, old_w = 0, new_w = 0, virt = 0;
    };
    std::unordered_map<std::uint64_t, Accum> live;
    std::vector<TaggedAudit> out;

    // Is ell relevant to a tagged job of size x under this policy's notion?
    // The SRPT cutoff uses the tagged job's original size (conservative).
    auto relevant = [&](const Simulator::Job& ell, double x) {
        switch (policy.kind) {
            case Policy::SRPT: return ell.remaining <= x + 1e-12;
            case Policy::PSJF: return ell.size <= x + 1e-12;
            case Policy::RS: return ell.size * ell.remaining <= x * x + 1e-12;
            case Policy::FB: return ell.attained <= x + 1e-12;
            default:
                throw std::invalid_argument("tagged_audit: no relevance notion for FCFS");
        }
    };
    // Earliest time > now at which ell's relevance w.r.t. cutoff x flips,
    // assuming ell stays in service.
    // Thresholds carry the same slack as relevant(); a candidate that fails
    // to advance the clock past now is dropped (otherwise the split loop
    // could stall on a sub-ulp interval).
    auto flip_time = [&](const Simulator::Job& ell, double x, double now) {
        double t = kInf;
        switch (policy.kind) {
            case Policy::SRPT:
                if (ell.remaining > x + 1e-12) t = now + k * (ell.remaining - x);
                break;
            case Policy::RS: {
                double r_cross = x * x / ell.size;
                if (ell.remaining > r_cross + 1e-12)
                    t = now + k * (ell.remaining - r_cross);
                break;
            }
            case Policy::FB:
                if (ell.attained < x - 1e-12) t = now + k * (x - ell.attained);
                break;
            default:
                break;
        }
        return t > now ? t : kInf;
    };

    while (!sim.done()) {
        double now = sim.now();
        double t = sim.next_event_time();
        if (!std::isfinite(t)) break;
        // Split the interval at every relevance flip of a served job against
        // any tagged job's cutoff, so classification is constant per piece.
        for (const auto& [jid, acc] : live) {
            for (std::uint64_t sid : sim.served()) {
                if (sid == jid) continue;
                t = std::min(t, flip_time(sim.jobs().at(sid), acc.size, now));
            }
        }
        double dt = t - now;
        if (dt > 0.0) {
            double share = dt / k;
            int idle = k - static_cast<int>(sim.served().size());
            for (auto& [jid, acc] : live) {
                acc.virt += idle * share;
                for (std::uint64_t sid : sim.served()) {
                    const Simulator::Job& ell = sim.jobs().at(sid);
                    if (sid == jid) {
                        acc.tagged += share;
                    } else if (relevant(ell, acc.size)) {
                        bool present_at_arrival =
                            ell.arrival < acc.arrival ||
                            (ell.arrival == acc.arrival && ell.id < jid);
                        (present_at_arrival ? acc.old_w : acc.new_w) += share;
                    } else {
                        acc.virt += share;
                    }
                }
            }
        }
        sim.advance_to(std::min(t, sim.next_event_time()));
        if (sim.now() >= sim.next_event_time()) sim.process_due_events();
        // Departures since the last step.
        for (auto it = live.begin(); it != live.end();) {
            if (!sim.jobs().count(it->first)) {
                const Accum& a = it->second;
                out.push_back({it->first, a.arrival, a.size, sim.now(), a.tagged,
                               a.old_w, a.new_w, a.virt});
                it = live.erase(it);
            } else {
                ++it;
            }
        }
        // New arrivals.
        for (const auto& [id, j] : sim.jobs())
            if (!live.count(id)) live[id] = {j.arrival, j.size};
    }
    std::sort(out.begin(), out.end(),
              [](const TaggedAudit& a, const TaggedAudit& b) {
                  return a.completion != b.completion ? a.completion < b.completion
                                                     : a.id < b.id;
              });
    return out;
}

}  // namespace mgk
