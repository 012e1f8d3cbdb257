#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <unordered_map>
#include <vector>

#include "mgk/analytic.hpp"
#include "mgk/dist.hpp"
#include "mgk/rng.hpp"

namespace mgk {

struct Arrival {
    double time;
    double size;
};

// Scheduling discipline. fb_quantum (size-units of served progress between
// re-evaluations) is required for FB; ties everywhere break by arrival time
// then id, except FB which rotates round-robin within an equal-age cohort.
struct PolicySpec {
    Policy kind = Policy::SRPT;
    double fb_quantum = 0.0;
};

// Arrival process: either an explicit job list or a lazy seeded Poisson
// stream with iid service requirements. Cursors are cheap and independent,
// so two coupled systems can replay the identical sequence.
class ArrivalSequence {
   public:
    static ArrivalSequence explicit_list(std::vector<Arrival> jobs);
    static ArrivalSequence poisson(double lambda, ServiceDist dist, std::uint64_t seed);

    class Cursor {
       public:
        // Returns false when an explicit sequence is exhausted; a Poisson
        // stream never is.
        bool next(Arrival& out);

       private:
        friend class ArrivalSequence;
        explicit Cursor(const ArrivalSequence* seq);
        const ArrivalSequence* seq_;
        std::size_t idx_ = 0;
        double clock_ = 0.0;
        std::optional<RngStream> rng_;
    };

    Cursor cursor() const { return Cursor(this); }
    bool is_sampled() const { return sampled_; }
    double lambda() const { return lambda_; }
    const std::optional<ServiceDist>& dist() const { return dist_; }

    // Materialize the first n arrivals (for coupled runs, which feed the
    // same finite sequence to both systems and run to empty).
    std::vector<Arrival> take(std::size_t n) const;

   private:
    ArrivalSequence() = default;
    bool sampled_ = false;
    std::vector<Arrival> jobs_;
    double lambda_ = 0.0;
    std::optional<ServiceDist> dist_;
    std::uint64_t seed_ = 0;
};

struct JobRecord {
    std::uint64_t id;
    double arrival;
    double size;
    double completion;
    double response() const { return completion - arrival; }
};

// Time-averaged relevant-work and relevant-busy trajectories on an x-grid,
// integrated exactly between events.
struct TrajectoryStats {
    std::vector<double> x_grid;
    std::vector<double> relwork_le;   // avg sum of remaining over jobs with remaining <= x
    std::vector<double> relwork_bar;  // avg sum of remaining truncated sizes (age cutoff x)
    std::vector<double> relbusy_le;   // avg # servers serving jobs of original size <= x
};

// Streaming batch-means accumulator for one size bin (no bin = all sizes).
// Used instead of per-job records when a run is too long to keep them all.
struct BatchAccumulator {
    std::optional<std::pair<double, double>> bin;
    std::vector<double> sums;
    std::vector<std::uint64_t> counts;
};

struct SimStats {
    std::vector<JobRecord> jobs;  // completion order; empty when streaming
    double end_time = 0.0;
    std::size_t warmup_count = 0;
    int batches = 32;
    TrajectoryStats traj;
    std::vector<BatchAccumulator> batch_acc;  // streaming mode only
};

struct SimOptions {
    std::uint64_t n_completions = 0;  // 0: run explicit sequence to empty
    double warmup_fraction = 0.2;
    std::vector<double> x_grid;  // enables trajectory tracking
    bool validate = false;       // assert scheduling invariants at every event
    int batches = 32;
    // When false, per-job records are not kept; responses stream into
    // batch-means accumulators (the all-sizes one plus one per entry of
    // size_bins). Requires n_completions > 0.
    bool record_jobs = true;
    std::vector<std::pair<double, double>> size_bins;
};

// Which jobs count as relevant at cutoff x. RemainingLeX is the SRPT notion,
// OriginalLeX the PSJF notion, ProductLeX2 the RS notion with the threshold
// frozen at x^2, TruncatedAge the FB notion (contribution is the remaining
// truncated size).
enum class Relevance { RemainingLeX, OriginalLeX, ProductLeX2, TruncatedAge };

Relevance default_relevance(Policy p);

// Event-exact M/G/k simulator: k servers of rate 1/k, preempt-resume.
// Exposed directly (rather than only through run()) so the coupling harness
// can interleave two systems on a merged event clock.
class Simulator {
   public:
    struct Job {
        std::uint64_t id;
        double arrival;
        double size;
        double remaining;
        double attained;
    };

    Simulator(PolicySpec policy, int k, ArrivalSequence::Cursor cursor, SimOptions opts);

    double now() const { return now_; }
    bool done() const;
    std::uint64_t completions() const { return n_completed_; }

    // Next arrival/completion/quantum event; +inf once done.
    double next_event_time() const;

    // Earliest t > now at which a served job's relevance status or relevant
    // contribution slope changes for cutoff x; +inf if none before the next
    // event.
    double next_crossing_time(double x, Relevance mode) const;

    // Integrate state forward to t (t must not exceed next_event_time).
    void advance_to(double t);
    // Handle every event due exactly at now(); call after advance_to.
    void process_due_events();
    // advance + process in one step.
    void step();
    void run_all();

    // State queries at the current instant.
    double relevant_work(double x, Relevance mode) const;
    int relevant_count(double x, Relevance mode) const;
    int relevant_busy(double x, Relevance mode) const;
    std::size_t active_jobs() const { return jobs_.size(); }
    const std::unordered_map<std::uint64_t, Job>& jobs() const { return jobs_; }
    const std::vector<std::uint64_t>& served() const { return served_; }

    SimStats take_stats();

   private:
    struct WaitKey {
        double priority;
        double tie1;
        std::uint64_t tie2;
        bool operator<(const WaitKey& o) const {
            if (priority != o.priority) return priority < o.priority;
            if (tie1 != o.tie1) return tie1 < o.tie1;
            return tie2 < o.tie2;
        }
    };

    double current_priority(const Job& j) const;
    WaitKey make_key(const Job& j);
    void enqueue_waiting(Job&& j);
    Job dequeue_waiting(std::set<WaitKey>::iterator it);
    void reschedule();
    void fb_requantum();
    void complete_job(std::uint64_t id);
    void integrate_interval(double dt);
    void validate_served_set() const;
    void track_waiting_add(const Job& j, double sign);

    PolicySpec policy_;
    int k_;
    ArrivalSequence::Cursor cursor_;
    SimOptions opts_;

    double now_ = 0.0;
    std::uint64_t next_id_ = 0;
    std::uint64_t n_completed_ = 0;
    std::uint64_t rr_seq_ = 0;
    bool arrivals_exhausted_ = false;
    std::optional<Arrival> pending_arrival_;

    std::unordered_map<std::uint64_t, Job> jobs_;
    std::set<WaitKey> waiting_;                       // key -> job id in tie2
    std::unordered_map<std::uint64_t, WaitKey> waiting_keys_;
    std::vector<std::uint64_t> served_;
    double last_resched_ = 0.0;  // FB quantum anchor

    // streaming batch means
    std::size_t stream_warmup_ = 0;
    std::uint64_t stream_per_batch_ = 1;

    // accounting
    double total_arrived_work_ = 0.0;
    double total_completed_work_ = 0.0;

    // trajectory accumulators
    std::vector<double> wait_sum_le_;
    std::vector<double> wait_sum_bar_;
    std::vector<double> int_relwork_le_;
    std::vector<double> int_relwork_bar_;
    std::vector<double> int_relbusy_le_;

    SimStats stats_;
};

// Convenience wrapper: build, run to the stopping rule, return stats.
SimStats run(const PolicySpec& policy, int k, const ArrivalSequence& arrivals,
             const SimOptions& opts);

struct MeanResponse {
    double mean = 0.0;
    double ci_halfwidth = 0.0;
    std::size_t count = 0;
    bool insufficient = false;  // fewer than 2 batches with data
};

// Batch-means estimate over post-warm-up completions, optionally restricted
// to jobs with size in [bin_lo, bin_hi]. 95% CI from batch means.
MeanResponse mean_response(const SimStats& stats,
                           std::optional<std::pair<double, double>> size_bin = {});

// Time-average number of servers serving jobs of original size <= x; equals
// k rho_{<=x} in steady state. x must be a point of the run's x_grid.
double relbusy_avg(const SimStats& stats, double x);

// Fixed alternative schedule from the two-server counterexample scenario:
// one server runs a size-2 job over [0, 4), the other runs the size-1 jobs
// back to back. Returns completion times {2, 4, 4}.
std::vector<double> alt_schedule_counterexample();

}  // namespace mgk
