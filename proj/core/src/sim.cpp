#include "mgk/sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mgk {

namespace {

constexpr double kCompleteEps = 1e-12;
constexpr double kRelEps = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

// ---------------------------------------------------------------- arrivals

ArrivalSequence ArrivalSequence::explicit_list(std::vector<Arrival> jobs) {
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (!(jobs[i].size > 0.0)) throw std::invalid_argument("arrival sizes must be > 0");
        if (i > 0 && jobs[i].time < jobs[i - 1].time)
            throw std::invalid_argument("arrival times must be nondecreasing");
    }
    ArrivalSequence seq;
    seq.sampled_ = false;
    seq.jobs_ = std::move(jobs);
    return seq;
}

ArrivalSequence ArrivalSequence::poisson(double lambda, ServiceDist dist,
                                         std::uint64_t seed) {
    if (!(lambda > 0.0)) throw std::invalid_argument("poisson: lambda must be > 0");
    ArrivalSequence seq;
    seq.sampled_ = true;
    seq.lambda_ = lambda;
    seq.dist_ = std::move(dist);
    seq.seed_ = seed;
    return seq;
}

ArrivalSequence::Cursor::Cursor(const ArrivalSequence* seq) : seq_(seq) {
    if (seq_->sampled_) rng_.emplace(seq_->seed_);
}

bool ArrivalSequence::Cursor::next(Arrival& out) {
    if (seq_->sampled_) {
        clock_ += rng_->exponential(seq_->lambda_);
        out = {clock_, seq_->dist_->sample(*rng_)};
        return true;
    }
    if (idx_ >= seq_->jobs_.size()) return false;
    out = seq_->jobs_[idx_++];
    return true;
}

std::vector<Arrival> ArrivalSequence::take(std::size_t n) const {
    std::vector<Arrival> out;
    out.reserve(n);
    Cursor c = cursor();
    Arrival a;
    while (out.size() < n && c.next(a)) out.push_back(a);
    return out;
}

Relevance default_relevance(Policy p) {
    switch (p) {
        case Policy::SRPT: return Relevance::RemainingLeX;
        case Policy::PSJF: return Relevance::OriginalLeX;
        case Policy::RS: return Relevance::ProductLeX2;
        case Policy::FB: return Relevance::TruncatedAge;
        default: return Relevance::RemainingLeX;
    }
}

// ---------------------------------------------------------------- simulator

Simulator::Simulator(PolicySpec policy, int k, ArrivalSequence::Cursor cursor,
                     SimOptions opts)
    : policy_(policy), k_(k), cursor_(cursor), opts_(std::move(opts)) {
    if (k_ < 1) throw std::invalid_argument("Simulator: k must be >= 1");
    if (policy_.kind == Policy::FB && !(policy_.fb_quantum > 0.0))
        throw std::invalid_argument("Simulator: FB requires a positive fb_quantum");
    if (!opts_.record_jobs) {
        if (opts_.n_completions == 0)
            throw std::invalid_argument("Simulator: streaming stats need n_completions");
        std::size_t warm = static_cast<std::size_t>(
            opts_.warmup_fraction * static_cast<double>(opts_.n_completions));
        stream_warmup_ = warm;
        stream_per_batch_ =
            std::max<std::uint64_t>(1, (opts_.n_completions - warm) / opts_.batches);
        stats_.batch_acc.push_back(
            {std::nullopt, std::vector<double>(opts_.batches, 0.0),
             std::vector<std::uint64_t>(opts_.batches, 0)});
        for (const auto& bin : opts_.size_bins)
            stats_.batch_acc.push_back(
                {bin, std::vector<double>(opts_.batches, 0.0),
                 std::vector<std::uint64_t>(opts_.batches, 0)});
    }
    Arrival a;
    if (cursor_.next(a)) pending_arrival_ = a;
    else arrivals_exhausted_ = true;
    std::size_t g = opts_.x_grid.size();
    wait_sum_le_.assign(g, 0.0);
    wait_sum_bar_.assign(g, 0.0);
    int_relwork_le_.assign(g, 0.0);
    int_relwork_bar_.assign(g, 0.0);
    int_relbusy_le_.assign(g, 0.0);
}

bool Simulator::done() const {
    if (opts_.n_completions > 0 && n_completed_ >= opts_.n_completions) return true;
    return arrivals_exhausted_ && !pending_arrival_ && jobs_.empty();
}

double Simulator::next_event_time() const {
    if (done()) return kInf;
    double t = kInf;
    if (pending_arrival_) t = std::min(t, pending_arrival_->time);
    double min_rem = kInf;
    for (std::uint64_t id : served_) min_rem = std::min(min_rem, jobs_.at(id).remaining);
    if (min_rem < kInf) t = std::min(t, now_ + k_ * min_rem);
    if (policy_.kind == Policy::FB && !served_.empty())
        t = std::min(t, last_resched_ + k_ * policy_.fb_quantum);
    return t;
}

double Simulator::next_crossing_time(double x, Relevance mode) const {
    double t = kInf;
    for (std::uint64_t id : served_) {
        const Job& j = jobs_.at(id);
        switch (mode) {
            case Relevance::RemainingLeX:
                if (j.remaining > x) t = std::min(t, now_ + k_ * (j.remaining - x));
                break;
            case Relevance::OriginalLeX:
                break;
            case Relevance::ProductLeX2: {
                double r_cross = x * x / j.size;
                if (j.remaining > r_cross)
                    t = std::min(t, now_ + k_ * (j.remaining - r_cross));
                break;
            }
            case Relevance::TruncatedAge: {
                double trunc = std::min(j.remaining, std::max(0.0, x - j.attained));
                if (trunc > 0.0) t = std::min(t, now_ + k_ * trunc);
                break;
            }
        }
    }
    return t > now_ ? t : kInf;
}

double Simulator::current_priority(const Job& j) const {
    switch (policy_.kind) {
        case Policy::SRPT: return j.remaining;
        case Policy::PSJF: return j.size;
        case Policy::RS: return j.size * j.remaining;
        case Policy::FB: return j.attained;
        case Policy::FCFS: return j.arrival;
    }
    return 0.0;
}

Simulator::WaitKey Simulator::make_key(const Job& j) {
    if (policy_.kind == Policy::FB)
        return {j.attained, static_cast<double>(rr_seq_), j.id};
    return {current_priority(j), j.arrival, j.id};
}

void Simulator::track_waiting_add(const Job& j, double sign) {
    for (std::size_t i = 0; i < opts_.x_grid.size(); ++i) {
        double x = opts_.x_grid[i];
        if (j.remaining <= x) wait_sum_le_[i] += sign * j.remaining;
        double trunc = std::min(j.remaining, std::max(0.0, x - j.attained));
        wait_sum_bar_[i] += sign * trunc;
    }
}

void Simulator::enqueue_waiting(Job&& j) {
    WaitKey key = make_key(j);
    ++rr_seq_;
    track_waiting_add(j, +1.0);
    waiting_keys_[j.id] = key;
    jobs_[j.id] = j;
    waiting_.insert(key);
}

Simulator::Job Simulator::dequeue_waiting(std::set<WaitKey>::iterator it) {
    std::uint64_t id = it->tie2;
    waiting_.erase(it);
    waiting_keys_.erase(id);
    Job& j = jobs_.at(id);
    track_waiting_add(j, -1.0);
    return j;
}

void Simulator::reschedule() {
    // Fill free servers from the head of the waiting order.
    while (static_cast<int>(served_.size()) < k_ && !waiting_.empty()) {
        Job j = dequeue_waiting(waiting_.begin());
        served_.push_back(j.id);
    }
    // Preempt while some waiting job strictly beats the worst served job.
    while (!waiting_.empty()) {
        auto worst = served_.end();
        WaitKey worst_key{-kInf, 0.0, 0};
        for (auto it = served_.begin(); it != served_.end(); ++it) {
            const Job& j = jobs_.at(*it);
            WaitKey key{current_priority(j), j.arrival, j.id};
            if (policy_.kind == Policy::FB) key = {j.attained, j.arrival, j.id};
            if (worst == served_.end() || worst_key < key) {
                worst = it;
                worst_key = key;
            }
        }
        if (worst == served_.end()) break;
        const WaitKey& best = *waiting_.begin();
        if (!(best < worst_key)) break;
        // Demote the worst served job (re-key with its current state).
        Job& demoted = jobs_.at(*worst);
        served_.erase(worst);
        WaitKey key = make_key(demoted);
        ++rr_seq_;
        track_waiting_add(demoted, +1.0);
        waiting_keys_[demoted.id] = key;
        waiting_.insert(key);
        Job j = dequeue_waiting(waiting_.begin());
        served_.push_back(j.id);
    }
}

void Simulator::fb_requantum() {
    // Demote everyone and refill: equal-age cohort members rotate because a
    // fresh round-robin sequence number is assigned on every enqueue.
    std::vector<std::uint64_t> ids = served_;
    served_.clear();
    for (std::uint64_t id : ids) {
        Job& j = jobs_.at(id);
        WaitKey key = make_key(j);
        ++rr_seq_;
        track_waiting_add(j, +1.0);
        waiting_keys_[id] = key;
        waiting_.insert(key);
    }
    reschedule();
}

void Simulator::complete_job(std::uint64_t id) {
    Job& j = jobs_.at(id);
    if (opts_.record_jobs) {
        stats_.jobs.push_back({j.id, j.arrival, j.size, now_});
    } else if (n_completed_ >= stream_warmup_) {
        std::uint64_t idx = n_completed_ - stream_warmup_;
        int b = std::min<int>(opts_.batches - 1,
                              static_cast<int>(idx / stream_per_batch_));
        double resp = now_ - j.arrival;
        for (auto& acc : stats_.batch_acc) {
            if (acc.bin && (j.size < acc.bin->first || j.size > acc.bin->second))
                continue;
            acc.sums[b] += resp;
            acc.counts[b] += 1;
        }
    }
    total_completed_work_ += j.size;
    served_.erase(std::find(served_.begin(), served_.end(), id));
    jobs_.erase(id);
    ++n_completed_;
}

void Simulator::integrate_interval(double dt) {
    if (dt <= 0.0 || opts_.x_grid.empty()) return;
    double inv2k = 1.0 / (2.0 * k_);
    for (std::size_t i = 0; i < opts_.x_grid.size(); ++i) {
        double x = opts_.x_grid[i];
        double acc_le = wait_sum_le_[i] * dt;
        double acc_bar = wait_sum_bar_[i] * dt;
        double acc_busy = 0.0;
        for (std::uint64_t id : served_) {
            const Job& j = jobs_.at(id);
            double r0 = j.remaining;
            // remaining <= x contribution; a job above the cutoff crosses it
            // at s* = k (r0 - x) and contributes from there on.
            if (r0 <= x) {
                acc_le += r0 * dt - dt * dt * inv2k;
            } else {
                double s_star = k_ * (r0 - x);
                if (s_star < dt) {
                    double w = dt - s_star;
                    acc_le += x * w - w * w * inv2k;
                }
            }
            // server-count relevance is by original size, so it is constant
            // over the interval; its time average is k rho_{<=x}.
            if (j.size <= x) acc_busy += dt;
            // truncated (age cutoff x) contribution: decreases at rate 1/k
            // until it hits zero.
            double trunc = std::min(r0, std::max(0.0, x - j.attained));
            if (trunc > 0.0) {
                double span = std::min(dt, k_ * trunc);
                acc_bar += trunc * span - span * span * inv2k;
            }
        }
        int_relwork_le_[i] += acc_le;
        int_relwork_bar_[i] += acc_bar;
        int_relbusy_le_[i] += acc_busy;
    }
}

void Simulator::advance_to(double t) {
    double dt = t - now_;
    if (dt < 0.0) throw std::logic_error("advance_to: time must not go backwards");
    if (dt == 0.0) return;
    integrate_interval(dt);
    double ds = dt / k_;
    for (std::uint64_t id : served_) {
        Job& j = jobs_.at(id);
        j.remaining = std::max(0.0, j.remaining - ds);
        j.attained += ds;
    }
    now_ = t;
}

void Simulator::validate_served_set() const {
    if (waiting_.empty() || served_.empty()) return;
    const WaitKey& best = *waiting_.begin();
    for (std::uint64_t id : served_) {
        const Job& j = jobs_.at(id);
        if (policy_.kind == Policy::FB) {
            // Quantum discretization: a served job may trail the best waiting
            // job by up to one quantum of age.
            if (j.attained > best.priority + policy_.fb_quantum + 1e-9)
                throw std::logic_error("FB served-set invariant violated");
        } else {
            WaitKey key{current_priority(j), j.arrival, j.id};
            if (best < key && best.priority < key.priority - 1e-12)
                throw std::logic_error("served-set priority invariant violated");
        }
    }
}

void Simulator::process_due_events() {
    if (opts_.validate) validate_served_set();
    bool any = false;
    // Completions due now.
    std::vector<std::uint64_t> finished;
    for (std::uint64_t id : served_) {
        const Job& j = jobs_.at(id);
        // The rounding guard catches remainders too small to advance the
        // clock past now (otherwise the event loop would stall).
        if (j.remaining <= kCompleteEps || now_ + k_ * j.remaining <= now_)
            finished.push_back(id);
    }
    std::sort(finished.begin(), finished.end());
    for (std::uint64_t id : finished) {
        complete_job(id);
        any = true;
    }
    // Arrivals due now.
    while (pending_arrival_ && pending_arrival_->time <= now_ + 0.0) {
        Job j{next_id_++, pending_arrival_->time, pending_arrival_->size,
              pending_arrival_->size, 0.0};
        total_arrived_work_ += j.size;
        enqueue_waiting(std::move(j));
        Arrival a;
        if (cursor_.next(a)) pending_arrival_ = a;
        else { pending_arrival_.reset(); arrivals_exhausted_ = true; }
        any = true;
    }
    // FB quantum expiry.
    if (policy_.kind == Policy::FB && !served_.empty() &&
        now_ >= last_resched_ + k_ * policy_.fb_quantum - 1e-12) {
        fb_requantum();
        any = true;
    }
    if (any) {
        reschedule();
        last_resched_ = now_;
    }
}

void Simulator::step() {
    double t = next_event_time();
    if (t == kInf) return;
    advance_to(t);
    process_due_events();
}

void Simulator::run_all() {
    while (!done()) step();
}

SimStats Simulator::take_stats() {
    if (opts_.validate) {
        double in_system = 0.0;
        for (const auto& [id, j] : jobs_) in_system += j.remaining;
        double attained_total = 0.0;
        for (const auto& [id, j] : jobs_) attained_total += j.attained;
        double balance = total_arrived_work_ - total_completed_work_ - in_system -
                         attained_total;
        if (std::abs(balance) > 1e-9)
            throw std::logic_error("work conservation accounting violated");
    }
    stats_.end_time = now_;
    stats_.warmup_count =
        opts_.record_jobs
            ? static_cast<std::size_t>(opts_.warmup_fraction *
                                       static_cast<double>(stats_.jobs.size()))
            : stream_warmup_;
    stats_.batches = opts_.batches;
    stats_.traj.x_grid = opts_.x_grid;
    std::size_t g = opts_.x_grid.size();
    stats_.traj.relwork_le.assign(g, 0.0);
    stats_.traj.relwork_bar.assign(g, 0.0);
    stats_.traj.relbusy_le.assign(g, 0.0);
    if (now_ > 0.0) {
        for (std::size_t i = 0; i < g; ++i) {
            stats_.traj.relwork_le[i] = int_relwork_le_[i] / now_;
            stats_.traj.relwork_bar[i] = int_relwork_bar_[i] / now_;
            stats_.traj.relbusy_le[i] = int_relbusy_le_[i] / now_;
        }
    }
    return std::move(stats_);
}

double Simulator::relevant_work(double x, Relevance mode) const {
    double sum = 0.0;
    for (const auto& [id, j] : jobs_) {
        switch (mode) {
            case Relevance::RemainingLeX:
                if (j.remaining <= x + kRelEps) sum += j.remaining;
                break;
            case Relevance::OriginalLeX:
                if (j.size <= x + kRelEps) sum += j.remaining;
                break;
            case Relevance::ProductLeX2:
                if (j.size * j.remaining <= x * x + kRelEps) sum += j.remaining;
                break;
            case Relevance::TruncatedAge:
                sum += std::min(j.remaining, std::max(0.0, x - j.attained));
                break;
        }
    }
    return sum;
}

int Simulator::relevant_count(double x, Relevance mode) const {
    int n = 0;
    for (const auto& [id, j] : jobs_) {
        switch (mode) {
            case Relevance::RemainingLeX:
                n += j.remaining <= x + kRelEps;
                break;
            case Relevance::OriginalLeX:
                n += j.size <= x + kRelEps;
                break;
            case Relevance::ProductLeX2:
                n += j.size * j.remaining <= x * x + kRelEps;
                break;
            case Relevance::TruncatedAge:
                n += std::min(j.remaining, std::max(0.0, x - j.attained)) > kRelEps;
                break;
        }
    }
    return n;
}

int Simulator::relevant_busy(double x, Relevance mode) const {
    int n = 0;
    for (std::uint64_t id : served_) {
        const Job& j = jobs_.at(id);
        switch (mode) {
            case Relevance::RemainingLeX:
                n += j.remaining <= x + kRelEps;
                break;
            case Relevance::OriginalLeX:
                n += j.size <= x + kRelEps;
                break;
            case Relevance::ProductLeX2:
                n += j.size * j.remaining <= x * x + kRelEps;
                break;
            case Relevance::TruncatedAge:
                n += std::min(j.remaining, std::max(0.0, x - j.attained)) > kRelEps;
                break;
        }
    }
    return n;
}

SimStats run(const PolicySpec& policy, int k, const ArrivalSequence& arrivals,
             const SimOptions& opts) {
    if (arrivals.is_sampled()) {
        if (opts.n_completions == 0)
            throw std::invalid_argument("run: sampled sequences need n_completions");
        double rho = arrivals.lambda() * arrivals.dist()->mean();
        if (!(rho < 1.0))
            throw std::invalid_argument("run: unstable arrival process (rho >= 1)");
    }
    Simulator sim(policy, k, arrivals.cursor(), opts);
    sim.run_all();
    return sim.take_stats();
}

// ------------------------------------------------------------- estimation

namespace {

// Two-sided 95% Student-t quantile.
double t_quantile_975(int df) {
    static const double table[] = {
        12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
        2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
        2.080,  2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042,
        2.040,  2.037, 2.035, 2.032, 2.030, 2.028, 2.026, 2.024, 2.023, 2.021};
    if (df < 1) return 12.706;
    if (df <= 40) return table[df - 1];
    return 1.96 + 2.4 / df;
}

}  // namespace

namespace {

MeanResponse from_batch_means(const std::vector<double>& means, double grand_mean,
                              std::size_t total_count) {
    MeanResponse out;
    out.count = total_count;
    if (means.size() < 2) {
        out.insufficient = true;
        out.mean = grand_mean;
        return out;
    }
    double center = 0.0;
    for (double m : means) center += m;
    center /= static_cast<double>(means.size());
    double var = 0.0;
    for (double m : means) var += (m - center) * (m - center);
    var /= static_cast<double>(means.size() - 1);
    out.mean = grand_mean;
    out.ci_halfwidth = t_quantile_975(static_cast<int>(means.size()) - 1) *
                       std::sqrt(var / static_cast<double>(means.size()));
    return out;
}

}  // namespace

MeanResponse mean_response(const SimStats& stats,
                           std::optional<std::pair<double, double>> size_bin) {
    if (stats.jobs.empty() && !stats.batch_acc.empty()) {
        for (const auto& acc : stats.batch_acc) {
            if (acc.bin != size_bin) continue;
            std::vector<double> means;
            double total = 0.0;
            std::uint64_t n = 0;
            for (std::size_t b = 0; b < acc.sums.size(); ++b) {
                if (acc.counts[b] == 0) continue;
                means.push_back(acc.sums[b] / static_cast<double>(acc.counts[b]));
                total += acc.sums[b];
                n += acc.counts[b];
            }
            double grand = n > 0 ? total / static_cast<double>(n) : 0.0;
            return from_batch_means(means, grand, n);
        }
        throw std::invalid_argument("mean_response: bin was not tracked by this run");
    }
    std::vector<double> responses;
    responses.reserve(stats.jobs.size());
    for (std::size_t i = stats.warmup_count; i < stats.jobs.size(); ++i) {
        const JobRecord& j = stats.jobs[i];
        if (size_bin && (j.size < size_bin->first || j.size > size_bin->second)) continue;
        responses.push_back(j.response());
    }
    MeanResponse out;
    out.count = responses.size();
    int b = std::max(2, stats.batches);
    if (responses.size() < static_cast<std::size_t>(2 * b)) {
        b = static_cast<int>(responses.size() / 2);
        if (b < 2) {
            out.insufficient = true;
            if (!responses.empty()) {
                double s = 0.0;
                for (double r : responses) s += r;
                out.mean = s / static_cast<double>(responses.size());
            }
            return out;
        }
    }
    std::size_t per = responses.size() / b;
    std::vector<double> means(b, 0.0);
    for (int i = 0; i < b; ++i) {
        double s = 0.0;
        for (std::size_t j = i * per; j < (i + 1) * per; ++j) s += responses[j];
        means[i] = s / static_cast<double>(per);
    }
    double grand = 0.0;
    for (double m : means) grand += m;
    grand /= b;
    double var = 0.0;
    for (double m : means) var += (m - grand) * (m - grand);
    var /= (b - 1);
    out.mean = grand;
    out.ci_halfwidth = t_quantile_975(b - 1) * std::sqrt(var / b);
    return out;
}

double relbusy_avg(const SimStats& stats, double x) {
    for (std::size_t i = 0; i < stats.traj.x_grid.size(); ++i)
        if (stats.traj.x_grid[i] == x) return stats.traj.relbusy_le[i];
    throw std::invalid_argument("relbusy_avg: x is not a grid point of this run");
}

std::vector<double> alt_schedule_counterexample() {
    // Server A: size-2 job over [0, 4). Server B: the two size-1 jobs over
    // [0, 2) and [2, 4). Servers run at rate 1/2, so a size-s job takes 2s.
    return {2.0, 4.0, 4.0};
}

}  // namespace mgk
