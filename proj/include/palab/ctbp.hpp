#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "palab/errors.hpp"
#include "palab/pa_function.hpp"
#include "palab/rng.hpp"
#include "palab/theory.hpp"
#include "palab/tree.hpp"

namespace palab {

/// SingleRoot: one ancestor whose birth rate is f(children + 1), i.e. the
/// root behaves as if it had a parent. TwoRoots: the seed edge 0-1 with two
/// independent processes, one per seed node, whose union is the original
/// tree model (each seed node's degree is its own children plus the seed edge).
enum class RootMode { SingleRoot, TwoRoots };

struct TrajectoryPoint {
    double t = 0.0;
    std::uint64_t z_total = 0;  // population
    std::uint64_t z_eq = 0;     // individuals with children + 1 == k
    std::uint64_t z_gt = 0;     // individuals with children + 1 > k

    friend bool operator==(const TrajectoryPoint&, const TrajectoryPoint&) = default;
};

struct Trajectory {
    Degree k = 1;
    std::vector<TrajectoryPoint> points;
    // final_counts[j] = number of individuals with children + 1 == j.
    std::vector<std::uint64_t> final_counts;

    friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

/// Continuous-time branching process in which an individual with c children
/// gives birth at rate f(c + 1). Each individual holds one pending birth
/// clock in a time-ordered queue; by memorylessness a clock is redrawn only
/// when it fires.
class BirthProcessSimulator {
public:
    BirthProcessSimulator(PAFunction f, RootMode mode, std::uint64_t seed, Degree tracked_k = 1,
                          std::uint64_t record_stride = 1)
        : f_(std::move(f)), rng_(seed), record_stride_(record_stride ? record_stride : 1) {
        if (tracked_k == 0) throw ConfigError("tracked degree must be >= 1");
        trajectory_.k = tracked_k;
        add_individual(kNoParent);
        if (mode == RootMode::TwoRoots) add_individual(0);
        record();
    }

    double time() const noexcept { return time_; }
    std::size_t population() const noexcept { return children_.size(); }

    /// F(G) = sum over individuals of f(children + 1).
    double total_rate() const {
        double total = 0.0;
        for (auto c : children_) total += f_(c + 1);
        return total;
    }

    /// Time of the next pending birth.
    double next_event_time() const { return queue_.top().first; }

    /// Fires the next birth and returns the waiting time since the previous event.
    double step() {
        const auto [when, x] = queue_.top();
        queue_.pop();
        const double wait = when - time_;
        time_ = when;
        const std::uint64_t before = ++children_[x];  // now holds c + 1 children
        // children + 1 moved from `before` to `before + 1`.
        --counts_[before];
        bump(before + 1);
        const Degree k = trajectory_.k;
        if (before == k) {
            --z_eq_;
            ++z_gt_;
        } else if (before + 1 == k) {
            ++z_eq_;
        }
        schedule(x);
        add_individual(x);
        if (++events_ % record_stride_ == 0) record();
        return wait;
    }

    void run_until_size(std::size_t n) {
        while (population() < n) step();
        finish();
    }

    /// Fires every birth with time <= t_end, then advances the clock to t_end.
    void run_until_time(double t_end) {
        while (queue_.top().first <= t_end) step();
        time_ = std::max(time_, t_end);
        finish();
    }

    /// Redraws every pending clock from the current time with a new stream.
    /// Valid by memorylessness; used to sample waiting times from a frozen state.
    void resample_clocks(std::uint64_t seed) {
        rng_.seed(seed);
        queue_ = {};
        for (NodeId x = 0; x < children_.size(); ++x) schedule(x);
    }

    const TreeSnapshot& tree() const noexcept { return tree_; }
    const Trajectory& trajectory() const noexcept { return trajectory_; }

private:
    using Event = std::pair<double, NodeId>;

    // The tree records `parent`; only step() changes child counts, so the
    // second seed node does not count as a child of node 0.
    void add_individual(NodeId parent) {
        const auto id = static_cast<NodeId>(children_.size());
        if (id == kNoParent) throw ConfigError("population exceeds the node id range");
        tree_.parent.push_back(parent);
        children_.push_back(0);
        bump(1);
        if (trajectory_.k == 1) ++z_eq_;
        schedule(id);
    }

    void schedule(NodeId x) {
        const double rate = f_(static_cast<Degree>(children_[x] + 1));
        if (!(rate > 0.0) || !std::isfinite(rate))
            throw NumericError("non-finite or non-positive birth rate at individual " +
                               std::to_string(x));
        queue_.emplace(time_ + exponential(rng_, rate), x);
    }

    void bump(std::uint64_t j) {
        if (j >= counts_.size()) counts_.resize(j + 1, 0);
        ++counts_[j];
    }

    void record() {
        trajectory_.points.push_back({time_, children_.size(), z_eq_, z_gt_});
    }

    void finish() {
        if (trajectory_.points.empty() || trajectory_.points.back().t != time_ ||
            trajectory_.points.back().z_total != children_.size())
            record();
        trajectory_.final_counts = counts_;
    }

    PAFunction f_;
    Engine rng_;
    std::uint64_t record_stride_;
    std::uint64_t events_ = 0;
    double time_ = 0.0;
    std::vector<std::uint64_t> children_;
    std::vector<std::uint64_t> counts_;
    std::uint64_t z_eq_ = 0;
    std::uint64_t z_gt_ = 0;
    std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;
    TreeSnapshot tree_;
    Trajectory trajectory_;
};

struct CtbpResult {
    TreeSnapshot tree;
    Trajectory trajectory;
};

inline CtbpResult simulate_until_size(const PAFunction& f, std::size_t n_target,
                                      std::uint64_t seed, RootMode mode, Degree k = 1,
                                      std::uint64_t record_stride = 1) {
    if (n_target < (mode == RootMode::TwoRoots ? 2u : 1u))
        throw ConfigError("n_target is below the initial population");
    BirthProcessSimulator sim(f, mode, seed, k, record_stride);
    sim.run_until_size(n_target);
    return {sim.tree(), sim.trajectory()};
}

inline CtbpResult simulate_until_time(const PAFunction& f, double t_end, std::uint64_t seed,
                                      RootMode mode, Degree k = 1,
                                      std::uint64_t record_stride = 1) {
    BirthProcessSimulator sim(f, mode, seed, k, record_stride);
    sim.run_until_time(t_end);
    return {sim.tree(), sim.trajectory()};
}

/// Least-squares slope of log(population) against time over the final
/// `window` fraction of the elapsed time.
inline double estimate_growth_rate(const Trajectory& traj, double window = 0.5) {
    if (traj.points.empty() || traj.points.back().z_total < 100)
        throw DataError("growth rate needs a trajectory ending with population >= 100");
    if (!(window > 0.0 && window <= 1.0)) throw ConfigError("window must lie in (0, 1]");
    const double t_end = traj.points.back().t;
    const double t_start = t_end * (1.0 - window);
    double n = 0, st = 0, sy = 0, stt = 0, sty = 0;
    for (const auto& p : traj.points) {
        if (p.t < t_start) continue;
        const double y = std::log(static_cast<double>(p.z_total));
        n += 1;
        st += p.t;
        sy += y;
        stt += p.t * p.t;
        sty += p.t * y;
    }
    const double denom = n * stt - st * st;
    if (n < 3 || !(denom > 0.0)) throw DataError("too few trajectory points in the window");
    return (n * sty - st * sy) / denom;
}

struct RatioCheck {
    std::optional<double> observed;  // Z_{>k} / Z_{=k} at the end of the run
    double theoretical = 0.0;        // p_{>k} / p_k
};

/// Compares the end-of-run ratio of individuals with more than k-1 children
/// to those with exactly k-1 against the limit p_{>k}/p_k.
inline RatioCheck ratio_limit_check(const Trajectory& traj, Degree k, const PAFunction& f,
                                    const MalthusianSolution& sol) {
    RatioCheck out;
    out.theoretical = (k >= 1 && k <= sol.K) ? sol.p_tail[k] / sol.p[k] : true_r(f, sol, k);
    const auto& c = traj.final_counts;
    if (k == 0 || k >= c.size() || c[k] == 0) return out;
    std::uint64_t above = 0;
    for (std::size_t j = std::size_t{k} + 1; j < c.size(); ++j) above += c[j];
    out.observed = static_cast<double>(above) / static_cast<double>(c[k]);
    return out;
}

}  // namespace palab
