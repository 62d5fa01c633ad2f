#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include "palab/errors.hpp"
#include "palab/pa_function.hpp"
#include "palab/rng.hpp"
#include "palab/tree.hpp"
#include "palab/weighted_sampler.hpp"

namespace palab {

struct GrowthConfig {
    std::uint64_t n_target = 2;
    PAFunction f = PAFunction::affine(0.0);
    std::uint64_t seed = 0;
    bool record_log = false;
};

struct GrowthResult {
    TreeSnapshot tree;
    std::optional<EvolutionLog> log;
};

/// Grows a preferential attachment tree from the seed edge (nodes 0 and 1),
/// one node at a time. Each arrival draws its parent with probability
/// f(deg) / F(G) using exactly two uniforms, so growing in several
/// `grow_to` calls is identical to growing in one.
class TreeGrower {
public:
    TreeGrower(PAFunction f, std::uint64_t seed, bool record_log = false)
        : index_(std::move(f)), rng_(seed) {
        tree_.parent = {kNoParent, 0};
        if (record_log) log_.emplace().chosen_degree = {0, 0};
        index_.insert_leaf(0);
        index_.insert_leaf(1);
    }

    void grow_to(std::uint64_t n) {
        if (n > kNoParent) throw ConfigError("tree size exceeds the node id range");
        tree_.parent.reserve(n);
        if (log_) log_->chosen_degree.reserve(n);
        while (tree_.size() < n) step();
    }

    /// Attaches one new node.
    void step() {
        const double u1 = uniform01(rng_);
        const double u2 = uniform01(rng_);
        const NodeId parent = index_.sample(u1, u2);
        const auto node = static_cast<NodeId>(tree_.size());
        if (log_) log_->chosen_degree.push_back(index_.degree(parent));
        tree_.parent.push_back(parent);
        index_.insert_leaf(node);
        index_.promote(parent);
    }

    std::size_t size() const noexcept { return tree_.size(); }
    const TreeSnapshot& tree() const noexcept { return tree_; }
    const std::optional<EvolutionLog>& log() const noexcept { return log_; }
    const DegreeClassIndex<PAFunction>& index() const noexcept { return index_; }

    GrowthResult result() && { return {std::move(tree_), std::move(log_)}; }

private:
    DegreeClassIndex<PAFunction> index_;
    Engine rng_;
    TreeSnapshot tree_;
    std::optional<EvolutionLog> log_;
};

inline GrowthResult grow(const GrowthConfig& cfg) {
    if (cfg.n_target < 2) throw ConfigError("n_target must be at least 2");
    TreeGrower grower(cfg.f, cfg.seed, cfg.record_log);
    grower.grow_to(cfg.n_target);
    return std::move(grower).result();
}

/// Replays the attachments recorded in `log` against `tree` and checks that
/// every chosen degree equals the parent's degree at that moment.
inline bool replay_check(const TreeSnapshot& tree, const EvolutionLog& log) {
    if (log.chosen_degree.size() != tree.size())
        throw StructureError("log covers " + std::to_string(log.chosen_degree.size()) +
                             " nodes but the snapshot has " + std::to_string(tree.size()));
    tree.validate();
    if (tree.size() < 2) return true;
    std::vector<Degree> degree(tree.size(), 0);
    degree[0] = degree[1] = 1;
    for (std::size_t i = 2; i < tree.size(); ++i) {
        const NodeId p = tree.parent[i];
        if (log.chosen_degree[i] != degree[p]) return false;
        ++degree[p];
        degree[i] = 1;
    }
    return true;
}

}  // namespace palab
