#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <queue>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "palab/errors.hpp"
#include "palab/pa_function.hpp"

namespace palab {

inline constexpr NodeId kNoParent = std::numeric_limits<NodeId>::max();

/// A recursive tree: node i (i >= 1) attached to parent[i] < i. Nodes 0 and 1
/// form the seed edge, so parent[1] == 0 and parent[0] is kNoParent.
struct TreeSnapshot {
    std::vector<NodeId> parent;

    std::size_t size() const noexcept { return parent.size(); }

    /// Throws StructureError unless parent[i] < i for every i >= 1.
    void validate() const {
        for (std::size_t i = 1; i < parent.size(); ++i) {
            if (parent[i] >= i) {
                throw StructureError("node " + std::to_string(i) + " has parent " +
                                     std::to_string(parent[i]) + " >= its own index");
            }
        }
    }

    std::vector<Degree> degrees() const {
        validate();
        std::vector<Degree> deg(parent.size(), 0);
        for (std::size_t i = 1; i < parent.size(); ++i) {
            ++deg[i];
            ++deg[parent[i]];
        }
        return deg;
    }

    friend bool operator==(const TreeSnapshot&, const TreeSnapshot&) = default;
};

/// chosen_degree[i] is the degree parent[i] had when node i attached.
/// Entries 0 and 1 belong to the seed edge and are 0.
struct EvolutionLog {
    std::vector<Degree> chosen_degree;

    friend bool operator==(const EvolutionLog&, const EvolutionLog&) = default;
};

/// Number of nodes per degree. counts[k] = N_k; counts[0] is always 0.
class DegreeCensus {
public:
    DegreeCensus() = default;

    /// Throws DataError if a node of degree 0 is counted or the total does not match n.
    DegreeCensus(std::vector<std::uint64_t> counts, std::uint64_t n)
        : counts_(std::move(counts)), n_(n) {
        if (!counts_.empty() && counts_[0] != 0) throw DataError("census counts degree-0 nodes");
        std::uint64_t total = 0;
        for (auto c : counts_) total += c;
        if (total != n_) throw DataError("census counts do not sum to n");
        while (!counts_.empty() && counts_.back() == 0) counts_.pop_back();
    }

    static DegreeCensus from_degrees(const std::vector<Degree>& degrees) {
        std::vector<std::uint64_t> counts;
        for (Degree d : degrees) {
            if (d >= counts.size()) counts.resize(d + 1, 0);
            ++counts[d];
        }
        return DegreeCensus(std::move(counts), degrees.size());
    }

    std::uint64_t n() const noexcept { return n_; }

    /// Largest degree with a nonzero count, 0 for an empty census.
    Degree max_degree() const noexcept {
        return counts_.empty() ? 0 : static_cast<Degree>(counts_.size() - 1);
    }

    std::uint64_t count(Degree k) const noexcept { return k < counts_.size() ? counts_[k] : 0; }

    /// N_{>k}.
    std::uint64_t count_above(Degree k) const noexcept {
        std::uint64_t total = 0;
        for (std::size_t j = std::size_t{k} + 1; j < counts_.size(); ++j) total += counts_[j];
        return total;
    }

    /// Sum of k * N_k, which is 2(n-1) for a tree.
    std::uint64_t degree_sum() const noexcept {
        std::uint64_t total = 0;
        for (std::size_t k = 1; k < counts_.size(); ++k) total += k * counts_[k];
        return total;
    }

    const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }

    friend bool operator==(const DegreeCensus&, const DegreeCensus&) = default;

private:
    std::vector<std::uint64_t> counts_;
    std::uint64_t n_ = 0;
};

/// Counts plain graph degrees; both seed nodes get no phantom parent.
inline DegreeCensus census_from_snapshot(const TreeSnapshot& tree) {
    if (tree.size() < 2) throw StructureError("a snapshot needs at least the two seed nodes");
    return DegreeCensus::from_degrees(tree.degrees());
}

// ---------------------------------------------------------------------------
// Text formats

/// One integer per line: line i holds parent[i], for i = 1..n-1.
inline void write_parent_array(std::ostream& out, const TreeSnapshot& tree) {
    for (std::size_t i = 1; i < tree.size(); ++i) out << tree.parent[i] << '\n';
}

inline TreeSnapshot read_parent_array(std::istream& in) {
    TreeSnapshot tree;
    tree.parent.push_back(kNoParent);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ss(line);
        long long p = -1;
        std::string rest;
        if (!(ss >> p) || (ss >> rest) || p < 0 || p > std::numeric_limits<NodeId>::max() - 1)
            throw FormatError("parent array line " + std::to_string(line_no) +
                              " is not a node index");
        tree.parent.push_back(static_cast<NodeId>(p));
    }
    if (tree.size() < 2) throw StructureError("parent array is empty");
    tree.validate();
    return tree;
}

/// One chosen degree per line for nodes 2..n-1.
inline void write_log(std::ostream& out, const EvolutionLog& log) {
    for (std::size_t i = 2; i < log.chosen_degree.size(); ++i) out << log.chosen_degree[i] << '\n';
}

inline EvolutionLog read_log(std::istream& in) {
    EvolutionLog log;
    log.chosen_degree = {0, 0};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ss(line);
        long long d = -1;
        std::string rest;
        if (!(ss >> d) || (ss >> rest) || d < 1 || d > std::numeric_limits<Degree>::max())
            throw FormatError("log line " + std::to_string(line_no) + " is not a degree >= 1");
        log.chosen_degree.push_back(static_cast<Degree>(d));
    }
    return log;
}

/// Reads whitespace-separated "u v" pairs with arbitrary non-negative ids,
/// checks that they form a tree on at least two nodes, and relabels the
/// nodes in breadth-first order from the smallest id so that the result is
/// a valid recursive-tree parent array with the same degree sequence.
inline TreeSnapshot snapshot_from_edges(std::istream& in) {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> edges;
    std::uint64_t u = 0, v = 0;
    while (in >> u >> v) edges.emplace_back(u, v);
    if (!in.eof()) throw FormatError("edge list must contain whitespace-separated integer pairs");

    std::unordered_map<std::uint64_t, NodeId> index;
    std::vector<std::uint64_t> ids;
    auto intern = [&](std::uint64_t id) {
        auto [it, inserted] = index.emplace(id, static_cast<NodeId>(ids.size()));
        if (inserted) ids.push_back(id);
        return it->second;
    };
    std::vector<std::pair<NodeId, NodeId>> local;
    local.reserve(edges.size());
    for (auto [a, b] : edges) {
        if (a == b) throw StructureError("self-loop at node " + std::to_string(a));
        local.emplace_back(intern(a), intern(b));
    }
    const std::size_t n = ids.size();
    if (n < 2) throw StructureError("edge list has fewer than two nodes");
    if (local.size() != n - 1)
        throw StructureError("a tree on " + std::to_string(n) + " nodes needs " +
                             std::to_string(n - 1) + " edges, got " +
                             std::to_string(local.size()));

    std::vector<std::vector<NodeId>> adj(n);
    for (auto [a, b] : local) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    for (auto& nb : adj) {
        std::sort(nb.begin(), nb.end(), [&](NodeId x, NodeId y) { return ids[x] < ids[y]; });
        if (std::adjacent_find(nb.begin(), nb.end()) != nb.end())
            throw StructureError("duplicate edge in edge list");
    }

    const auto root = static_cast<NodeId>(
        std::min_element(ids.begin(), ids.end()) - ids.begin());
    std::vector<NodeId> label(n, kNoParent);
    TreeSnapshot tree;
    tree.parent.reserve(n);
    std::queue<NodeId> frontier;
    label[root] = 0;
    tree.parent.push_back(kNoParent);
    frontier.push(root);
    while (!frontier.empty()) {
        const NodeId x = frontier.front();
        frontier.pop();
        for (NodeId y : adj[x]) {
            if (label[y] != kNoParent) continue;
            label[y] = static_cast<NodeId>(tree.parent.size());
            tree.parent.push_back(label[x]);
            frontier.push(y);
        }
    }
    if (tree.size() != n) throw StructureError("edge list is not connected");
    return tree;
}

}  // namespace palab
