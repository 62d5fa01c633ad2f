#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "palab/errors.hpp"
#include "palab/pa_function.hpp"

namespace palab {

/// Draws a node with probability f(deg v) / F(G), where F(G) is the total
/// preference sum_v f(deg v).
///
/// Nodes are bucketed by degree. A Fenwick tree over degree classes holds
/// N_k * f(k), so a draw is a weighted prefix search over classes (u1)
/// followed by a uniform pick within the class (u2). Inserting a leaf,
/// promoting a node by one degree and sampling each touch O(log D) tree
/// entries, D being the current class capacity.
///
/// `Preference` is any callable double(Degree) that is positive on k >= 1.
template <class Preference>
class DegreeClassIndex {
public:
    explicit DegreeClassIndex(Preference f, Degree initial_capacity = 16)
        : f_(std::move(f)) {
        capacity_ = std::bit_ceil(std::max<Degree>(initial_capacity, 2));
        resize_classes(capacity_);
    }

    /// Adds `node` with degree 1.
    void insert_leaf(NodeId node) {
        if (node < position_.size() && position_[node].degree != 0)
            throw StateError("node " + std::to_string(node) + " is already in the index");
        if (node >= position_.size()) position_.resize(std::size_t{node} + 1);
        place(node, 1);
        ++size_;
        add_weight(1, pref_[1]);
        total_weight_ += pref_[1];
    }

    /// Moves `node` from degree k to degree k + 1.
    void promote(NodeId node) {
        if (node >= position_.size() || position_[node].degree == 0)
            throw StateError("node " + std::to_string(node) + " is not in the index");
        const Degree k = position_[node].degree;
        if (k + 1 > capacity_) grow_capacity(k + 1);
        remove_from_class(node);
        place(node, k + 1);
        add_weight(k, -pref_[k]);
        add_weight(k + 1, pref_[k + 1]);
        total_weight_ += pref_[k + 1] - pref_[k];
    }

    /// u1 selects the class, u2 the member; both uniform on [0, 1).
    NodeId sample(double u1, double u2) const {
        if (size_ == 0) throw StateError("cannot sample from an empty index");
        const Degree k = find_class(u1 * total_weight_);
        const auto& cls = members_[k];
        auto slot = static_cast<std::size_t>(u2 * static_cast<double>(cls.size()));
        if (slot >= cls.size()) slot = cls.size() - 1;
        return cls[slot];
    }

    bool contains(NodeId node) const noexcept {
        return node < position_.size() && position_[node].degree != 0;
    }
    Degree degree(NodeId node) const {
        if (!contains(node)) throw StateError("node " + std::to_string(node) + " is not in the index");
        return position_[node].degree;
    }
    std::size_t size() const noexcept { return size_; }

    /// Incrementally maintained F(G).
    double total_weight() const noexcept { return total_weight_; }

    /// F(G) recomputed from class sizes.
    double recomputed_total_weight() const {
        double total = 0.0;
        for (Degree k = 1; k <= capacity_; ++k)
            total += static_cast<double>(members_[k].size()) * pref_[k];
        return total;
    }

    /// Class weight N_k f(k) as stored in the Fenwick tree (prefix difference).
    double class_weight(Degree k) const { return prefix(k) - prefix(k - 1); }

    /// Exact selection probability of `node` under the class scheme:
    /// (class weight / total) * (1 / class size).
    double selection_probability(NodeId node) const {
        const Degree k = degree(node);
        return class_weight(k) / total_weight_ / static_cast<double>(members_[k].size());
    }

    const std::vector<NodeId>& members(Degree k) const {
        static const std::vector<NodeId> empty;
        return k <= capacity_ ? members_[k] : empty;
    }

    Degree capacity() const noexcept { return capacity_; }

    /// Fenwick entries touched by per-operation work since construction
    /// (capacity rebuilds are counted separately).
    std::uint64_t tree_touches() const noexcept { return touches_; }
    std::uint64_t rebuilds() const noexcept { return rebuilds_; }

    const Preference& preference() const noexcept { return f_; }

private:
    struct Slot {
        Degree degree = 0;  // 0 = absent
        std::uint32_t index = 0;
    };

    void resize_classes(Degree capacity) {
        members_.resize(std::size_t{capacity} + 1);
        const std::size_t old = pref_.size();
        pref_.resize(std::size_t{capacity} + 1);
        for (std::size_t k = std::max<std::size_t>(old, 1); k <= capacity; ++k)
            pref_[k] = f_(static_cast<Degree>(k));
        tree_.assign(std::size_t{capacity} + 1, 0.0);
        for (Degree k = 1; k <= capacity; ++k) {
            tree_[k] += static_cast<double>(members_[k].size()) * pref_[k];
            const Degree up = k + (k & (~k + 1));
            if (up <= capacity) tree_[up] += tree_[k];
        }
    }

    void grow_capacity(Degree needed) {
        Degree cap = capacity_;
        while (cap < needed) cap *= 2;
        capacity_ = cap;
        resize_classes(cap);
        ++rebuilds_;
    }

    void place(NodeId node, Degree k) {
        auto& cls = members_[k];
        position_[node] = Slot{k, static_cast<std::uint32_t>(cls.size())};
        cls.push_back(node);
    }

    void remove_from_class(NodeId node) {
        const Slot s = position_[node];
        auto& cls = members_[s.degree];
        const NodeId last = cls.back();
        cls[s.index] = last;
        position_[last].index = s.index;
        cls.pop_back();
        position_[node] = Slot{};
    }

    void add_weight(Degree k, double delta) {
        for (std::size_t i = k; i <= capacity_; i += i & (~i + 1)) {
            tree_[i] += delta;
            ++touches_;
        }
    }

    double prefix(Degree k) const {
        double sum = 0.0;
        for (std::size_t i = k; i > 0; i -= i & (~i + 1)) sum += tree_[i];
        return sum;
    }

    // Smallest class whose cumulative weight exceeds x. Rounding drift can
    // land on an empty class; the nearest nonempty class is used then.
    Degree find_class(double x) const {
        std::size_t pos = 0;
        for (std::size_t step = capacity_; step > 0; step >>= 1) {
            const std::size_t next = pos + step;
            ++touches_;
            if (next <= capacity_ && tree_[next] <= x) {
                x -= tree_[next];
                pos = next;
            }
        }
        Degree k = static_cast<Degree>(std::min<std::size_t>(pos + 1, capacity_));
        if (!members_[k].empty()) return k;
        for (Degree j = k; j > 0; --j)
            if (!members_[j].empty()) return j;
        for (Degree j = k + 1; j <= capacity_; ++j)
            if (!members_[j].empty()) return j;
        throw StateError("sampler classes are inconsistent");
    }

    Preference f_;
    Degree capacity_ = 0;
    std::vector<std::vector<NodeId>> members_;  // indexed by degree
    std::vector<double> pref_;                  // cached f(k)
    std::vector<double> tree_;                  // Fenwick tree over N_k f(k)
    std::vector<Slot> position_;
    std::size_t size_ = 0;
    double total_weight_ = 0.0;
    mutable std::uint64_t touches_ = 0;
    std::uint64_t rebuilds_ = 0;
};

template <class Preference>
DegreeClassIndex(Preference) -> DegreeClassIndex<Preference>;

}  // namespace palab
