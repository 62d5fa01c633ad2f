#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "palab/errors.hpp"
#include "palab/tree.hpp"

namespace palab {

enum class Normalization { Raw, ByDegreeOne };

struct EstimateEntry {
    Degree k = 0;
    std::uint64_t n_k = 0;
    std::uint64_t n_gt_k = 0;
    std::optional<double> r_hat;  // absent when n_k == 0

    friend bool operator==(const EstimateEntry&, const EstimateEntry&) = default;
};

/// One entry per degree 1..max observed degree.
struct EstimateTable {
    std::vector<EstimateEntry> entries;
    std::uint64_t n = 0;
    Normalization normalization = Normalization::Raw;
    bool monotone = false;

    std::optional<double> at(Degree k) const {
        if (k == 0 || k > entries.size()) return std::nullopt;
        return entries[k - 1].r_hat;
    }

    friend bool operator==(const EstimateTable&, const EstimateTable&) = default;
};

/// r_hat_k = N_{>k} / N_k from the degree census alone, one suffix sum.
inline EstimateTable estimate(const DegreeCensus& census) {
    if (census.n() == 0 || census.max_degree() == 0) throw DataError("empty degree census");
    if (census.n() < 2) throw DataError("estimation needs at least two nodes");
    EstimateTable table;
    table.n = census.n();
    const Degree D = census.max_degree();
    table.entries.resize(D);
    std::uint64_t above = 0;
    for (Degree k = D; k >= 1; --k) {
        auto& e = table.entries[k - 1];
        e.k = k;
        e.n_k = census.count(k);
        e.n_gt_k = above;
        if (e.n_k > 0) e.r_hat = static_cast<double>(above) / static_cast<double>(e.n_k);
        above += e.n_k;
    }
    return table;
}

/// Divides every present estimate by r_hat_1, so that degree one has value 1.
inline EstimateTable normalize_by_degree_one(EstimateTable table) {
    const auto r1 = table.at(1);
    if (!r1 || !(*r1 > 0.0))
        throw NormalizationError("cannot normalize: r_hat_1 is absent or zero");
    const double base = *r1;
    for (auto& e : table.entries)
        if (e.r_hat) *e.r_hat /= base;
    table.normalization = Normalization::ByDegreeOne;
    return table;
}

/// Replaces the present estimates by their nondecreasing rearrangement:
/// the sorted values are reassigned to the present degrees in increasing order.
inline EstimateTable monotonize(EstimateTable table) {
    std::vector<double> values;
    for (const auto& e : table.entries)
        if (e.r_hat) values.push_back(*e.r_hat);
    std::sort(values.begin(), values.end());
    auto it = values.begin();
    for (auto& e : table.entries)
        if (e.r_hat) e.r_hat = *it++;
    table.monotone = true;
    return table;
}

struct LemmaMismatch {
    Degree k = 0;
    std::uint64_t attachments = 0;  // N_{->k}
    std::uint64_t above = 0;        // N_{>k}
};

struct LemmaReport {
    std::vector<LemmaMismatch> mismatches;
    bool ok() const noexcept { return mismatches.empty(); }
};

/// Checks that the number of attachments made to degree-k nodes equals the
/// number of nodes whose final degree exceeds k, for every k.
inline LemmaReport lemma_check(const DegreeCensus& census, const EvolutionLog& log) {
    if (log.chosen_degree.size() != census.n())
        throw StructureError("log covers " + std::to_string(log.chosen_degree.size()) +
                             " nodes but the census has " + std::to_string(census.n()));
    std::vector<std::uint64_t> attachments;
    for (std::size_t i = 2; i < log.chosen_degree.size(); ++i) {
        const Degree d = log.chosen_degree[i];
        if (d >= attachments.size()) attachments.resize(std::size_t{d} + 1, 0);
        ++attachments[d];
    }
    LemmaReport report;
    const std::size_t top = std::max<std::size_t>(attachments.size(), census.max_degree() + 1);
    std::uint64_t above = census.n() - census.count(0);
    for (std::size_t k = 1; k < top; ++k) {
        above -= census.count(static_cast<Degree>(k));
        const std::uint64_t att = k < attachments.size() ? attachments[k] : 0;
        if (att != above) report.mismatches.push_back({static_cast<Degree>(k), att, above});
    }
    if (!attachments.empty() && attachments[0] != 0)
        report.mismatches.push_back({0, attachments[0], census.n()});
    return report;
}

}  // namespace palab
