#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "palab/csv.hpp"
#include "palab/errors.hpp"
#include "palab/estimator.hpp"
#include "palab/generator.hpp"
#include "palab/pa_function.hpp"
#include "palab/rng.hpp"
#include "palab/stats.hpp"
#include "palab/theory.hpp"

namespace palab {

struct NamedFunction {
    std::string id;
    PAFunction f;
};

inline std::vector<NamedFunction> reference_functions() {
    return {{"f1", reference_f1()}, {"f2", reference_f2()}, {"f3", reference_f3()}};
}

/// Monte Carlo grid over (function, size, replicate). Defaults are a desk-scale
/// version of the reference study (1000 replicates of 10^4, 10^5 and 10^6 nodes).
struct ExperimentPlan {
    std::vector<NamedFunction> functions = reference_functions();
    std::vector<std::uint64_t> sizes = {10'000, 100'000};
    std::uint64_t replicates = 100;
    std::uint64_t master_seed = 20190601;
    std::vector<Degree> degrees_of_interest = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::string outputs = "results";
    unsigned threads = 1;
    Degree degree_cap = 30;  // variance study

    void validate() const {
        if (functions.empty()) throw ConfigError("plan needs at least one function");
        if (sizes.empty()) throw ConfigError("plan needs at least one size");
        for (auto n : sizes)
            if (n < 2) throw ConfigError("plan sizes must be >= 2");
        if (replicates < 1) throw ConfigError("plan needs at least one replicate");
        for (auto k : degrees_of_interest)
            if (k < 1) throw ConfigError("degrees of interest must be >= 1");
    }

    /// Stream index of a cell; cells are enumerated function-major, then size, then replicate.
    std::uint64_t stream_id(std::size_t fi, std::size_t ni, std::uint64_t rep) const {
        return (static_cast<std::uint64_t>(fi) * sizes.size() + ni) * replicates + rep;
    }

    std::uint64_t cell_seed(std::size_t fi, std::size_t ni, std::uint64_t rep) const {
        return stream_seed(master_seed, stream_id(fi, ni, rep));
    }
};

inline nlohmann::json to_json(const ExperimentPlan& plan) {
    nlohmann::json fs = nlohmann::json::array();
    for (const auto& nf : plan.functions) {
        auto j = to_json(nf.f);
        j["id"] = nf.id;
        fs.push_back(j);
    }
    return {{"functions", fs},
            {"sizes", plan.sizes},
            {"replicates", plan.replicates},
            {"master_seed", plan.master_seed},
            {"degrees_of_interest", plan.degrees_of_interest},
            {"outputs", plan.outputs},
            {"threads", plan.threads},
            {"degree_cap", plan.degree_cap}};
}

/// Missing fields keep their defaults. A function entry may be a preset name
/// ("f1") or an object with an optional "id".
inline ExperimentPlan plan_from_json(const nlohmann::json& j) {
    ExperimentPlan plan;
    try {
        if (j.contains("functions")) {
            plan.functions.clear();
            std::size_t i = 0;
            for (const auto& entry : j.at("functions")) {
                ++i;
                if (entry.is_string()) {
                    const auto name = entry.get<std::string>();
                    plan.functions.push_back({name, parse_pa_function(name)});
                } else {
                    plan.functions.push_back({entry.value("id", "f" + std::to_string(i)),
                                              pa_function_from_json(entry)});
                }
            }
        }
        if (j.contains("sizes")) plan.sizes = j.at("sizes").get<std::vector<std::uint64_t>>();
        plan.replicates = j.value("replicates", plan.replicates);
        plan.master_seed = j.value("master_seed", plan.master_seed);
        if (j.contains("degrees_of_interest"))
            plan.degrees_of_interest = j.at("degrees_of_interest").get<std::vector<Degree>>();
        plan.outputs = j.value("outputs", plan.outputs);
        plan.threads = j.value("threads", plan.threads);
        plan.degree_cap = j.value("degree_cap", plan.degree_cap);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("bad experiment plan: ") + e.what());
    }
    plan.validate();
    return plan;
}

namespace detail {

/// Runs fn(i) for i in [0, count) on `threads` workers; results come back in
/// index order, so the output does not depend on scheduling.
template <class Fn>
auto ordered_parallel_map(std::size_t count, unsigned threads, Fn fn)
    -> std::vector<decltype(fn(std::size_t{}))> {
    std::vector<decltype(fn(std::size_t{}))> results(count);
    const unsigned workers =
        static_cast<unsigned>(std::min<std::size_t>(std::max(threads, 1u), count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) results[i] = fn(i);
        return results;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < count;) {
                try {
                    results[i] = fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                    next = count;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
    return results;
}

struct Cell {
    std::size_t fi = 0;
    std::size_t ni = 0;
    std::uint64_t rep = 0;
};

inline std::vector<Cell> cells(const ExperimentPlan& plan) {
    std::vector<Cell> out;
    for (std::size_t fi = 0; fi < plan.functions.size(); ++fi)
        for (std::size_t ni = 0; ni < plan.sizes.size(); ++ni)
            for (std::uint64_t rep = 0; rep < plan.replicates; ++rep) out.push_back({fi, ni, rep});
    return out;
}

/// Grows the cell's tree and returns its raw estimate table.
inline EstimateTable run_cell(const ExperimentPlan& plan, const Cell& c) {
    GrowthConfig cfg{plan.sizes[c.ni], plan.functions[c.fi].f, plan.cell_seed(c.fi, c.ni, c.rep),
                     false};
    return estimate(census_from_snapshot(grow(cfg).tree));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Consistency study: normalized estimates per (function, size, replicate, k).

struct ConsistencyRow {
    std::string f_id;
    std::uint64_t n = 0;
    std::uint64_t rep = 0;
    Degree k = 0;
    std::optional<double> r_hat_normalized;
};

inline std::vector<ConsistencyRow> run_consistency_study(const ExperimentPlan& plan) {
    plan.validate();
    const auto grid = detail::cells(plan);
    auto per_cell = detail::ordered_parallel_map(grid.size(), plan.threads, [&](std::size_t i) {
        const auto& c = grid[i];
        const EstimateTable raw = detail::run_cell(plan, c);
        std::optional<EstimateTable> normalized;
        if (raw.at(1).value_or(0.0) > 0.0) normalized = normalize_by_degree_one(raw);
        std::vector<ConsistencyRow> rows;
        for (Degree k : plan.degrees_of_interest) {
            rows.push_back({plan.functions[c.fi].id, plan.sizes[c.ni], c.rep, k,
                            normalized ? normalized->at(k) : std::nullopt});
        }
        return rows;
    });
    std::vector<ConsistencyRow> out;
    for (auto& rows : per_cell) out.insert(out.end(), rows.begin(), rows.end());
    return out;
}

inline csv::Table consistency_table(const std::vector<ConsistencyRow>& rows) {
    csv::Table t{{"f_id", "n", "rep", "k", "r_hat_normalized"}, {}};
    for (const auto& r : rows)
        t.rows.push_back({r.f_id, csv::format(r.n), csv::format(r.rep),
                          csv::format(std::uint64_t{r.k}), csv::format(r.r_hat_normalized)});
    return t;
}

// ---------------------------------------------------------------------------
// Variance study: unbiased sample variance of r_hat_k across replicates.

struct VarianceRow {
    std::string f_id;
    Degree k = 0;
    double s_k = 0.0;
    std::uint64_t support_count = 0;
};

/// Uses the single size of the plan; degrees 1..degree_cap. Degrees with
/// fewer than two defined replicates are omitted.
inline std::vector<VarianceRow> run_variance_study(const ExperimentPlan& plan) {
    plan.validate();
    if (plan.sizes.size() != 1) throw ConfigError("variance study takes exactly one size");
    const auto grid = detail::cells(plan);
    const auto tables = detail::ordered_parallel_map(
        grid.size(), plan.threads, [&](std::size_t i) { return detail::run_cell(plan, grid[i]); });
    std::vector<VarianceRow> out;
    for (std::size_t fi = 0; fi < plan.functions.size(); ++fi) {
        for (Degree k = 1; k <= plan.degree_cap; ++k) {
            std::vector<double> values;
            for (std::size_t i = 0; i < grid.size(); ++i)
                if (grid[i].fi == fi)
                    if (auto v = tables[i].at(k)) values.push_back(*v);
            if (values.size() < 2) continue;
            out.push_back({plan.functions[fi].id, k, stats::sample_variance(values),
                           values.size()});
        }
    }
    return out;
}

inline csv::Table variance_table(const std::vector<VarianceRow>& rows) {
    csv::Table t{{"f_id", "k", "s_k", "support_count"}, {}};
    for (const auto& r : rows)
        t.rows.push_back({r.f_id, csv::format(std::uint64_t{r.k}), csv::format(r.s_k),
                          csv::format(r.support_count)});
    return t;
}

// ---------------------------------------------------------------------------
// Normality study: sqrt(n) (r_hat_k - r_k) with r_k = f(k)/lambda* from theory.

struct NormalityRow {
    std::string f_id;
    std::uint64_t n = 0;
    std::uint64_t rep = 0;
    std::optional<double> sqrt_n_times_error;
};

struct NormalitySummary {
    std::string f_id;
    std::uint64_t n = 0;
    std::uint64_t count = 0;
    double mean = 0.0;
    double variance = 0.0;
    double qq_correlation = 0.0;
};

struct QQRow {
    std::string f_id;
    std::uint64_t n = 0;
    std::uint64_t index = 0;
    double normal_quantile = 0.0;
    double studentized = 0.0;
};

struct NormalityResult {
    Degree k = 0;
    std::vector<NormalityRow> rows;
    std::vector<NormalitySummary> summary;  // only groups with >= 2 defined values
    std::vector<QQRow> qq;
};

inline NormalityResult run_normality_study(const ExperimentPlan& plan, Degree k) {
    plan.validate();
    if (k < 1) throw ConfigError("normality study needs k >= 1");
    std::vector<double> truth;
    for (const auto& nf : plan.functions)
        truth.push_back(true_r(nf.f, solve_malthusian(nf.f), k));

    const auto grid = detail::cells(plan);
    const auto values =
        detail::ordered_parallel_map(grid.size(), plan.threads, [&](std::size_t i) {
            const auto& c = grid[i];
            const auto r_hat = detail::run_cell(plan, c).at(k);
            std::optional<double> scaled;
            if (r_hat)
                scaled = std::sqrt(static_cast<double>(plan.sizes[c.ni])) * (*r_hat - truth[c.fi]);
            return scaled;
        });

    NormalityResult res;
    res.k = k;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& c = grid[i];
        res.rows.push_back({plan.functions[c.fi].id, plan.sizes[c.ni], c.rep, values[i]});
    }
    for (std::size_t fi = 0; fi < plan.functions.size(); ++fi) {
        for (std::size_t ni = 0; ni < plan.sizes.size(); ++ni) {
            std::vector<double> xs;
            for (std::size_t i = 0; i < grid.size(); ++i)
                if (grid[i].fi == fi && grid[i].ni == ni && values[i]) xs.push_back(*values[i]);
            if (xs.size() < 2) continue;
            const auto qq = stats::normal_qq(xs);
            const auto& id = plan.functions[fi].id;
            res.summary.push_back({id, plan.sizes[ni], xs.size(), stats::mean(xs),
                                   stats::sample_variance(xs), stats::qq_correlation(qq)});
            for (std::size_t j = 0; j < qq.size(); ++j)
                res.qq.push_back({id, plan.sizes[ni], j + 1, qq[j].normal_quantile, qq[j].sample});
        }
    }
    return res;
}

inline csv::Table normality_table(const NormalityResult& res) {
    csv::Table t{{"f_id", "n", "rep", "sqrt_n_times_error"}, {}};
    for (const auto& r : res.rows)
        t.rows.push_back({r.f_id, csv::format(r.n), csv::format(r.rep),
                          csv::format(r.sqrt_n_times_error)});
    return t;
}

inline csv::Table normality_summary_table(const NormalityResult& res) {
    csv::Table t{{"f_id", "n", "k", "count", "mean", "variance", "qq_correlation"}, {}};
    for (const auto& s : res.summary)
        t.rows.push_back({s.f_id, csv::format(s.n), csv::format(std::uint64_t{res.k}),
                          csv::format(s.count), csv::format(s.mean), csv::format(s.variance),
                          csv::format(s.qq_correlation)});
    return t;
}

inline csv::Table normality_qq_table(const NormalityResult& res) {
    csv::Table t{{"f_id", "n", "index", "normal_quantile", "studentized"}, {}};
    for (const auto& q : res.qq)
        t.rows.push_back({q.f_id, csv::format(q.n), csv::format(q.index),
                          csv::format(q.normal_quantile), csv::format(q.studentized)});
    return t;
}

// ---------------------------------------------------------------------------
// Summaries of long-format study outputs.

/// Groups rows by f_id and, when present, n and k; summarizes the last
/// column (empty cells skipped). Output is sorted by (f_id, n, k), so row
/// order in the input does not matter. All inputs must share one header,
/// which must contain f_id and rep.
inline csv::Table summarize(const std::vector<csv::Table>& inputs) {
    if (inputs.empty()) throw FormatError("nothing to summarize");
    const auto& header = inputs.front().header;
    for (const auto& t : inputs)
        if (t.header != header) throw FormatError("summarize inputs have different headers");
    auto col = [&](const std::string& name) -> std::optional<std::size_t> {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) return std::nullopt;
        return static_cast<std::size_t>(it - header.begin());
    };
    const auto f_col = col("f_id");
    const auto rep_col = col("rep");
    if (!f_col || !rep_col || header.size() < 3)
        throw FormatError("long-format input needs f_id, rep and a value column");
    const std::size_t value_col = header.size() - 1;
    if (value_col == *f_col || value_col == *rep_col)
        throw FormatError("the last column must hold the values");
    const auto n_col = col("n");
    const auto k_col = col("k");

    using Key = std::tuple<std::string, double, double>;
    std::map<Key, std::vector<double>> groups;
    for (const auto& t : inputs) {
        for (const auto& row : t.rows) {
            Key key{row[*f_col], n_col ? csv::parse_double(row[*n_col]) : 0.0,
                    k_col ? csv::parse_double(row[*k_col]) : 0.0};
            auto& g = groups[key];
            if (!row[value_col].empty()) g.push_back(csv::parse_double(row[value_col]));
        }
    }

    csv::Table out;
    out.header.push_back("f_id");
    if (n_col) out.header.push_back("n");
    if (k_col) out.header.push_back("k");
    for (const char* h : {"count", "mean", "variance", "q1", "median", "q3"})
        out.header.push_back(h);
    for (auto& [key, vals] : groups) {
        std::vector<std::string> row{std::get<0>(key)};
        if (n_col) row.push_back(csv::format(std::get<1>(key)));
        if (k_col) row.push_back(csv::format(std::get<2>(key)));
        // Sorting first makes the floating-point sums independent of input order.
        std::sort(vals.begin(), vals.end());
        row.push_back(csv::format(std::uint64_t{vals.size()}));
        if (vals.empty()) {
            row.insert(row.end(), 5, "");
        } else {
            const auto q = stats::quartiles(vals);
            row.push_back(csv::format(stats::mean(vals)));
            row.push_back(vals.size() >= 2 ? csv::format(stats::sample_variance(vals)) : "");
            row.push_back(csv::format(q.q1));
            row.push_back(csv::format(q.median));
            row.push_back(csv::format(q.q3));
        }
        out.rows.push_back(std::move(row));
    }
    return out;
}

}  // namespace palab
