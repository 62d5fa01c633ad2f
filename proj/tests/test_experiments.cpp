#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "palab/csv.hpp"
#include "palab/experiments.hpp"
#include "palab/stats.hpp"

using namespace palab;

namespace {

csv::Table long_table(const std::vector<std::pair<std::string, std::string>>& rows) {
    csv::Table t{{"f_id", "rep", "value"}, {}};
    std::uint64_t rep = 0;
    for (const auto& [id, v] : rows) t.rows.push_back({id, std::to_string(rep++), v});
    return t;
}

std::string column(const csv::Table& t, std::size_t row, const std::string& name) {
    const auto it = std::find(t.header.begin(), t.header.end(), name);
    return t.rows.at(row).at(static_cast<std::size_t>(it - t.header.begin()));
}

ExperimentPlan small_plan() {
    ExperimentPlan plan;
    plan.functions = {{"lin", PAFunction::affine(0.0)}, {"f2", reference_f2()}};
    plan.sizes = {2000};
    plan.replicates = 8;
    plan.master_seed = 5;
    plan.degrees_of_interest = {1, 2, 3};
    return plan;
}

std::string csv_text(const csv::Table& t) {
    std::ostringstream out;
    csv::write(out, t);
    return out.str();
}

}  // namespace

TEST(Stats, Examples) {
    const std::vector<double> xs{1, 2, 3, 4};
    EXPECT_EQ(stats::mean(xs), 2.5);
    EXPECT_DOUBLE_EQ(stats::sample_variance(xs), 5.0 / 3.0);
    EXPECT_EQ(stats::median({0, 1}), 0.5);
    const auto q = stats::quartiles({1, 2, 3, 4, 5, 6, 7});
    EXPECT_EQ(q.q1, 2.0);
    EXPECT_EQ(q.median, 4.0);
    EXPECT_EQ(q.q3, 6.0);
    const auto one = stats::quartiles({7});
    EXPECT_EQ(one.q1, 7.0);
    EXPECT_EQ(one.q3, 7.0);
    EXPECT_NEAR(stats::normal_quantile(0.975), 1.959963984540054, 1e-12);
}

TEST(Stats, QQCorrelationOfNormalSample) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> z;
    std::vector<double> xs(500);
    for (auto& x : xs) x = 3 + 2 * z(rng);
    EXPECT_GT(stats::qq_correlation(stats::normal_qq(xs)), 0.99);
    std::exponential_distribution<double> e;
    for (auto& x : xs) x = std::pow(e(rng), 3);
    EXPECT_LT(stats::qq_correlation(stats::normal_qq(xs)), 0.9);
}

TEST(Csv, RoundTripWithQuoting) {
    const csv::Table t{{"a", "b,c"}, {{"x\"y", ""}, {"1.5", "line\nbreak"}}};
    const auto text = csv_text(t);
    EXPECT_NE(text.find("\r\n"), std::string::npos);
    std::istringstream in(text);
    const auto back = csv::read(in);
    EXPECT_EQ(back.header, t.header);
    EXPECT_EQ(back.rows, t.rows);
}

TEST(Csv, DoublesRoundTrip) {
    for (double x : {0.1, 1.0 / 3.0, 2.6904336018745701601, 1e-300, 12345.0})
        EXPECT_EQ(csv::parse_double(csv::format(x)), x);
    EXPECT_EQ(csv::format(std::optional<double>{}), "");
}

TEST(Csv, RejectsRaggedRows) {
    std::istringstream in("a,b\r\n1\r\n");
    EXPECT_THROW(csv::read(in), FormatError);
}

TEST(Summarize, SingleValue) {
    const auto s = summarize({long_table({{"f1", "0.25"}})});
    ASSERT_EQ(s.rows.size(), 1u);
    EXPECT_EQ(column(s, 0, "count"), "1");
    EXPECT_EQ(column(s, 0, "mean"), "0.25");
    EXPECT_EQ(column(s, 0, "variance"), "");
    EXPECT_EQ(column(s, 0, "median"), "0.25");
    EXPECT_EQ(column(s, 0, "q1"), "0.25");
}

TEST(Summarize, MedianOfTwo) {
    const auto s = summarize({long_table({{"f1", "0"}, {"f1", "1"}, {"f2", ""}})});
    ASSERT_EQ(s.rows.size(), 2u);
    EXPECT_EQ(column(s, 0, "median"), "0.5");
    EXPECT_EQ(column(s, 1, "count"), "0");
}

TEST(Summarize, InvariantUnderRowShuffle) {
    std::vector<std::pair<std::string, std::string>> rows;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u;
    for (int i = 0; i < 300; ++i)
        rows.emplace_back(i % 3 ? "a" : "b", csv::format(u(rng) * std::pow(10.0, i % 7)));
    const auto base = summarize({long_table(rows)});
    for (int trial = 0; trial < 5; ++trial) {
        std::shuffle(rows.begin(), rows.end(), rng);
        EXPECT_EQ(summarize({long_table(rows)}).rows, base.rows);
    }
}

TEST(Summarize, SchemaErrors) {
    EXPECT_THROW(summarize({}), FormatError);
    EXPECT_THROW(summarize({csv::Table{{"f_id", "value"}, {}}}), FormatError);
    EXPECT_THROW(summarize({csv::Table{{"f_id", "rep", "v"}, {}}, csv::Table{{"f_id", "rep", "w"}, {}}}),
                 FormatError);
}

TEST(Plan, JsonRoundTrip) {
    auto plan = small_plan();
    plan.threads = 3;
    plan.degree_cap = 12;
    const auto back = plan_from_json(to_json(plan));
    EXPECT_EQ(to_json(back), to_json(plan));
    ASSERT_EQ(back.functions.size(), 2u);
    EXPECT_EQ(back.functions[1].f, reference_f2());
    EXPECT_EQ(plan_from_json(nlohmann::json::parse(R"({"functions":["f3"]})")).functions[0].f, reference_f3());
    EXPECT_THROW(plan_from_json(nlohmann::json::parse(R"({"sizes":[1]})")), ConfigError);
    EXPECT_THROW(plan_from_json(nlohmann::json::parse(R"({"sizes":"x"})")), FormatError);
}

TEST(Plan, StreamsAreDistinct) {
    const auto plan = small_plan();
    std::vector<std::uint64_t> seeds;
    for (std::size_t fi = 0; fi < 2; ++fi)
        for (std::uint64_t rep = 0; rep < plan.replicates; ++rep) seeds.push_back(plan.cell_seed(fi, 0, rep));
    std::sort(seeds.begin(), seeds.end());
    EXPECT_EQ(std::adjacent_find(seeds.begin(), seeds.end()), seeds.end());
    EXPECT_EQ(plan.stream_id(1, 0, 3), plan.replicates + 3);
}

TEST(Consistency, SerialAndParallelAgree) {
    auto plan = small_plan();
    const auto serial = csv_text(consistency_table(run_consistency_study(plan)));
    plan.threads = 4;
    EXPECT_EQ(csv_text(consistency_table(run_consistency_study(plan))), serial);
    EXPECT_EQ(csv_text(consistency_table(run_consistency_study(plan))), serial);
}

TEST(Consistency, LinearMedianApproachesRatio) {
    ExperimentPlan plan;
    plan.functions = {{"lin", PAFunction::affine(0.0)}};
    plan.sizes = {20'000};
    plan.replicates = 21;
    plan.degrees_of_interest = {2, 3};
    std::vector<double> r2, r3;
    for (const auto& row : run_consistency_study(plan))
        (row.k == 2 ? r2 : r3).push_back(*row.r_hat_normalized);
    EXPECT_NEAR(stats::median(r2), 2.0, 0.1);
    EXPECT_NEAR(stats::median(r3), 3.0, 0.2);
}

TEST(Variance, ShrinksWithSizeAndGrowsWithDegree) {
    auto plan = small_plan();
    plan.functions = {{"one", PAFunction::constant(1.0)}};
    plan.replicates = 200;
    plan.degree_cap = 3;
    plan.sizes = {1000};
    const auto small = run_variance_study(plan);
    plan.sizes = {8000};
    const auto large = run_variance_study(plan);
    ASSERT_EQ(small.size(), 3u);
    ASSERT_EQ(large.size(), 3u);
    // Variance scales like 1/n: an eightfold size cuts it by about eight.
    const double ratio = small[0].s_k / large[0].s_k;
    EXPECT_GT(ratio, 4.0);
    EXPECT_LT(ratio, 16.0);
    EXPECT_LT(large[0].s_k, large[2].s_k);
    EXPECT_EQ(large[0].support_count, 200u);
    plan.sizes = {2000, 8000};
    EXPECT_THROW(run_variance_study(plan), ConfigError);
}

TEST(Normality, UnsupportedDegreeGivesEmptySummary) {
    auto plan = small_plan();
    plan.replicates = 3;
    const auto res = run_normality_study(plan, 1'000'000);
    EXPECT_TRUE(res.summary.empty());
    EXPECT_EQ(res.rows.size(), 6u);
    for (const auto& r : res.rows) EXPECT_FALSE(r.sqrt_n_times_error);
}

TEST(Normality, CenteredOnTheLimit) {
    auto plan = small_plan();
    plan.functions = {{"f2", reference_f2()}};
    plan.sizes = {20'000};
    plan.replicates = 40;
    const auto res = run_normality_study(plan, 2);
    ASSERT_EQ(res.summary.size(), 1u);
    const auto& s = res.summary[0];
    EXPECT_EQ(s.count, 40u);
    EXPECT_LT(std::abs(s.mean), 4 * std::sqrt(s.variance / s.count) + 0.05);
    EXPECT_EQ(res.qq.size(), 40u);
}
