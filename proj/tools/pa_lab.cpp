// pa-lab: grow preferential attachment trees, estimate attachment functions
// from snapshots, evaluate the branching-process limit theory, and run the
// Monte Carlo studies.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "palab/palab.hpp"

namespace fs = std::filesystem;
using namespace palab;

namespace {

constexpr int kExitCheckFailed = 3;

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::ofstream open_out(const std::string& path) {
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    return out;
}

/// Preset name, inline JSON, or a path to a JSON file.
PAFunction load_function(const std::string& arg) {
    std::error_code ec;
    if (!arg.empty() && arg.front() != '{' && fs::is_regular_file(arg, ec))
        return parse_pa_function(slurp(arg));
    return parse_pa_function(arg);
}

void write_csv(const std::string& path, const csv::Table& table) {
    auto out = open_out(path);
    csv::write(out, table);
}

int cmd_generate(const std::string& f_arg, std::uint64_t n, std::uint64_t seed, bool log,
                 const std::string& out_path) {
    const auto result = grow({n, load_function(f_arg), seed, log});
    {
        auto out = open_out(out_path);
        write_parent_array(out, result.tree);
    }
    if (result.log) {
        auto out = open_out(out_path + ".log");
        write_log(out, *result.log);
    }
    return 0;
}

int cmd_estimate(const std::string& snapshot_path, const std::string& edges_path,
                 const std::string& log_path, bool normalize, bool monotone,
                 const std::string& out_path) {
    TreeSnapshot tree;
    if (!edges_path.empty()) {
        std::ifstream in(edges_path);
        if (!in) throw std::runtime_error("cannot open " + edges_path);
        tree = snapshot_from_edges(in);
    } else {
        std::ifstream in(snapshot_path);
        if (!in) throw std::runtime_error("cannot open " + snapshot_path);
        tree = read_parent_array(in);
    }
    const auto census = census_from_snapshot(tree);

    int status = 0;
    if (!log_path.empty()) {
        std::ifstream in(log_path);
        if (!in) throw std::runtime_error("cannot open " + log_path);
        const auto log = read_log(in);
        const auto report = lemma_check(census, log);
        if (report.ok()) {
            std::cerr << "attachment counts match tail counts for every degree\n";
        } else {
            for (const auto& m : report.mismatches)
                std::cerr << "mismatch at k=" << m.k << ": " << m.attachments
                          << " attachments vs " << m.above << " nodes above\n";
            status = kExitCheckFailed;
        }
    }

    auto table = estimate(census);
    if (normalize) table = normalize_by_degree_one(std::move(table));
    if (monotone) table = monotonize(std::move(table));
    csv::Table out{{"k", "N_k", "N_gt_k", "r_hat"}, {}};
    for (const auto& e : table.entries)
        out.rows.push_back({csv::format(std::uint64_t{e.k}), csv::format(e.n_k),
                            csv::format(e.n_gt_k), csv::format(e.r_hat)});
    write_csv(out_path, out);
    return status;
}

int cmd_theory(const std::string& f_arg, double tol, Degree kmax, const std::string& out_path) {
    const auto f = load_function(f_arg);
    SolveOptions opt;
    opt.tol = tol;
    opt.min_horizon = std::max<Degree>(kmax, 1);
    const auto sol = solve_malthusian(f, opt);
    auto out = open_out(out_path);
    out << "# lambda_star=" << csv::format(sol.lambda_star)
        << ",truncation_error=" << csv::format(sol.truncation_error) << "\r\n";
    csv::Table t{{"k", "f_k", "p_k", "p_gt_k", "r_k"}, {}};
    for (Degree k = 1; k <= std::min(kmax, sol.K); ++k)
        t.rows.push_back({csv::format(std::uint64_t{k}), csv::format(f(k)), csv::format(sol.p[k]),
                          csv::format(sol.p_tail[k]), csv::format(sol.r[k])});
    csv::write(out, t);
    const auto report = identity_check(f, sol);
    if (!report.ok()) {
        std::cerr << "theory identities violated (max relative deviation "
                  << report.max_rel_deviation << " at k=" << report.worst_k << ")\n";
        return kExitCheckFailed;
    }
    return 0;
}

int cmd_ctbp(const std::string& f_arg, std::uint64_t n, Degree k, const std::string& mode,
             std::uint64_t seed, std::uint64_t stride, const std::string& out_path) {
    const RootMode m = mode == "two_roots" ? RootMode::TwoRoots : RootMode::SingleRoot;
    const auto res = simulate_until_size(load_function(f_arg), n, seed, m, k, stride);
    csv::Table t{{"t", "Z1", "Z_eq_k", "Z_gt_k"}, {}};
    for (const auto& p : res.trajectory.points)
        t.rows.push_back({csv::format(p.t), csv::format(p.z_total), csv::format(p.z_eq),
                          csv::format(p.z_gt)});
    write_csv(out_path, t);
    if (res.trajectory.points.back().z_total >= 100)
        std::cerr << "growth rate estimate: " << estimate_growth_rate(res.trajectory) << "\n";
    return 0;
}

int cmd_experiment(const std::string& plan_path, const std::string& study, Degree k,
                   const std::string& out_dir, int threads) {
    ExperimentPlan plan = plan_path.empty()
                              ? ExperimentPlan{}
                              : plan_from_json(nlohmann::json::parse(slurp(plan_path)));
    if (threads > 0) plan.threads = static_cast<unsigned>(threads);
    const fs::path dir(out_dir.empty() ? plan.outputs : out_dir);
    fs::create_directories(dir);

    if (study == "consistency") {
        const auto table = consistency_table(run_consistency_study(plan));
        write_csv((dir / "consistency.csv").string(), table);
        write_csv((dir / "consistency_summary.csv").string(), summarize({table}));
    } else if (study == "variance") {
        write_csv((dir / "variance.csv").string(), variance_table(run_variance_study(plan)));
        auto meta = open_out((dir / "variance.meta.json").string());
        meta << nlohmann::json{{"variance", "unbiased (n-1 denominator)"},
                               {"n", plan.sizes.front()},
                               {"replicates", plan.replicates},
                               {"degree_cap", plan.degree_cap},
                               {"master_seed", plan.master_seed}}
                    .dump(2)
             << "\n";
    } else {
        const auto res = run_normality_study(plan, k);
        write_csv((dir / "normality.csv").string(), normality_table(res));
        write_csv((dir / "normality_summary.csv").string(), normality_summary_table(res));
        write_csv((dir / "normality_qq.csv").string(), normality_qq_table(res));
    }
    return 0;
}

int cmd_summarize(const std::vector<std::string>& inputs, const std::string& out_path) {
    std::vector<csv::Table> tables;
    for (const auto& path : inputs) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw std::runtime_error("cannot open " + path);
        tables.push_back(csv::read(in));
    }
    write_csv(out_path, summarize(tables));
    return 0;
}

int cmd_validate(const std::string& f_arg, Degree horizon) {
    const auto f = load_function(f_arg);
    const auto report = validate_function(f, horizon);
    std::cout << to_json(f).dump() << "\n";
    if (report.ok()) {
        std::cout << "ok up to k=" << horizon << "\n";
        return 0;
    }
    const auto& v = *report.first_violation;
    std::cout << to_string(v.kind) << " violation at k=" << v.k << " (value " << v.value
              << ", reference " << v.reference << ")\n";
    return kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Preferential attachment tree laboratory"};
    app.require_subcommand(1);

    std::string f_arg = "linear", out, snapshot, edges, log_path, mode = "single_root", plan,
                study = "consistency", out_dir;
    std::uint64_t n = 1000, seed = 1, stride = 1;
    Degree k = 1, kmax = 200, horizon = 1000;
    bool log = false, normalize = false, monotone = false;
    double tol = 1e-10;
    int threads = 0;
    std::vector<std::string> inputs;

    auto* gen = app.add_subcommand("generate", "grow a tree and write its parent array");
    gen->add_option("--f", f_arg, "attachment function: preset, JSON, or JSON file")->required();
    gen->add_option("--n", n, "number of nodes")->required()->check(CLI::Range(2ULL, 4000000000ULL));
    gen->add_option("--seed", seed, "RNG seed");
    gen->add_flag("--log", log, "also write chosen degrees to <out>.log");
    gen->add_option("--out", out, "output path")->required();

    auto* est = app.add_subcommand("estimate", "estimate r_k from a snapshot");
    auto* snap_opt = est->add_option("--snapshot", snapshot, "parent-array file");
    auto* edge_opt = est->add_option("--edges", edges, "edge list of 'u v' pairs");
    snap_opt->excludes(edge_opt);
    est->add_option("--log", log_path, "chosen-degree log for the attachment-count check");
    est->add_flag("--normalize", normalize, "divide by the degree-one estimate");
    est->add_flag("--monotone", monotone, "nondecreasing rearrangement");
    est->add_option("--out", out, "output CSV")->required();

    auto* th = app.add_subcommand("theory", "Malthusian parameter and limiting degree law");
    th->add_option("--f", f_arg, "attachment function")->required();
    th->add_option("--tol", tol, "tolerance on |rho(lambda*) - 1|");
    th->add_option("--kmax", kmax, "largest degree written");
    th->add_option("--out", out, "output CSV")->required();

    auto* ct = app.add_subcommand("ctbp", "simulate the continuous-time branching process");
    ct->add_option("--f", f_arg, "attachment function")->required();
    ct->add_option("--n", n, "target population")->required();
    ct->add_option("--k", k, "tracked degree")->check(CLI::PositiveNumber);
    ct->add_option("--mode", mode, "single_root or two_roots")
        ->check(CLI::IsMember({"single_root", "two_roots"}));
    ct->add_option("--seed", seed, "RNG seed");
    ct->add_option("--stride", stride, "record every stride-th event");
    ct->add_option("--out", out, "output CSV")->required();

    auto* ex = app.add_subcommand("experiment", "run a Monte Carlo study");
    ex->add_option("--plan", plan, "plan JSON (defaults when omitted)");
    ex->add_option("--study", study, "consistency, variance or normality")
        ->check(CLI::IsMember({"consistency", "variance", "normality"}));
    ex->add_option("--k", k, "degree for the normality study")->check(CLI::PositiveNumber);
    ex->add_option("--out-dir", out_dir, "output directory");
    ex->add_option("--threads", threads, "worker threads (overrides the plan)");

    auto* sm = app.add_subcommand("summarize", "quartiles, means and variances per group");
    sm->add_option("--in", inputs, "long-format CSV inputs")->required();
    sm->add_option("--out", out, "output CSV")->required();

    auto* va = app.add_subcommand("validate", "check positivity, monotonicity and certificate");
    va->add_option("--f", f_arg, "attachment function")->required();
    va->add_option("--horizon", horizon, "largest degree checked")->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) return cmd_generate(f_arg, n, seed, log, out);
        if (*est) {
            if (snapshot.empty() && edges.empty())
                throw ConfigError("estimate needs --snapshot or --edges");
            return cmd_estimate(snapshot, edges, log_path, normalize, monotone, out);
        }
        if (*th) return cmd_theory(f_arg, tol, kmax, out);
        if (*ct) return cmd_ctbp(f_arg, n, k, mode, seed, stride, out);
        if (*ex) return cmd_experiment(plan, study, k, out_dir, threads);
        if (*sm) return cmd_summarize(inputs, out);
        if (*va) return cmd_validate(f_arg, horizon);
    } catch (const std::exception& e) {
        std::cerr << "pa-lab: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
