// Command-line front end: simulate datasets, run PC searches, and drive the
// benchmark suites. Machine consumption goes through files; stdout is for
// humans. Exit code 0 iff all requested work completed.

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ccikit/bench.hpp"
#include "ccikit/citests.hpp"
#include "ccikit/dataset.hpp"
#include "ccikit/graph.hpp"
#include "ccikit/pcsearch.hpp"
#include "ccikit/simulate.hpp"

namespace {

using nlohmann::json;

std::string iso_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &utc);
    return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out.flush()) throw std::runtime_error("cannot write " + path.string());
}

ccikit::BasisSpec parse_basis(const std::string& text) {
    const auto colon = text.find(':');
    const std::string family = text.substr(0, colon);
    int k = 7;
    if (colon != std::string::npos) {
        try {
            k = std::stoi(text.substr(colon + 1));
        } catch (const std::exception&) {
            throw std::runtime_error("basis must look like power:7 or hermite:5");
        }
    }
    if (k < 1) throw std::runtime_error("basis size must be at least 1");
    if (family == "power") {
        if (k > 12) throw std::runtime_error("power basis size exceeds 12");
        return ccikit::BasisSpec::power(k);
    }
    if (family == "hermite") return ccikit::BasisSpec::hermite(k);
    throw std::runtime_error("unknown basis family '" + family + "' (use power or hermite)");
}

std::unique_ptr<ccikit::CiTest> make_test(const std::string& name, double alpha,
                                          const ccikit::BasisSpec& basis, bool early_exit) {
    if (name == "cci") return std::make_unique<ccikit::CciTest>(alpha, basis, early_exit);
    if (name == "fisher-z") return std::make_unique<ccikit::FisherZTest>(alpha);
    if (name == "rank") return std::make_unique<ccikit::RankPartialTest>(alpha);
    if (name == "kci")
        throw std::runtime_error(
            "test 'kci' is out of scope for this toolkit; choose cci, fisher-z, or rank");
    throw std::runtime_error("unknown test '" + name + "' (use cci, fisher-z, or rank)");
}

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::runtime_error("alpha must lie in (0, 1)");
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
    std::string model_type = "linear-gaussian";
    std::size_t n_nodes = 5;
    std::optional<std::size_t> n_edges;
    double edge_prob = 0.5;
    std::size_t n_samples = 1000;
    std::uint64_t seed = 0;
    std::string out_dir = ".";
};

int cmd_simulate(const SimulateArgs& args) {
    int type_index = 0;  // 0 = linear-gaussian
    if (args.model_type != "linear-gaussian") {
        try {
            type_index = std::stoi(args.model_type);
        } catch (const std::exception&) {
            throw std::runtime_error("model type must be linear-gaussian or an integer in 1..14");
        }
        if (type_index < 1 || type_index > 14)
            throw std::runtime_error("model type must be linear-gaussian or an integer in 1..14");
    }

    const ccikit::Dag dag = args.n_edges
                                ? ccikit::random_dag_fixed_edges(args.n_nodes, *args.n_edges,
                                                                 args.seed)
                                : ccikit::random_dag_ordered(args.n_nodes, args.edge_prob,
                                                             args.seed);
    const std::uint64_t sem_seed = args.seed ^ ccikit::kSemStreamSalt;
    auto [data, sem] = type_index == 0
                           ? ccikit::simulate_linear_gaussian(dag, args.n_samples, sem_seed)
                           : ccikit::simulate_generalized(dag, type_index, args.n_samples,
                                                          sem_seed);

    const std::filesystem::path dir(args.out_dir);
    std::filesystem::create_directories(dir);
    const auto data_path = dir / "data.csv";
    const auto truth_path = dir / "truth.txt";
    const auto manifest_path = dir / "manifest.json";

    data.save_csv(data_path);
    write_text(truth_path, dag.graph().to_edge_list());

    json equations = json::array();
    const ccikit::Graph& g = dag.graph();
    for (std::size_t v = 0; v < g.node_count(); ++v) {
        const ccikit::NodeEquation& eq = sem.equations[v];
        json parents = json::array();
        for (std::size_t p : eq.parents) parents.push_back(g.nodes()[p]);
        equations.push_back({{"node", g.nodes()[v]},
                             {"parents", parents},
                             {"coefficients", eq.coefficients},
                             {"connection_type", eq.connection_type},
                             {"connection", ccikit::connection_description(eq.connection_type)},
                             {"noise_scale", eq.noise_scale}});
    }
    const json manifest = {
        {"command", "simulate"},
        {"model_type", args.model_type},
        {"n_nodes", args.n_nodes},
        {"n_edges", dag.graph().edge_count()},
        {"edge_prob", args.n_edges ? json() : json(args.edge_prob)},
        {"n_samples", args.n_samples},
        {"seed", args.seed},
        {"noise", sem.noise == ccikit::NoiseKind::gaussian ? "gaussian" : "uniform"},
        {"equations", equations},
        {"files", {{"data", data_path.string()}, {"truth", truth_path.string()}}},
        {"timestamp", iso_timestamp()},
    };
    write_text(manifest_path, manifest.dump(2) + "\n");

    std::cout << "wrote " << data_path.string() << " (" << data.sample_count() << " x "
              << data.variable_count() << ")\n"
              << "wrote " << truth_path.string() << " (" << dag.graph().edge_count()
              << " edges)\n"
              << "wrote " << manifest_path.string() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// search

struct SearchArgs {
    std::string data_path;
    std::string test = "cci";
    double alpha = 0.05;
    std::string basis = "power:7";
    bool early_exit = false;
    bool stable = false;
    std::optional<std::size_t> max_depth;
    std::size_t threads = 1;
    std::string out_path = "pattern.txt";
    std::string summary_path = "search_summary.json";
};

int cmd_search(const SearchArgs& args) {
    check_alpha(args.alpha);
    const ccikit::BasisSpec basis = parse_basis(args.basis);
    const auto test = make_test(args.test, args.alpha, basis, args.early_exit);

    const ccikit::Dataset data = ccikit::Dataset::load_csv(args.data_path);

    ccikit::SearchConfig config;
    config.test = test.get();
    config.max_depth = args.max_depth;
    config.stable = args.stable;
    config.threads = args.threads;

    const auto start = std::chrono::steady_clock::now();
    const ccikit::PcResult result = ccikit::pc(data.variables(), config, data);
    const double elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();

    write_text(args.out_path, result.pattern.to_edge_list());

    const json summary = {
        {"command", "search"},
        {"data", args.data_path},
        {"test", test->name()},
        {"alpha", args.alpha},
        {"basis", args.basis},
        {"stable", args.stable},
        {"threads", args.threads},
        {"max_depth", args.max_depth ? json(*args.max_depth) : json()},
        {"n_variables", data.variable_count()},
        {"n_samples", data.sample_count()},
        {"edges", result.pattern.edge_count()},
        {"depth_reached", result.depth_reached},
        {"test_calls", result.test_calls},
        {"elapsed_ms", elapsed_ms},
        {"pattern_file", args.out_path},
        {"timestamp", iso_timestamp()},
    };
    write_text(args.summary_path, summary.dump(2) + "\n");

    std::cout << "search: test=" << test->name() << " alpha=" << args.alpha << " vars="
              << data.variable_count() << " samples=" << data.sample_count() << "\n"
              << "pattern: " << result.pattern.edge_count() << " edges -> " << args.out_path
              << "\n"
              << "depth reached " << result.depth_reached << ", " << result.test_calls
              << " test calls, " << elapsed_ms << " ms\n"
              << "summary -> " << args.summary_path << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// benchmark

struct BenchmarkArgs {
    std::string suite;
    std::string test = "cci";
    double alpha = 0.01;
    std::string basis = "power:7";
    bool early_exit = false;
    bool vanilla = false;
    std::optional<std::size_t> max_depth;
    std::size_t threads = 1;
    std::uint64_t seed = 0;
    std::size_t reps = 10;
    std::optional<std::size_t> n_samples;
    std::size_t n_nodes = 200;
    std::size_t n_edges = 200;
    std::vector<std::size_t> sizes;
    std::vector<int> types;
    std::string out_path = "report.csv";
};

// Suites run one grid cell at a time so partial results reach the report
// file even when a later repetition throws. Seeds match the library's
// whole-grid calls: cell (i, rep) uses master seed + i*reps + rep.
int cmd_benchmark(const BenchmarkArgs& args) {
    check_alpha(args.alpha);
    const ccikit::BasisSpec basis = parse_basis(args.basis);
    ccikit::SuiteOptions options;
    options.stable = !args.vanilla;
    options.max_depth = args.max_depth;
    options.threads = args.threads;

    if (args.suite == "scaling") {
        const auto test = make_test(args.test, args.alpha, basis, args.early_exit);
        const std::vector<std::size_t> sizes =
            args.sizes.empty() ? std::vector<std::size_t>{250, 500, 1000, 2000} : args.sizes;
        const ccikit::ScalingReport report =
            ccikit::run_scaling(*test, sizes, 1, args.reps, args.seed);
        write_text(args.out_path, report.to_csv());
        for (const ccikit::ScalingRow& row : report.rows)
            std::cout << "n=" << row.n << "  mean " << row.mean_ms << " ms  median "
                      << row.median_ms << " ms\n";
        std::cout << "log-log slope " << report.loglog_slope << "\n"
                  << "report -> " << args.out_path << "\n";
        return 0;
    }

    const std::vector<ccikit::BenchTest> tests =
        ccikit::standard_tests(args.alpha, basis, args.early_exit);
    ccikit::ExperimentReport report;
    auto flush = [&] { write_text(args.out_path, report.to_csv()); };
    auto absorb = [&](ccikit::ExperimentReport cell, std::size_t rep) {
        for (ccikit::ReportRow& row : cell.rows) {
            const auto dash = row.config.rfind("-r");
            row.config = row.config.substr(0, dash) + "-r" + std::to_string(rep);
            report.rows.push_back(std::move(row));
        }
        flush();
    };

    try {
        if (args.suite == "linear-gaussian") {
            const std::vector<std::size_t> sizes =
                args.sizes.empty() ? std::vector<std::size_t>{100, 250, 400, 550, 700}
                                   : args.sizes;
            for (std::size_t s = 0; s < sizes.size(); ++s)
                for (std::size_t rep = 0; rep < args.reps; ++rep)
                    absorb(ccikit::run_linear_gaussian_suite(
                               tests, {sizes[s]}, 1, args.seed + s * args.reps + rep, options),
                           rep);
        } else if (args.suite == "nonlinear") {
            std::vector<int> types = args.types;
            if (types.empty())
                for (int t = 1; t <= 14; ++t) types.push_back(t);
            const std::size_t n_samples = args.n_samples.value_or(1000);
            for (std::size_t t = 0; t < types.size(); ++t)
                for (std::size_t rep = 0; rep < args.reps; ++rep)
                    absorb(ccikit::run_nonlinear_suite(tests, {types[t]}, n_samples, 1,
                                                       args.seed + t * args.reps + rep, options),
                           rep);
        } else if (args.suite == "table1") {
            const std::size_t n_samples = args.n_samples.value_or(2000);
            for (std::size_t rep = 0; rep < args.reps; ++rep)
                absorb(ccikit::run_table1_suite(tests, args.n_nodes, args.n_edges, n_samples, 1,
                                                args.seed + rep, options),
                       rep);
        } else {
            throw std::runtime_error("unknown suite '" + args.suite +
                                     "' (use linear-gaussian, nonlinear, table1, or scaling)");
        }
    } catch (...) {
        if (!report.rows.empty()) flush();
        throw;
    }

    std::cout << report.aggregate_table() << "report -> " << args.out_path << " ("
              << report.rows.size() << " rows)\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"causal discovery with conditional-correlation independence testing"};
    app.require_subcommand(1);

    SimulateArgs sim;
    CLI::App* simulate = app.add_subcommand("simulate", "generate a dataset from a random SEM");
    simulate->add_option("--model-type", sim.model_type,
                         "linear-gaussian or a connection type 1..14");
    simulate->add_option("--n-nodes", sim.n_nodes, "node count")->check(CLI::PositiveNumber);
    auto* edges_opt = simulate->add_option("--n-edges", sim.n_edges,
                                           "exact edge count (default: edge-prob model)");
    simulate->add_option("--edge-prob", sim.edge_prob, "forward-edge probability")
        ->check(CLI::Range(0.0, 1.0))
        ->excludes(edges_opt);
    simulate->add_option("--n-samples", sim.n_samples, "rows to draw")
        ->check(CLI::PositiveNumber);
    simulate->add_option("--seed", sim.seed, "RNG seed (default 0)");
    simulate->add_option("--out-dir", sim.out_dir, "output directory");

    SearchArgs search;
    CLI::App* search_cmd = app.add_subcommand("search", "run PC on a dataset CSV");
    search_cmd->add_option("data", search.data_path, "input dataset CSV")->required();
    search_cmd->add_option("--test", search.test, "cci, fisher-z, or rank");
    search_cmd->add_option("--alpha", search.alpha, "significance level");
    search_cmd->add_option("--basis", search.basis, "power:k (k <= 12) or hermite:k");
    search_cmd->add_flag("--early-exit", search.early_exit,
                         "stop CCI at the first Bonferroni-significant pair");
    search_cmd->add_flag("--stable", search.stable, "PC-Stable (order-independent) adjacency");
    search_cmd->add_option("--max-depth", search.max_depth, "cap on conditioning set size");
    search_cmd->add_option("--threads", search.threads, "worker threads (requires --stable)")
        ->check(CLI::PositiveNumber);
    search_cmd->add_option("--output", search.out_path, "pattern edge-list file");
    search_cmd->add_option("--summary", search.summary_path, "run summary JSON file");

    BenchmarkArgs bench;
    CLI::App* bench_cmd = app.add_subcommand("benchmark", "run an experiment suite");
    bench_cmd->add_option("--suite", bench.suite, "linear-gaussian, nonlinear, table1, scaling")
        ->required();
    bench_cmd->add_option("--test", bench.test, "test for the scaling suite");
    bench_cmd->add_option("--alpha", bench.alpha, "significance level");
    bench_cmd->add_option("--basis", bench.basis, "power:k (k <= 12) or hermite:k");
    bench_cmd->add_flag("--early-exit", bench.early_exit,
                        "stop CCI at the first Bonferroni-significant pair");
    bench_cmd->add_flag("--vanilla", bench.vanilla, "classic PC instead of PC-Stable");
    bench_cmd->add_option("--max-depth", bench.max_depth, "cap on conditioning set size");
    bench_cmd->add_option("--threads", bench.threads, "worker threads")
        ->check(CLI::PositiveNumber);
    bench_cmd->add_option("--seed", bench.seed, "master seed");
    bench_cmd->add_option("--reps", bench.reps, "repetitions per grid cell")
        ->check(CLI::PositiveNumber);
    bench_cmd->add_option("--sizes", bench.sizes, "sample sizes (linear-gaussian, scaling)");
    bench_cmd->add_option("--types", bench.types, "connection types (nonlinear)")
        ->check(CLI::Range(1, 14));
    bench_cmd->add_option("--n-samples", bench.n_samples, "sample size (nonlinear, table1)");
    bench_cmd->add_option("--n-nodes", bench.n_nodes, "node count (table1)");
    bench_cmd->add_option("--n-edges", bench.n_edges, "edge count (table1)");
    bench_cmd->add_option("--output", bench.out_path, "report CSV file");

    try {
        app.parse(argc, argv);
        if (simulate->parsed()) return cmd_simulate(sim);
        if (search_cmd->parsed()) return cmd_search(search);
        return cmd_benchmark(bench);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
