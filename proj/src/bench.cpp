#include "ccikit/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "ccikit/simulate.hpp"

namespace ccikit {

namespace {

std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : "NA"; }

using Clock = std::chrono::steady_clock;

double ms_between(Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
}

ReportRow run_one(const BenchTest& bench, const Dag& truth, const Dataset& data,
                  const SuiteOptions& options) {
    const std::unique_ptr<CiTest> test = bench.make(truth);
    SearchConfig config;
    config.test = test.get();
    config.max_depth = options.max_depth;
    config.stable = options.stable;
    config.threads = options.threads;

    const auto start = Clock::now();
    const PcResult result = pc(data.variables(), config, data);
    const auto stop = Clock::now();

    const AdjacencyScore score = adjacency_score(result.pattern, truth.graph());
    ReportRow row;
    row.test = bench.name;
    row.precision = score.precision;
    row.recall = score.recall;
    row.elapsed_ms = ms_between(start, stop);
    return row;
}

struct GroupKey {
    std::string test;
    std::size_t n;
    std::string model_type;
    bool operator==(const GroupKey&) const = default;
};

}  // namespace

AdjacencyScore adjacency_score(const Graph& estimated, const Graph& truth) {
    if (estimated.nodes() != truth.nodes())
        throw std::invalid_argument("node-set mismatch between estimated and true graphs");
    AdjacencyScore score;
    const std::size_t n = truth.node_count();
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            const bool in_estimated = estimated.adjacent(a, b);
            const bool in_truth = truth.adjacent(a, b);
            if (in_estimated && in_truth) ++score.tp;
            if (in_estimated && !in_truth) ++score.fp;
            if (!in_estimated && in_truth) ++score.fn;
        }
    }
    if (score.tp + score.fp > 0)
        score.precision = static_cast<double>(score.tp) / static_cast<double>(score.tp + score.fp);
    if (score.tp + score.fn > 0)
        score.recall = static_cast<double>(score.tp) / static_cast<double>(score.tp + score.fn);
    return score;
}

std::string ExperimentReport::to_csv() const {
    std::string out = "config,test,n,model_type,precision,recall,elapsed_ms,seed\n";
    for (const ReportRow& row : rows) {
        out += row.config + ',' + row.test + ',' + std::to_string(row.n) + ',' + row.model_type +
               ',' + cell(row.precision) + ',' + cell(row.recall) + ',' +
               format_double(row.elapsed_ms) + ',' + std::to_string(row.seed) + '\n';
    }
    return out;
}

std::vector<Aggregate> ExperimentReport::aggregates() const {
    std::vector<GroupKey> order;
    std::vector<Aggregate> out;
    for (const ReportRow& row : rows) {
        const GroupKey key{row.test, row.n, row.model_type};
        auto it = std::find(order.begin(), order.end(), key);
        if (it == order.end()) {
            order.push_back(key);
            out.push_back(Aggregate{row.test, row.n, row.model_type, 0, {}, {}, 0, 0, 0.0});
            it = order.end() - 1;
        }
        Aggregate& agg = out[static_cast<std::size_t>(it - order.begin())];
        ++agg.rows;
        agg.mean_elapsed_ms += row.elapsed_ms;
        if (row.precision)
            agg.mean_precision = agg.mean_precision.value_or(0.0) + *row.precision;
        else
            ++agg.precision_excluded;
        if (row.recall)
            agg.mean_recall = agg.mean_recall.value_or(0.0) + *row.recall;
        else
            ++agg.recall_excluded;
    }
    for (Aggregate& agg : out) {
        agg.mean_elapsed_ms /= static_cast<double>(agg.rows);
        if (agg.mean_precision)
            *agg.mean_precision /= static_cast<double>(agg.rows - agg.precision_excluded);
        if (agg.mean_recall) *agg.mean_recall /= static_cast<double>(agg.rows - agg.recall_excluded);
    }
    return out;
}

std::string ExperimentReport::aggregate_table() const {
    std::ostringstream out;
    out << std::left << std::setw(10) << "test" << std::right << std::setw(7) << "n" << "  "
        << std::left << std::setw(16) << "model" << std::right << std::setw(5) << "rows"
        << std::setw(11) << "precision" << std::setw(9) << "recall" << std::setw(7) << "excl"
        << std::setw(12) << "mean_ms" << '\n';
    out << std::fixed;
    for (const Aggregate& agg : aggregates()) {
        out << std::left << std::setw(10) << agg.test << std::right << std::setw(7) << agg.n
            << "  " << std::left << std::setw(16) << agg.model_type << std::right << std::setw(5)
            << agg.rows;
        auto ratio = [&](const std::optional<double>& v) {
            std::ostringstream s;
            if (v)
                s << std::fixed << std::setprecision(3) << *v;
            else
                s << "NA";
            return s.str();
        };
        out << std::setw(11) << ratio(agg.mean_precision) << std::setw(9)
            << ratio(agg.mean_recall) << std::setw(7)
            << (std::to_string(agg.precision_excluded) + "/" + std::to_string(agg.recall_excluded))
            << std::setw(12) << std::setprecision(2) << agg.mean_elapsed_ms << '\n';
    }
    return out.str();
}

std::vector<BenchTest> standard_tests(double alpha, const BasisSpec& basis, bool early_exit) {
    std::vector<BenchTest> tests;
    tests.push_back({"cci", [alpha, basis, early_exit](const Dag&) {
                         return std::make_unique<CciTest>(alpha, basis, early_exit);
                     }});
    tests.push_back(
        {"fisher-z", [alpha](const Dag&) { return std::make_unique<FisherZTest>(alpha); }});
    tests.push_back(
        {"rank", [alpha](const Dag&) { return std::make_unique<RankPartialTest>(alpha); }});
    return tests;
}

BenchTest oracle_bench_test() {
    return {"oracle", [](const Dag& truth) { return oracle_test(truth); }};
}

ExperimentReport run_linear_gaussian_suite(const std::vector<BenchTest>& tests,
                                           const std::vector<std::size_t>& sizes,
                                           std::size_t reps, std::uint64_t seed,
                                           const SuiteOptions& options) {
    if (reps == 0) throw std::invalid_argument("repetition count must be at least 1");
    ExperimentReport report;
    for (std::size_t s = 0; s < sizes.size(); ++s) {
        for (std::size_t rep = 0; rep < reps; ++rep) {
            const std::uint64_t dataset_seed = seed + s * reps + rep;
            const Dag dag = random_dag_ordered(4, 0.5, dataset_seed);
            const auto [data, sem] =
                simulate_linear_gaussian(dag, sizes[s], dataset_seed ^ kSemStreamSalt);
            for (const BenchTest& bench : tests) {
                try {
                    ReportRow row = run_one(bench, dag, data, options);
                    row.config = "n" + std::to_string(sizes[s]) + "-r" + std::to_string(rep);
                    row.n = sizes[s];
                    row.model_type = "linear-gaussian";
                    row.seed = dataset_seed;
                    report.rows.push_back(std::move(row));
                } catch (const std::exception& e) {
                    throw std::runtime_error("linear-gaussian suite failed at n=" +
                                             std::to_string(sizes[s]) + " rep=" +
                                             std::to_string(rep) + " test=" + bench.name + ": " +
                                             e.what());
                }
            }
        }
    }
    return report;
}

ExperimentReport run_nonlinear_suite(const std::vector<BenchTest>& tests,
                                     const std::vector<int>& type_indices, std::size_t n_samples,
                                     std::size_t reps, std::uint64_t seed,
                                     const SuiteOptions& options) {
    if (reps == 0) throw std::invalid_argument("repetition count must be at least 1");
    ExperimentReport report;
    for (std::size_t t = 0; t < type_indices.size(); ++t) {
        for (std::size_t rep = 0; rep < reps; ++rep) {
            const std::uint64_t dataset_seed = seed + t * reps + rep;
            const Dag dag = random_dag_fixed_edges(5, 5, dataset_seed);
            const auto [data, sem] =
                simulate_generalized(dag, type_indices[t], n_samples, dataset_seed ^ kSemStreamSalt);
            for (const BenchTest& bench : tests) {
                try {
                    ReportRow row = run_one(bench, dag, data, options);
                    row.config = "t" + std::to_string(type_indices[t]) + "-r" +
                                 std::to_string(rep);
                    row.n = n_samples;
                    row.model_type = std::to_string(type_indices[t]);
                    row.seed = dataset_seed;
                    report.rows.push_back(std::move(row));
                } catch (const std::exception& e) {
                    throw std::runtime_error("nonlinear suite failed at type=" +
                                             std::to_string(type_indices[t]) + " rep=" +
                                             std::to_string(rep) + " test=" + bench.name + ": " +
                                             e.what());
                }
            }
        }
    }
    return report;
}

ExperimentReport run_table1_suite(const std::vector<BenchTest>& tests, std::size_t n_nodes,
                                  std::size_t n_edges, std::size_t n_samples, std::size_t reps,
                                  std::uint64_t seed, const SuiteOptions& options) {
    if (reps == 0) throw std::invalid_argument("repetition count must be at least 1");
    ExperimentReport report;
    for (std::size_t rep = 0; rep < reps; ++rep) {
        const std::uint64_t dataset_seed = seed + rep;
        const auto [data, dag] = simulate_table1(dataset_seed, n_nodes, n_edges, n_samples);
        for (const BenchTest& bench : tests) {
            try {
                ReportRow row = run_one(bench, dag, data, options);
                row.config = "table1-r" + std::to_string(rep);
                row.n = n_samples;
                row.model_type = "13";
                row.seed = dataset_seed;
                report.rows.push_back(std::move(row));
            } catch (const std::exception& e) {
                throw std::runtime_error("sparse suite failed at rep=" + std::to_string(rep) +
                                         " test=" + bench.name + ": " + e.what());
            }
        }
    }
    return report;
}

std::string ScalingReport::to_csv() const {
    std::string out = "n,mean_ms,median_ms\n";
    for (const ScalingRow& row : rows)
        out += std::to_string(row.n) + ',' + format_double(row.mean_ms) + ',' +
               format_double(row.median_ms) + '\n';
    return out;
}

ScalingReport run_scaling(const CiTest& test, const std::vector<std::size_t>& sizes,
                          std::size_t cond_set_size, std::size_t reps, std::uint64_t seed) {
    if (sizes.empty()) throw std::invalid_argument("scaling needs at least one sample size");
    if (reps == 0) throw std::invalid_argument("repetition count must be at least 1");
    if (!std::is_sorted(sizes.begin(), sizes.end()))
        throw std::invalid_argument("sample sizes must be ascending");

    // Common-cause layout: every conditioning variable feeds both endpoints,
    // so the truth is x ind y | z and the call exercises the full residual
    // machinery.
    Graph g = [&] {
        std::vector<std::string> names;
        for (std::size_t i = 1; i <= cond_set_size; ++i) names.push_back("c" + std::to_string(i));
        names.push_back("x");
        names.push_back("y");
        return Graph(names);
    }();
    const std::size_t xi = g.index_of("x");
    const std::size_t yi = g.index_of("y");
    std::vector<std::size_t> zi;
    for (std::size_t i = 0; i < cond_set_size; ++i) {
        g.add_directed(i, xi);
        g.add_directed(i, yi);
        zi.push_back(i);
    }
    const Dag dag(std::move(g));

    ScalingReport report;
    for (std::size_t s = 0; s < sizes.size(); ++s) {
        const auto [data, sem] = simulate_linear_gaussian(dag, sizes[s], seed + s);
        for (std::size_t warm = 0; warm < 3; ++warm) test.independent(xi, yi, zi, data);
        std::vector<double> times;
        times.reserve(reps);
        for (std::size_t rep = 0; rep < reps; ++rep) {
            const auto start = Clock::now();
            test.independent(xi, yi, zi, data);
            times.push_back(ms_between(start, Clock::now()));
        }
        std::sort(times.begin(), times.end());
        double total = 0.0;
        for (double t : times) total += t;
        ScalingRow row;
        row.n = sizes[s];
        row.mean_ms = total / static_cast<double>(times.size());
        row.median_ms = times.size() % 2 == 1
                            ? times[times.size() / 2]
                            : 0.5 * (times[times.size() / 2 - 1] + times[times.size() / 2]);
        report.rows.push_back(row);
    }

    // Least-squares slope of ln(mean time) against ln(N).
    if (report.rows.size() >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (const ScalingRow& row : report.rows) {
            const double lx = std::log(static_cast<double>(row.n));
            const double ly = std::log(std::max(row.mean_ms, 1e-9));
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
        }
        const double k = static_cast<double>(report.rows.size());
        report.loglog_slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    }
    return report;
}

}  // namespace ccikit
