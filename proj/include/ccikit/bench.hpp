#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ccikit/citests.hpp"
#include "ccikit/graph.hpp"
#include "ccikit/pcsearch.hpp"

namespace ccikit {

struct AdjacencyScore {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::optional<double> precision;  // empty when tp + fp == 0
    std::optional<double> recall;     // empty when tp + fn == 0
};

/// Compares unordered adjacency sets only; orientation is ignored. Node sets
/// must match.
AdjacencyScore adjacency_score(const Graph& estimated, const Graph& truth);

struct ReportRow {
    std::string config;
    std::string test;
    std::size_t n = 0;
    std::string model_type;
    std::optional<double> precision;
    std::optional<double> recall;
    double elapsed_ms = 0.0;
    std::uint64_t seed = 0;
};

struct Aggregate {
    std::string test;
    std::size_t n = 0;
    std::string model_type;
    std::size_t rows = 0;
    std::optional<double> mean_precision;  // empty if every row was undefined
    std::optional<double> mean_recall;
    std::size_t precision_excluded = 0;  // rows with undefined precision
    std::size_t recall_excluded = 0;
    double mean_elapsed_ms = 0.0;
};

struct ExperimentReport {
    std::vector<ReportRow> rows;

    /// CSV with header config,test,n,model_type,precision,recall,elapsed_ms,seed;
    /// undefined values as NA.
    std::string to_csv() const;

    /// Means per (test, n, model_type); undefined rows excluded from the mean
    /// with the exclusion counted.
    std::vector<Aggregate> aggregates() const;

    /// Aggregates rendered as an aligned text table.
    std::string aggregate_table() const;
};

/// One benchmarked test: a name and a factory building the per-repetition
/// CiTest. The true DAG is available so a d-separation oracle can stand in
/// for a data-driven test.
struct BenchTest {
    std::string name;
    std::function<std::unique_ptr<CiTest>(const Dag& truth)> make;
};

/// The standard trio: cci, fisher-z, rank at the given alpha.
std::vector<BenchTest> standard_tests(double alpha, const BasisSpec& basis = BasisSpec::power(),
                                      bool early_exit = false);
BenchTest oracle_bench_test();

struct SuiteOptions {
    bool stable = true;
    std::optional<std::size_t> max_depth;
    std::size_t threads = 1;
};

/// Linear-Gaussian grid: per (size, rep) one 4-node DAG (edge probability
/// 0.5) and dataset, every test run on the same data. The per-repetition
/// seed is master seed + linear row index over the (size, rep) grid.
ExperimentReport run_linear_gaussian_suite(const std::vector<BenchTest>& tests,
                                           const std::vector<std::size_t>& sizes,
                                           std::size_t reps, std::uint64_t seed,
                                           const SuiteOptions& options = {});

/// Nonlinear grid over connection types: per (type, rep) one 5-node 5-edge
/// DAG through the generalized SEM.
ExperimentReport run_nonlinear_suite(const std::vector<BenchTest>& tests,
                                     const std::vector<int>& type_indices,
                                     std::size_t n_samples, std::size_t reps,
                                     std::uint64_t seed, const SuiteOptions& options = {});

/// Sparse log-cosh benchmark at a chosen scale; one row per (rep, test).
ExperimentReport run_table1_suite(const std::vector<BenchTest>& tests, std::size_t n_nodes,
                                  std::size_t n_edges, std::size_t n_samples, std::size_t reps,
                                  std::uint64_t seed, const SuiteOptions& options = {});

struct ScalingRow {
    std::size_t n = 0;
    double mean_ms = 0.0;
    double median_ms = 0.0;
};

struct ScalingReport {
    std::vector<ScalingRow> rows;
    double loglog_slope = 0.0;
    std::string to_csv() const;
};

/// Times repeated single CI calls with one conditioning variable at each
/// sample size (3 warm-up calls discarded), then fits a log-log slope of
/// mean time against N.
ScalingReport run_scaling(const CiTest& test, const std::vector<std::size_t>& sizes,
                          std::size_t cond_set_size, std::size_t reps, std::uint64_t seed);

}  // namespace ccikit
