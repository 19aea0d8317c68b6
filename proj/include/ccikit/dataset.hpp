#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ccikit {

/// Immutable rectangular dataset of continuous samples, stored column-major.
/// All entries are finite; variable names are unique and nonempty.
class Dataset {
public:
    Dataset(std::vector<std::string> variables, std::vector<std::vector<double>> columns);

    static Dataset load_csv(const std::filesystem::path& path);
    void save_csv(const std::filesystem::path& path) const;

    std::size_t sample_count() const { return n_samples_; }
    std::size_t variable_count() const { return variables_.size(); }
    const std::vector<std::string>& variables() const { return variables_; }

    bool has_variable(std::string_view name) const;
    std::size_t index_of(std::string_view name) const;

    const std::vector<double>& column(std::size_t idx) const;
    const std::vector<double>& column(std::string_view name) const;

private:
    std::vector<std::string> variables_;
    std::vector<std::vector<double>> columns_;
    std::unordered_map<std::string, std::size_t> index_;
    std::size_t n_samples_ = 0;
};

/// A named column together with its values; keeps no ownership.
struct ColumnView {
    std::span<const double> data;
    std::string_view name;
};

double median(std::span<const double> x);

/// Median absolute deviation from the median.
double mad(std::span<const double> x);

double sample_mean(std::span<const double> x);

/// Sample standard deviation with the N-1 denominator.
double sample_std(std::span<const double> x);

/// Centers and scales to sample mean 0, sample std 1. Throws on zero variance.
std::vector<double> standardize(std::span<const double> x);

/// Round-trippable decimal rendering of a double (shortest form that parses back exactly).
std::string format_double(double v);

}  // namespace ccikit
