#include "ccikit/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace ccikit {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            break;
        }
        out.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return out;
}

}  // namespace

Dataset::Dataset(std::vector<std::string> variables, std::vector<std::vector<double>> columns)
    : variables_(std::move(variables)), columns_(std::move(columns)) {
    if (variables_.empty()) throw std::invalid_argument("dataset needs at least one variable");
    if (variables_.size() != columns_.size())
        throw std::invalid_argument("variable/column count mismatch");
    n_samples_ = columns_.front().size();
    if (n_samples_ == 0) throw std::invalid_argument("no samples");
    for (std::size_t v = 0; v < variables_.size(); ++v) {
        if (variables_[v].empty()) throw std::invalid_argument("empty variable name");
        if (!index_.emplace(variables_[v], v).second)
            throw std::invalid_argument("duplicate variable name: " + variables_[v]);
        if (columns_[v].size() != n_samples_)
            throw std::invalid_argument("column length mismatch for " + variables_[v]);
        for (double value : columns_[v])
            if (!std::isfinite(value))
                throw std::invalid_argument("non-finite value in column " + variables_[v]);
    }
}

Dataset Dataset::load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty file " + path.string());
    std::vector<std::string> names;
    for (std::string_view field : split_fields(line)) {
        if (field.empty()) throw std::runtime_error("empty header field in " + path.string());
        names.emplace_back(field);
    }

    std::vector<std::vector<double>> columns(names.size());
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;  // tolerate a trailing blank line
        ++row;
        auto fields = split_fields(line);
        if (fields.size() != names.size()) {
            std::ostringstream msg;
            msg << path.string() << ": row " << row << " has " << fields.size()
                << " fields, expected " << names.size();
            throw std::runtime_error(msg.str());
        }
        for (std::size_t v = 0; v < fields.size(); ++v) {
            double value = 0.0;
            auto field = fields[v];
            auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
            if (ec != std::errc() || ptr != field.data() + field.size() ||
                !std::isfinite(value)) {
                std::ostringstream msg;
                msg << path.string() << ": bad value '" << std::string(field) << "' at row "
                    << row << ", column " << names[v];
                throw std::runtime_error(msg.str());
            }
            columns[v].push_back(value);
        }
    }
    if (row == 0) throw std::runtime_error("no samples in " + path.string());
    return Dataset(std::move(names), std::move(columns));
}

void Dataset::save_csv(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    for (std::size_t v = 0; v < variables_.size(); ++v) {
        if (v) out << ',';
        out << variables_[v];
    }
    out << '\n';
    for (std::size_t i = 0; i < n_samples_; ++i) {
        for (std::size_t v = 0; v < variables_.size(); ++v) {
            if (v) out << ',';
            out << format_double(columns_[v][i]);
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

bool Dataset::has_variable(std::string_view name) const {
    return index_.find(std::string(name)) != index_.end();
}

std::size_t Dataset::index_of(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) throw std::out_of_range("unknown variable: " + std::string(name));
    return it->second;
}

const std::vector<double>& Dataset::column(std::size_t idx) const {
    if (idx >= columns_.size()) throw std::out_of_range("column index out of range");
    return columns_[idx];
}

const std::vector<double>& Dataset::column(std::string_view name) const {
    return columns_[index_of(name)];
}

double median(std::span<const double> x) {
    if (x.empty()) throw std::invalid_argument("median of empty vector");
    std::vector<double> sorted(x.begin(), x.end());
    std::sort(sorted.begin(), sorted.end());
    std::size_t mid = sorted.size() / 2;
    if (sorted.size() % 2 == 1) return sorted[mid];
    return 0.5 * (sorted[mid - 1] + sorted[mid]);
}

double mad(std::span<const double> x) {
    double m = median(x);
    std::vector<double> devs(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) devs[i] = std::abs(x[i] - m);
    return median(devs);
}

double sample_mean(std::span<const double> x) {
    if (x.empty()) throw std::invalid_argument("mean of empty vector");
    double sum = 0.0;
    for (double v : x) sum += v;
    return sum / static_cast<double>(x.size());
}

double sample_std(std::span<const double> x) {
    if (x.size() < 2) throw std::invalid_argument("std needs at least two samples");
    double m = sample_mean(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

std::vector<double> standardize(std::span<const double> x) {
    double m = sample_mean(x);
    double s = sample_std(x);
    if (s == 0.0) throw std::domain_error("degenerate column");
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - m) / s;
    return out;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw std::runtime_error("format_double failed");
    return std::string(buf, ptr);
}

}  // namespace ccikit
