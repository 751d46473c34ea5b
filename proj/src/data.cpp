#include "mrseql/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <string_view>

#include "mrseql/error.hpp"

namespace mrseql {

TimeSeriesDataset::TimeSeriesDataset(std::vector<TimeSeries> series) : series_(std::move(series)) {
    if (series_.empty()) throw FormatError("empty dataset");
    length_ = series_.front().values.size();
    for (std::size_t i = 0; i < series_.size(); ++i) {
        const auto& s = series_[i];
        if (s.values.empty()) throw FormatError("series " + std::to_string(i) + " has no values");
        if (s.values.size() != length_) {
            throw FormatError("series " + std::to_string(i) + " has length " + std::to_string(s.values.size()) +
                              ", expected " + std::to_string(length_));
        }
        for (double v : s.values) {
            if (!std::isfinite(v)) throw FormatError("series " + std::to_string(i) + " has a non-finite value");
        }
        class_ids_.push_back(s.label);
    }
    std::sort(class_ids_.begin(), class_ids_.end());
    class_ids_.erase(std::unique(class_ids_.begin(), class_ids_.end()), class_ids_.end());
}

std::size_t TimeSeriesDataset::count(int label) const {
    return static_cast<std::size_t>(
        std::count_if(series_.begin(), series_.end(), [label](const TimeSeries& s) { return s.label == label; }));
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line, char delim) {
    std::vector<std::string_view> out;
    if (delim == ' ') {
        std::size_t i = 0;
        while (i < line.size()) {
            while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
            std::size_t j = i;
            while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
            if (j > i) out.push_back(line.substr(i, j - i));
            i = j;
        }
        return out;
    }
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(delim, start);
        auto field = line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
        while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
        while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) field.remove_suffix(1);
        out.push_back(field);
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

double parse_number(std::string_view cell, std::size_t row, std::size_t col) {
    if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        throw ParseError("row " + std::to_string(row) + ", column " + std::to_string(col) + ": cannot parse '" +
                         std::string(cell) + "' as a finite number");
    }
    return v;
}

char detect(std::string_view line) {
    if (line.find(',') != std::string_view::npos) return ',';
    if (line.find('\t') != std::string_view::npos) return '\t';
    return ' ';
}

}  // namespace

TimeSeriesDataset load_ucr(const std::filesystem::path& path, Delimiter delimiter) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());

    std::vector<TimeSeries> rows;
    std::string line;
    char delim = delimiter == Delimiter::Comma ? ',' : delimiter == Delimiter::Tab ? '\t' : 0;
    std::size_t row = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++row;  // 1-based file line, blank lines included
        std::string_view view(line);
        while (!view.empty() && (view.back() == '\r' || view.back() == ' ' || view.back() == '\t')) {
            view.remove_suffix(1);
        }
        if (view.empty()) continue;
        if (delim == 0) delim = detect(view);
        auto fields = split_fields(view, delim);
        if (fields.size() < 2) {
            throw FormatError("row " + std::to_string(row) + ": expected a label followed by values");
        }
        if (width == 0) {
            width = fields.size();
        } else if (fields.size() != width) {
            throw FormatError("row " + std::to_string(row) + " has " + std::to_string(fields.size() - 1) +
                              " values, expected " + std::to_string(width - 1));
        }
        TimeSeries ts;
        double label = parse_number(fields[0], row, 0);
        if (label != std::floor(label) || std::abs(label) > std::numeric_limits<int>::max()) {
            throw ParseError("row " + std::to_string(row) + ": label '" + std::string(fields[0]) +
                             "' is not an integer");
        }
        ts.label = static_cast<int>(label);
        ts.values.reserve(fields.size() - 1);
        for (std::size_t c = 1; c < fields.size(); ++c) ts.values.push_back(parse_number(fields[c], row, c));
        rows.push_back(std::move(ts));
    }
    if (rows.empty()) throw FormatError("empty dataset: " + path.string());
    return TimeSeriesDataset(std::move(rows));
}

void save_ucr(const TimeSeriesDataset& ds, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << std::setprecision(17);
    for (const auto& s : ds.series()) {
        out << s.label;
        for (double v : s.values) out << ',' << v;
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
}

std::vector<double> z_normalize(std::span<const double> values, double epsilon) {
    const auto n = static_cast<double>(values.size());
    std::vector<double> out(values.size(), 0.0);
    if (values.empty()) return out;
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / n);
    if (sd < epsilon) return out;
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - mean) / sd;
    return out;
}

BinaryView make_view(const TimeSeriesDataset& ds, int positive_class) {
    if (ds.count(positive_class) == 0) throw InvalidArgument("class " + std::to_string(positive_class) + " not in dataset");
    BinaryView v;
    v.positive_class = positive_class;
    v.labels.reserve(ds.size());
    for (const auto& s : ds.series()) v.labels.push_back(s.label == positive_class ? 1 : -1);
    return v;
}

std::vector<BinaryView> binary_views(const TimeSeriesDataset& ds) {
    const auto& classes = ds.class_ids();
    if (classes.size() < 2) throw InvalidArgument("dataset has a single class; need at least two");
    if (classes.size() == 2) return {make_view(ds, classes.front())};
    std::vector<BinaryView> views;
    views.reserve(classes.size());
    for (int c : classes) views.push_back(make_view(ds, c));
    return views;
}

}  // namespace mrseql
