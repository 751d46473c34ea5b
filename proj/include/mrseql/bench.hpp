#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mrseql/classifier.hpp"

namespace mrseql {

/// A <name>_TRAIN / <name>_TEST pair. Files may carry a .txt/.tsv/.csv suffix
/// and may sit directly in the benchmark directory or in a <name>/ subdirectory.
struct DatasetPair {
    std::string name;
    std::filesystem::path train;
    std::filesystem::path test;
};

struct BenchSkip {
    std::string dataset;
    std::string reason;
};

/// Pairs sorted by name; TRAIN files without a TEST partner go to `skipped`.
std::vector<DatasetPair> discover_datasets(const std::filesystem::path& dir, std::vector<BenchSkip>& skipped);

struct BenchEntry {
    std::string dataset;
    Mode mode = Mode::MtSsSeqlLr;
    std::size_t classes = 0;
    std::size_t train_size = 0;
    std::size_t test_size = 0;
    double error = 0.0;
    /// (class id, fraction of that class's test series misclassified)
    std::vector<std::pair<int, double>> class_errors;
    Timing timing;
    double total_seconds = 0.0;
    /// Fractional rank among the modes run on this dataset.
    double rank = 0.0;
};

struct ModeSummary {
    Mode mode = Mode::MtSsSeqlLr;
    double average_error = 0.0;
    /// Mean over datasets of error / class count.
    double mpce = 0.0;
    int wins = 0;
    double average_rank = 0.0;
};

struct BenchReport {
    std::vector<BenchEntry> entries;
    std::vector<BenchSkip> skipped;
    std::vector<ModeSummary> summary;
};

struct BenchOptions {
    RunConfig config;
    std::vector<Mode> modes;
    /// Parallel (dataset, mode) jobs; each job trains single-threaded.
    std::size_t threads = 1;
};

/// Average ranks, 1 = lowest value; tied values share the mean of their positions.
std::vector<double> fractional_ranks(std::span<const double> values);

/// Per-class error fractions, ordered by class id.
std::vector<std::pair<int, double>> class_errors(const TimeSeriesDataset& test, std::span<const ClassPrediction> predictions);

/// Fills ranks and the per-mode summary from `report.entries`.
void summarize(BenchReport& report);

BenchEntry run_one(const DatasetPair& pair, const RunConfig& cfg);
BenchReport run_benchmark(const std::filesystem::path& dir, const BenchOptions& options, std::ostream* log = nullptr);

void write_report(std::ostream& out, const BenchReport& report);

}  // namespace mrseql
