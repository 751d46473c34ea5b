#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace mrseql {

/// Population standard deviation below this is treated as a flat window.
inline constexpr double kFlatEpsilon = 1e-8;

struct TimeSeries {
    std::vector<double> values;
    int label = 0;
};

/// Labelled series of uniform length, as read from a UCR archive file.
class TimeSeriesDataset {
public:
    TimeSeriesDataset() = default;

    /// Validates uniform length, finiteness and at least one series.
    explicit TimeSeriesDataset(std::vector<TimeSeries> series);

    [[nodiscard]] const std::vector<TimeSeries>& series() const noexcept { return series_; }
    [[nodiscard]] const TimeSeries& operator[](std::size_t i) const { return series_[i]; }
    [[nodiscard]] std::size_t size() const noexcept { return series_.size(); }
    [[nodiscard]] bool empty() const noexcept { return series_.empty(); }
    /// Series length L.
    [[nodiscard]] std::size_t length() const noexcept { return length_; }
    /// Sorted distinct labels.
    [[nodiscard]] const std::vector<int>& class_ids() const noexcept { return class_ids_; }
    [[nodiscard]] std::size_t count(int label) const;

private:
    std::vector<TimeSeries> series_;
    std::vector<int> class_ids_;
    std::size_t length_ = 0;
};

/// One-vs-all relabelling of a dataset: +1 for the positive class, -1 otherwise.
struct BinaryView {
    int positive_class = 0;
    std::vector<int> labels;
};

enum class Delimiter { Auto, Comma, Tab };

/// Reads a UCR text file: one series per line, label first. Delimiter is
/// detected from the first line when `Auto` (comma, tab, else whitespace).
TimeSeriesDataset load_ucr(const std::filesystem::path& path, Delimiter delimiter = Delimiter::Auto);

/// Writes comma-separated rows with round-trip precision.
void save_ucr(const TimeSeriesDataset& ds, const std::filesystem::path& path);

/// Z-normalizes with the population standard deviation. Windows whose
/// deviation is below `epsilon` become all zeros.
std::vector<double> z_normalize(std::span<const double> values, double epsilon = kFlatEpsilon);

/// One view per class for multiclass data; a single view (positive = smaller
/// class id) for binary data. Throws on single-class datasets.
std::vector<BinaryView> binary_views(const TimeSeriesDataset& ds);

BinaryView make_view(const TimeSeriesDataset& ds, int positive_class);

}  // namespace mrseql
