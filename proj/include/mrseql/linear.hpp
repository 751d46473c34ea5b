#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mrseql/data.hpp"
#include "mrseql/multirep.hpp"

namespace mrseql {

/// Binary presence matrix: rows are series, columns are features. Each row
/// stores the sorted indices of its non-zero columns.
struct DesignMatrix {
    std::size_t columns = 0;
    std::vector<std::vector<std::uint32_t>> rows;

    [[nodiscard]] std::size_t row_count() const noexcept { return rows.size(); }
    [[nodiscard]] double at(std::size_t row, std::size_t column) const;
    [[nodiscard]] std::vector<double> dense_row(std::size_t row) const;
};

/// Per-(series, config) transforms, computed at most once.
class TransformCache {
public:
    explicit TransformCache(std::size_t series_count) : series_count_(series_count) {}

    /// Transforms of every series under `rep`, computed on first use.
    const std::vector<SymbolicSequence>& get(const Representation& rep, const TimeSeriesDataset& ds);
    /// Seeds the cache, e.g. with training transforms already computed.
    void put(const SymbolicConfig& cfg, std::vector<SymbolicSequence> sequences);
    [[nodiscard]] std::size_t computed() const noexcept { return computed_; }

private:
    std::size_t series_count_;
    std::size_t computed_ = 0;
    std::map<SymbolicConfig, std::vector<SymbolicSequence>> cache_;
};

/// Throws if a feature's config has no representation, or an SFA
/// representation has no MCB table.
DesignMatrix build_matrix(const TimeSeriesDataset& ds, const FeatureSet& features, TransformCache& cache);

/// Presence row for one series without a cache.
std::vector<double> feature_row(std::span<const double> series, const FeatureSet& features);

struct LrModel {
    std::vector<double> weights;
    double intercept = 0.0;
    double lambda = 1.0;
};

struct LrOptions {
    double lambda = 1.0;
    double gradient_tol = 1e-6;
    int max_iters = 10000;
};

struct LrFit {
    LrModel model;
    int iterations = 0;
    double loss = 0.0;
    double gradient_norm = 0.0;
};

/// sum_i log(1 + exp(-y_i (w.x_i + b))) + lambda/2 |w|^2; intercept unregularized.
double lr_loss(const DesignMatrix& x, std::span<const int> labels, const LrModel& model);
/// Gradient w.r.t. (w..., b); the intercept component is last.
std::vector<double> lr_gradient(const DesignMatrix& x, std::span<const int> labels, const LrModel& model);

/// Quasi-Newton (L-BFGS) minimization with backtracking line search; stops when
/// the gradient infinity-norm falls below gradient_tol or after max_iters.
LrFit train_lr(const DesignMatrix& x, std::span<const int> labels, const LrOptions& options = {});

struct LrPrediction {
    double probability = 0.5;
    int label = -1;
};

/// Label is +1 only when the probability exceeds 0.5.
LrPrediction predict_lr(const LrModel& model, std::span<const double> row);
LrPrediction predict_lr(const LrModel& model, std::span<const std::uint32_t> active_columns);

void write_lr(std::ostream& out, const LrModel& model, const FeatureSet& features);
/// Reads the "[lr ...]" section lines; also restores the feature list.
LrModel parse_lr(std::string_view header, std::span<const std::string> lines, FeatureSet& features);

}  // namespace mrseql
