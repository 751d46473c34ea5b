#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mrseql/data.hpp"
#include "mrseql/interpret.hpp"
#include "mrseql/linear.hpp"
#include "mrseql/multirep.hpp"

namespace mrseql {

/// The eight representation/learner combinations.
enum class Mode {
    SaxSeql,
    SfaSeql,
    MtSaxSeql,
    MtSfaSeql,
    MtSsSeql,
    MtSaxSeqlLr,
    MtSfaSeqlLr,
    MtSsSeqlLr,
};

inline constexpr std::array kAllModes{Mode::SaxSeql,   Mode::SfaSeql,     Mode::MtSaxSeql,   Mode::MtSfaSeql,
                                      Mode::MtSsSeql,  Mode::MtSaxSeqlLr, Mode::MtSfaSeqlLr, Mode::MtSsSeqlLr};

std::string_view to_string(Mode m);
Mode parse_mode(std::string_view name);
std::vector<Domain> mode_domains(Mode m);
[[nodiscard]] bool uses_lr(Mode m);
[[nodiscard]] bool is_multi(Mode m);

struct RunConfig {
    Mode mode = Mode::MtSsSeqlLr;
    ScheduleParams schedule;
    seql::Params seql;
    TransformOptions transform;
    double lambda = 1.0;
    std::size_t threads = 1;
};

/// Configs the mode trains on for series of length L.
RepSchedule mode_schedule(const RunConfig& cfg, std::size_t series_length);

/// Wall-clock seconds per phase.
struct Timing {
    double transform = 0.0;
    double learn = 0.0;
    double logreg = 0.0;
    double test = 0.0;
};

/// One binary problem: the ensemble for SEQL-only modes, features plus a
/// logistic regression for "+LR" modes.
struct ViewModel {
    int positive_class = 0;
    EnsembleModel ensemble;
    FeatureSet features;
    LrModel lr;
};

struct ClassPrediction {
    int label = 0;
    /// Winning view's score (ensemble sum) or probability (LR).
    double score = 0.0;
};

class Classifier {
public:
    static Classifier train(const TimeSeriesDataset& train, const RunConfig& cfg, Timing* timing = nullptr);

    [[nodiscard]] ClassPrediction predict(const TimeSeries& series) const;
    [[nodiscard]] std::vector<ClassPrediction> predict(const TimeSeriesDataset& test, Timing* timing = nullptr) const;

    /// Per-view score: ensemble sum, or LR probability.
    [[nodiscard]] std::vector<double> view_scores(const TimeSeries& series) const;

    [[nodiscard]] Mode mode() const noexcept { return mode_; }
    [[nodiscard]] const std::vector<int>& class_ids() const noexcept { return class_ids_; }
    [[nodiscard]] std::size_t series_length() const noexcept { return length_; }
    [[nodiscard]] const std::vector<ViewModel>& views() const noexcept { return views_; }
    [[nodiscard]] const std::vector<Representation>& representations() const noexcept { return reps_; }

    /// Weighted features of the view for `positive_class` (SEQL coefficients or
    /// LR weights, whichever makes the decision).
    [[nodiscard]] std::vector<ExplainFeature> decision_features(int positive_class) const;
    [[nodiscard]] bool sax_only() const;

    void save(std::ostream& out) const;
    void save(const std::filesystem::path& path) const;
    static Classifier load(std::istream& in);
    static Classifier load(const std::filesystem::path& path);

private:
    Mode mode_ = Mode::MtSsSeqlLr;
    std::vector<int> class_ids_;
    std::size_t length_ = 0;
    std::vector<Representation> reps_;
    std::vector<ViewModel> views_;
};

/// Fraction of predictions whose label differs from the truth.
double error_rate(const TimeSeriesDataset& test, std::span<const ClassPrediction> predictions);

}  // namespace mrseql
