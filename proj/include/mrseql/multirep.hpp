#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mrseql/data.hpp"
#include "mrseql/sax.hpp"
#include "mrseql/seql.hpp"
#include "mrseql/sfa.hpp"
#include "mrseql/symbolic.hpp"

namespace mrseql {

struct ScheduleParams {
    std::vector<Domain> domains{Domain::Sax};
    int min_window = 20;
    /// Window step is round(sqrt(L) / step_divisor), at least 1.
    double step_divisor = 1.0;
    int alphabet = 4;
    int sax_word_length = 16;
    int sfa_word_length = 8;
};

struct RepSchedule {
    std::vector<SymbolicConfig> configs;
};

int window_step(std::size_t series_length, double step_divisor);

/// Windows min_window, min_window + step, ... <= L for each domain, in domain
/// order. Windows are raised to at least the domain's word length.
RepSchedule build_schedule(std::size_t series_length, const ScheduleParams& params);

/// Single representation with l = ceil(0.2 L), raised to at least w.
SymbolicConfig single_config(std::size_t series_length, Domain domain, const ScheduleParams& params);

struct TransformOptions {
    bool numerosity_reduction = true;
    bool sfa_norm_window = true;
    bool sfa_drop_dc = false;
};

/// A symbolic config plus whatever it learned from training data (the MCB
/// table for SFA).
struct Representation {
    SymbolicConfig config;
    TransformOptions options;
    std::optional<McbTable> mcb;

    [[nodiscard]] SymbolicSequence transform(std::span<const double> series) const;
    [[nodiscard]] SymbolicSequence transform(std::span<const double> series, bool numerosity_reduction) const;
};

SaxConfig sax_config(const SymbolicConfig& cfg, bool numerosity_reduction);
SfaConfig sfa_config(const SymbolicConfig& cfg, const TransformOptions& options);

/// Fits the MCB table on `train` when the config is SFA.
Representation fit_representation(const TimeSeriesDataset& train, const SymbolicConfig& cfg,
                                  const TransformOptions& options);

/// Representation together with the transformed training series.
struct PreparedRepresentation {
    Representation rep;
    std::vector<SymbolicSequence> sequences;
};

std::vector<PreparedRepresentation> prepare(const TimeSeriesDataset& train, const RepSchedule& schedule,
                                            const TransformOptions& options, std::size_t threads = 1);

struct EnsembleOptions {
    seql::Params seql;
    TransformOptions transform;
    std::size_t threads = 1;
};

/// One sequence-learner model per representation; scores add up.
struct EnsembleModel {
    std::vector<Representation> representations;
    std::vector<seql::Model> models;

    /// Sum of member scores given the series already transformed by each representation.
    [[nodiscard]] double score(std::span<const SymbolicSequence> transformed) const;
    [[nodiscard]] double score(std::span<const double> series) const;
};

struct Prediction {
    double score = 0.0;
    int label = -1;
};

EnsembleModel train_ensemble(std::span<const PreparedRepresentation> prepared, const BinaryView& view,
                             const EnsembleOptions& options);
EnsembleModel train_ensemble(const TimeSeriesDataset& ds, const BinaryView& view, const RepSchedule& schedule,
                             const EnsembleOptions& options);

/// Label is the sign of the summed score, with 0 mapped to -1.
Prediction predict_ensemble(const EnsembleModel& ensemble, const TimeSeries& series);

struct MultiRepFeature {
    seql::Subsequence tokens;
    /// Sequence-learner coefficient, kept as provenance.
    double coefficient = 0.0;
    SymbolicConfig config;
};

struct FeatureSet {
    std::vector<Representation> representations;
    std::vector<MultiRepFeature> features;

    [[nodiscard]] const Representation* find(const SymbolicConfig& cfg) const;
};

/// Union of every per-representation model's features, merged only when both
/// subsequence and config match.
FeatureSet select_features(std::span<const PreparedRepresentation> prepared, const BinaryView& view,
                           const EnsembleOptions& options);
FeatureSet select_features(const TimeSeriesDataset& ds, const BinaryView& view, const RepSchedule& schedule,
                           const EnsembleOptions& options);

/// "[representation SAX,20,16,4]" section, with MCB columns for SFA.
void write_representation(std::ostream& out, const Representation& rep);
Representation parse_representation(std::string_view header, std::span<const std::string> lines);

/// Sectioned text: one representation section per config, each followed by
/// its model lines.
void write_ensemble(std::ostream& out, const EnsembleModel& ensemble);
EnsembleModel read_ensemble(std::istream& in);

void write_feature_set(std::ostream& out, const FeatureSet& features);
FeatureSet read_feature_set(std::istream& in);

}  // namespace mrseql
