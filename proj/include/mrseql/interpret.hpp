#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "mrseql/data.hpp"
#include "mrseql/seql.hpp"
#include "mrseql/symbolic.hpp"

namespace mrseql {

/// A weighted SAX subsequence to map back onto a raw series.
struct ExplainFeature {
    seql::Subsequence tokens;
    double coefficient = 0.0;
    SymbolicConfig config;
};

/// Classification weight per time step.
struct MetaTimeSeries {
    std::vector<double> weights;
    std::string model_id;
    std::size_t series_id = 0;
};

struct ExplainOptions {
    /// Put each match's whole share on the first raw index of the matched
    /// sub-word instead of spreading it over the sub-word's span.
    bool single_index = false;
};

/// One occurrence of a feature: word (window start) and offset inside the word.
struct FeatureMatch {
    std::size_t window_start = 0;
    std::size_t word_offset = 0;
};

/// Every occurrence of `tokens` in the unreduced SAX transform of `series`.
std::vector<FeatureMatch> feature_matches(std::span<const double> series, const ExplainFeature& feature);

/// Raw index range [first, second) covered by a match of `length` tokens:
/// floor(t + p*l/w) to ceil(t + (p+k)*l/w), clipped to the series.
std::pair<std::size_t, std::size_t> match_span(const SymbolicConfig& cfg, const FeatureMatch& m, std::size_t length,
                                               std::size_t series_length);

/// Each feature spreads coefficient / |matches| over every match. Throws for
/// SFA features.
MetaTimeSeries explain(std::span<const ExplainFeature> features, const TimeSeries& series,
                       const ExplainOptions& options = {});

struct RegionHighlight {
    std::size_t start = 0;
    std::size_t end = 0;
    /// Signed weight of largest magnitude inside the region.
    double intensity = 0.0;
};

/// Maximal same-sign runs where |weight| >= tau * max|weight|.
std::vector<RegionHighlight> highlights(const MetaTimeSeries& mts, double tau);

/// CSV with columns t,value,weight,region_id; region_id empty outside regions.
void export_explanation(const TimeSeries& series, const MetaTimeSeries& mts,
                        std::span<const RegionHighlight> regions, const std::filesystem::path& path);

}  // namespace mrseql
