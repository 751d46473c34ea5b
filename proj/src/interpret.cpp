#include "mrseql/interpret.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "mrseql/error.hpp"
#include "mrseql/sax.hpp"
#include "mrseql/textio.hpp"

namespace mrseql {

std::vector<FeatureMatch> feature_matches(std::span<const double> series, const ExplainFeature& feature) {
    const auto seq = sax_transform(series, {feature.config.window, feature.config.word_length,
                                            feature.config.alphabet, false});
    std::vector<FeatureMatch> out;
    const auto k = feature.tokens.size();
    if (k == 0) return out;
    for (std::size_t i = 0; i < seq.words.size(); ++i) {
        const auto& w = seq.words[i];
        for (std::size_t p = 0; p + k <= w.size(); ++p) {
            if (std::equal(feature.tokens.begin(), feature.tokens.end(), w.begin() + static_cast<std::ptrdiff_t>(p))) {
                out.push_back({seq.positions[i], p});
            }
        }
    }
    return out;
}

std::pair<std::size_t, std::size_t> match_span(const SymbolicConfig& cfg, const FeatureMatch& m, std::size_t length,
                                               std::size_t series_length) {
    const auto l = static_cast<std::size_t>(cfg.window);
    const auto w = static_cast<std::size_t>(cfg.word_length);
    // Exact integer floor/ceil of t + p*l/w.
    const std::size_t start = m.window_start + (m.word_offset * l) / w;
    const std::size_t end_num = (m.word_offset + length) * l;
    const std::size_t end = std::min(series_length, m.window_start + (end_num + w - 1) / w);
    return {start, std::max(end, start + 1)};
}

MetaTimeSeries explain(std::span<const ExplainFeature> features, const TimeSeries& series,
                       const ExplainOptions& options) {
    for (const auto& f : features) {
        if (f.config.domain != Domain::Sax) {
            throw InvalidArgument("cannot map SFA feature " + render_tokens(f.config, f.tokens) + " (" +
                                  describe(f.config) + ") onto the time domain");
        }
    }
    const auto L = series.values.size();
    MetaTimeSeries mts;
    mts.weights.assign(L, 0.0);
    for (const auto& f : features) {
        const auto matches = feature_matches(series.values, f);
        if (matches.empty()) continue;
        const double share = f.coefficient / static_cast<double>(matches.size());
        for (const auto& m : matches) {
            const auto [start, end] = match_span(f.config, m, f.tokens.size(), L);
            if (options.single_index) {
                mts.weights[start] += share;
                continue;
            }
            const double per_point = share / static_cast<double>(end - start);
            for (std::size_t t = start; t < end; ++t) mts.weights[t] += per_point;
        }
    }
    return mts;
}

std::vector<RegionHighlight> highlights(const MetaTimeSeries& mts, double tau) {
    if (!(tau > 0.0 && tau <= 1.0)) throw InvalidArgument("highlight threshold must be in (0, 1]");
    std::vector<RegionHighlight> out;
    double peak = 0.0;
    for (double w : mts.weights) peak = std::max(peak, std::abs(w));
    if (peak == 0.0) return out;
    const double cut = tau * peak;
    const auto n = mts.weights.size();
    std::size_t t = 0;
    while (t < n) {
        const double w = mts.weights[t];
        if (w == 0.0 || std::abs(w) < cut) {
            ++t;
            continue;
        }
        const bool positive = w > 0.0;
        RegionHighlight r{t, t, 0.0};
        while (t < n && std::abs(mts.weights[t]) >= cut && (mts.weights[t] > 0.0) == positive) {
            if (std::abs(mts.weights[t]) > std::abs(r.intensity)) r.intensity = mts.weights[t];
            ++t;
        }
        r.end = t;
        out.push_back(r);
    }
    return out;
}

void export_explanation(const TimeSeries& series, const MetaTimeSeries& mts,
                        std::span<const RegionHighlight> regions, const std::filesystem::path& path) {
    if (series.values.size() != mts.weights.size()) throw InvalidArgument("series and meta series lengths differ");
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "t,value,weight,region_id\n";
    for (std::size_t t = 0; t < series.values.size(); ++t) {
        out << t << ',' << textio::format_double(series.values[t]) << ',' << textio::format_double(mts.weights[t])
            << ',';
        for (std::size_t r = 0; r < regions.size(); ++r) {
            if (t >= regions[r].start && t < regions[r].end) {
                out << r;
                break;
            }
        }
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace mrseql
