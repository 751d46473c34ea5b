#include "mrseql/sax.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/normal.hpp>

#include "mrseql/error.hpp"

namespace mrseql {

void validate(const SaxConfig& cfg, std::size_t series_length) {
    if (cfg.alphabet < 2 || cfg.alphabet > 26) {
        throw InvalidArgument("SAX alphabet must be in [2, 26], got " + std::to_string(cfg.alphabet));
    }
    if (cfg.word_length < 1 || cfg.word_length > cfg.window) {
        throw InvalidArgument("SAX word length must be in [1, window], got w=" + std::to_string(cfg.word_length) +
                              " l=" + std::to_string(cfg.window));
    }
    if (series_length != 0 && static_cast<std::size_t>(cfg.window) > series_length) {
        throw InvalidArgument("SAX window " + std::to_string(cfg.window) + " exceeds series length " +
                              std::to_string(series_length));
    }
}

int BreakpointTable::lookup(double v) const {
    return static_cast<int>(std::upper_bound(breakpoints.begin(), breakpoints.end(), v) - breakpoints.begin());
}

BreakpointTable gaussian_breakpoints(int alphabet) {
    if (alphabet < 2) throw InvalidArgument("alphabet size must be at least 2");
    const boost::math::normal_distribution<double> normal;
    BreakpointTable t;
    t.breakpoints.reserve(static_cast<std::size_t>(alphabet - 1));
    for (int k = 1; k < alphabet; ++k) {
        // 2k == alphabet is exactly the median; avoid a -1e-17 from the quantile routine.
        t.breakpoints.push_back(2 * k == alphabet ? 0.0 : boost::math::quantile(normal, double(k) / alphabet));
    }
    return t;
}

std::vector<double> paa(std::span<const double> values, int word_length) {
    const auto n = values.size();
    if (word_length < 1 || static_cast<std::size_t>(word_length) > n) {
        throw InvalidArgument("PAA word length " + std::to_string(word_length) + " not in [1, " + std::to_string(n) +
                              "]");
    }
    const auto w = static_cast<std::size_t>(word_length);
    std::vector<double> out(w, 0.0);
    if (n % w == 0) {
        const std::size_t seg = n / w;
        for (std::size_t j = 0; j < w; ++j) {
            double s = 0.0;
            for (std::size_t i = j * seg; i < (j + 1) * seg; ++i) s += values[i];
            out[j] = s / static_cast<double>(seg);
        }
        return out;
    }
    // Stretch each point to w sub-units and each segment to n sub-units; segment
    // j covers sub-units [j*n, (j+1)*n) and point i covers [i*w, (i+1)*w).
    for (std::size_t j = 0; j < w; ++j) {
        const std::size_t lo = j * n;
        const std::size_t hi = lo + n;
        double s = 0.0;
        for (std::size_t i = lo / w; i * w < hi; ++i) {
            const std::size_t a = std::max(lo, i * w);
            const std::size_t b = std::min(hi, (i + 1) * w);
            s += values[i] * static_cast<double>(b - a);
        }
        out[j] = s / static_cast<double>(n);
    }
    return out;
}

Word sax_word(std::span<const double> window, const SaxConfig& cfg, const BreakpointTable& table) {
    const auto normed = z_normalize(window);
    const auto approx = paa(normed, cfg.word_length);
    Word word(approx.size());
    for (std::size_t j = 0; j < approx.size(); ++j) word[j] = table.lookup(approx[j]);
    return word;
}

std::string sax_word_string(std::span<const double> window, const SaxConfig& cfg, const BreakpointTable& table) {
    const auto word = sax_word(window, cfg, table);
    return render_tokens(cfg.symbolic(), word);
}

SymbolicSequence sax_transform(std::span<const double> series, const SaxConfig& cfg) {
    validate(cfg, series.size());
    const auto table = gaussian_breakpoints(cfg.alphabet);
    const auto l = static_cast<std::size_t>(cfg.window);
    SymbolicSequence seq;
    seq.config = cfg.symbolic();
    const std::size_t count = series.size() - l + 1;
    seq.words.reserve(count);
    seq.positions.reserve(count);
    for (std::size_t t = 0; t < count; ++t) {
        seq.words.push_back(sax_word(series.subspan(t, l), cfg, table));
        seq.positions.push_back(t);
    }
    if (cfg.numerosity_reduction) reduce_numerosity(seq);
    return seq;
}

}  // namespace mrseql
