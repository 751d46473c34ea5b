#pragma once

#include <span>
#include <string>
#include <vector>

#include "mrseql/data.hpp"
#include "mrseql/symbolic.hpp"

namespace mrseql {

struct SaxConfig {
    int window = 0;
    int word_length = 16;
    int alphabet = 4;
    bool numerosity_reduction = true;

    [[nodiscard]] SymbolicConfig symbolic() const { return {Domain::Sax, window, word_length, alphabet}; }
};

/// Checks 2 <= alphabet <= 26 and 1 <= w <= l; `series_length` 0 skips the l <= L check.
void validate(const SaxConfig& cfg, std::size_t series_length = 0);

/// Equi-probable cut points of the standard normal, alphabet - 1 of them.
struct BreakpointTable {
    std::vector<double> breakpoints;

    /// Interval index of `v`. A value equal to a breakpoint belongs to the upper interval.
    [[nodiscard]] int lookup(double v) const;
};

BreakpointTable gaussian_breakpoints(int alphabet);

/// Piecewise aggregate approximation. When |values| is not a multiple of w,
/// points straddling a segment boundary are split between the two segments.
std::vector<double> paa(std::span<const double> values, int word_length);

/// Symbol ids of one window: z-normalize, PAA, breakpoint lookup.
Word sax_word(std::span<const double> window, const SaxConfig& cfg, const BreakpointTable& table);

/// Letters 'a'.. for a SAX word.
std::string sax_word_string(std::span<const double> window, const SaxConfig& cfg, const BreakpointTable& table);

/// One word per window start t = 0..L-l.
SymbolicSequence sax_transform(std::span<const double> series, const SaxConfig& cfg);
inline SymbolicSequence sax_transform(const TimeSeries& series, const SaxConfig& cfg) {
    return sax_transform(series.values, cfg);
}

}  // namespace mrseql
