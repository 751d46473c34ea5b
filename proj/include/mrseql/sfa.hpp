#pragma once

#include <span>
#include <vector>

#include "mrseql/data.hpp"
#include "mrseql/symbolic.hpp"

namespace mrseql {

struct SfaConfig {
    int window = 0;
    /// Number of retained reals, i.e. twice the number of Fourier coefficients.
    int word_length = 8;
    int alphabet = 4;
    /// Z-normalize each window before the transform. The DC pair is then exactly zero.
    bool norm_window = true;
    /// Start at coefficient 1 instead of the DC term.
    bool drop_dc = false;
    bool numerosity_reduction = true;

    [[nodiscard]] SymbolicConfig symbolic() const { return {Domain::Sfa, window, word_length, alphabet}; }
};

void validate(const SfaConfig& cfg, std::size_t series_length = 0);

/// Interleaved (re, im) parts of Fourier coefficients first..first+w/2-1 of
/// `values`, unnormalized forward convention X_k = sum_n x_n exp(-2 pi i k n / l).
std::vector<double> dft_approx(std::span<const double> values, int word_length, int first_coefficient = 0);

/// Approximation of one window under `cfg` (normalization and DC handling applied).
std::vector<double> sfa_approx(std::span<const double> window, const SfaConfig& cfg);

/// Multiple coefficient binning: one column of breakpoints per approximation
/// position, fitted equi-depth on training windows.
struct McbTable {
    SfaConfig config;
    /// bins[i] holds the sorted breakpoints of position i. A column whose
    /// training values were all equal is empty and maps everything to symbol 0.
    std::vector<std::vector<double>> bins;

    [[nodiscard]] int lookup(std::size_t position, double v) const;
};

/// Equi-depth breakpoints of one column: cut k sits midway between order
/// statistics floor(k*n/alpha)-1 and floor(k*n/alpha). Duplicates collapse.
std::vector<double> equi_depth_breakpoints(std::vector<double> values, int alphabet);

/// Fits from all sliding windows of all training series.
McbTable fit_mcb(const TimeSeriesDataset& train, const SfaConfig& cfg);
McbTable fit_mcb(std::span<const std::vector<double>> approximations, const SfaConfig& cfg);

/// SFA word ids for one window; position-tagged tokens (see symbolic.hpp).
Word sfa_word(std::span<const double> window, const McbTable& table);

SymbolicSequence sfa_transform(std::span<const double> series, const SfaConfig& cfg, const McbTable& table);
inline SymbolicSequence sfa_transform(const TimeSeries& series, const SfaConfig& cfg, const McbTable& table) {
    return sfa_transform(series.values, cfg, table);
}

}  // namespace mrseql
