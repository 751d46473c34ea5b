#include "mrseql/sfa.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mrseql/error.hpp"

namespace mrseql {

void validate(const SfaConfig& cfg, std::size_t series_length) {
    if (cfg.alphabet < 2 || cfg.alphabet > 26) {
        throw InvalidArgument("SFA alphabet must be in [2, 26], got " + std::to_string(cfg.alphabet));
    }
    if (cfg.word_length < 2 || cfg.word_length % 2 != 0) {
        throw InvalidArgument("SFA word length must be even and positive, got " + std::to_string(cfg.word_length));
    }
    if (cfg.word_length > cfg.window) {
        throw InvalidArgument("SFA word length " + std::to_string(cfg.word_length) + " exceeds window " +
                              std::to_string(cfg.window));
    }
    if (series_length != 0 && static_cast<std::size_t>(cfg.window) > series_length) {
        throw InvalidArgument("SFA window " + std::to_string(cfg.window) + " exceeds series length " +
                              std::to_string(series_length));
    }
}

namespace {

/// Cosine/sine tables for one window length, indexed by (k * t) mod n.
class DftPlan {
public:
    explicit DftPlan(std::size_t n) : cos_(n), sin_(n) {
        const double step = 2.0 * std::numbers::pi / static_cast<double>(n);
        for (std::size_t j = 0; j < n; ++j) {
            cos_[j] = std::cos(step * static_cast<double>(j));
            sin_[j] = std::sin(step * static_cast<double>(j));
        }
    }

    [[nodiscard]] std::size_t size() const noexcept { return cos_.size(); }

    std::vector<double> approx(std::span<const double> values, int word_length, int first_coefficient) const {
        const auto n = values.size();
        const std::size_t coeffs = static_cast<std::size_t>(word_length) / 2;
        std::vector<double> out(static_cast<std::size_t>(word_length), 0.0);
        for (std::size_t c = 0; c < coeffs; ++c) {
            const std::size_t k = c + static_cast<std::size_t>(first_coefficient);
            double re = 0.0;
            double im = 0.0;
            std::size_t idx = 0;
            for (std::size_t t = 0; t < n; ++t) {
                re += values[t] * cos_[idx];
                im -= values[t] * sin_[idx];
                idx += k;
                if (idx >= n) idx %= n;
            }
            out[2 * c] = re;
            out[2 * c + 1] = im;
        }
        return out;
    }

private:
    std::vector<double> cos_;
    std::vector<double> sin_;
};

void check_dft_args(std::size_t n, int word_length) {
    if (word_length < 2 || word_length % 2 != 0) {
        throw InvalidArgument("DFT word length must be even and positive, got " + std::to_string(word_length));
    }
    if (static_cast<std::size_t>(word_length) > n) throw InvalidArgument("DFT word length exceeds window");
}

std::vector<double> approx_with(const DftPlan& plan, std::span<const double> window, const SfaConfig& cfg) {
    const int first = cfg.drop_dc ? 1 : 0;
    if (!cfg.norm_window) return plan.approx(window, cfg.word_length, first);
    auto approx = plan.approx(z_normalize(window), cfg.word_length, first);
    if (first == 0) {
        approx[0] = 0.0;
        approx[1] = 0.0;
    }
    return approx;
}

}  // namespace

std::vector<double> dft_approx(std::span<const double> values, int word_length, int first_coefficient) {
    check_dft_args(values.size(), word_length);
    return DftPlan(values.size()).approx(values, word_length, first_coefficient);
}

std::vector<double> sfa_approx(std::span<const double> window, const SfaConfig& cfg) {
    check_dft_args(window.size(), cfg.word_length);
    return approx_with(DftPlan(window.size()), window, cfg);
}

int McbTable::lookup(std::size_t position, double v) const {
    const auto& col = bins[position];
    return static_cast<int>(std::upper_bound(col.begin(), col.end(), v) - col.begin());
}

std::vector<double> equi_depth_breakpoints(std::vector<double> values, int alphabet) {
    const std::size_t n = values.size();
    if (n < static_cast<std::size_t>(alphabet)) {
        throw InvalidArgument("need at least " + std::to_string(alphabet) + " training windows, got " +
                              std::to_string(n));
    }
    std::sort(values.begin(), values.end());
    std::vector<double> cuts;
    if (values.front() == values.back()) return cuts;
    for (int k = 1; k < alphabet; ++k) {
        const std::size_t q = static_cast<std::size_t>(k) * n / static_cast<std::size_t>(alphabet);
        const double cut = 0.5 * (values[q - 1] + values[q]);
        if (cuts.empty() || cut > cuts.back()) cuts.push_back(cut);
    }
    return cuts;
}

McbTable fit_mcb(std::span<const std::vector<double>> approximations, const SfaConfig& cfg) {
    McbTable table;
    table.config = cfg;
    const auto w = static_cast<std::size_t>(cfg.word_length);
    table.bins.resize(w);
    std::vector<double> column(approximations.size());
    for (std::size_t i = 0; i < w; ++i) {
        for (std::size_t r = 0; r < approximations.size(); ++r) column[r] = approximations[r][i];
        table.bins[i] = equi_depth_breakpoints(column, cfg.alphabet);
    }
    return table;
}

McbTable fit_mcb(const TimeSeriesDataset& train, const SfaConfig& cfg) {
    if (train.empty()) throw InvalidArgument("cannot fit MCB on an empty training set");
    validate(cfg, train.length());
    const auto l = static_cast<std::size_t>(cfg.window);
    std::vector<std::vector<double>> approx;
    approx.reserve(train.size() * (train.length() - l + 1));
    const DftPlan plan(l);
    for (const auto& s : train.series()) {
        std::span<const double> v(s.values);
        for (std::size_t t = 0; t + l <= v.size(); ++t) approx.push_back(approx_with(plan, v.subspan(t, l), cfg));
    }
    return fit_mcb(approx, cfg);
}

namespace {

bool same_shape(const SfaConfig& a, const SfaConfig& b) {
    return a.window == b.window && a.word_length == b.word_length && a.alphabet == b.alphabet &&
           a.norm_window == b.norm_window && a.drop_dc == b.drop_dc;
}

}  // namespace

namespace {

Word word_with(const DftPlan& plan, std::span<const double> window, const McbTable& table) {
    const auto& cfg = table.config;
    const auto approx = approx_with(plan, window, cfg);
    Word word(approx.size());
    for (std::size_t i = 0; i < approx.size(); ++i) {
        word[i] = static_cast<Token>(i) * cfg.alphabet + table.lookup(i, approx[i]);
    }
    return word;
}

}  // namespace

Word sfa_word(std::span<const double> window, const McbTable& table) {
    check_dft_args(window.size(), table.config.word_length);
    return word_with(DftPlan(window.size()), window, table);
}

SymbolicSequence sfa_transform(std::span<const double> series, const SfaConfig& cfg, const McbTable& table) {
    validate(cfg, series.size());
    if (!same_shape(cfg, table.config) || table.bins.size() != static_cast<std::size_t>(cfg.word_length)) {
        throw InvalidArgument("MCB table fitted for a different SFA config");
    }
    const auto l = static_cast<std::size_t>(cfg.window);
    SymbolicSequence seq;
    seq.config = cfg.symbolic();
    const std::size_t count = series.size() - l + 1;
    seq.words.reserve(count);
    seq.positions.reserve(count);
    const DftPlan plan(l);
    for (std::size_t t = 0; t < count; ++t) {
        seq.words.push_back(word_with(plan, series.subspan(t, l), table));
        seq.positions.push_back(t);
    }
    if (cfg.numerosity_reduction) reduce_numerosity(seq);
    return seq;
}

}  // namespace mrseql
