#include "mrseql/linear.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <ostream>

#include "mrseql/error.hpp"
#include "mrseql/textio.hpp"

namespace mrseql {

double DesignMatrix::at(std::size_t row, std::size_t column) const {
    const auto& r = rows.at(row);
    return std::binary_search(r.begin(), r.end(), static_cast<std::uint32_t>(column)) ? 1.0 : 0.0;
}

std::vector<double> DesignMatrix::dense_row(std::size_t row) const {
    std::vector<double> out(columns, 0.0);
    for (auto c : rows.at(row)) out[c] = 1.0;
    return out;
}

const std::vector<SymbolicSequence>& TransformCache::get(const Representation& rep, const TimeSeriesDataset& ds) {
    if (ds.size() != series_count_) throw InvalidArgument("transform cache bound to a different dataset size");
    auto it = cache_.find(rep.config);
    if (it != cache_.end()) return it->second;
    std::vector<SymbolicSequence> seqs;
    seqs.reserve(ds.size());
    for (const auto& s : ds.series()) seqs.push_back(rep.transform(s.values));
    computed_ += seqs.size();
    return cache_.emplace(rep.config, std::move(seqs)).first->second;
}

void TransformCache::put(const SymbolicConfig& cfg, std::vector<SymbolicSequence> sequences) {
    if (sequences.size() != series_count_) throw InvalidArgument("transform cache bound to a different dataset size");
    cache_.insert_or_assign(cfg, std::move(sequences));
}

namespace {

const Representation& representation_for(const FeatureSet& fs, const MultiRepFeature& f) {
    const auto* rep = fs.find(f.config);
    if (rep == nullptr) throw InvalidArgument("no representation for feature config " + describe(f.config));
    if (rep->config.domain == Domain::Sfa && !rep->mcb) {
        throw InvalidArgument("SFA feature " + render_tokens(f.config, f.tokens) + " (" + describe(f.config) +
                              ") has no MCB table");
    }
    return *rep;
}

/// Feature indices grouped by config, in first-appearance order.
std::vector<std::pair<const Representation*, std::vector<std::uint32_t>>> group_features(const FeatureSet& fs) {
    std::vector<std::pair<const Representation*, std::vector<std::uint32_t>>> groups;
    for (std::size_t j = 0; j < fs.features.size(); ++j) {
        const auto& rep = representation_for(fs, fs.features[j]);
        auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) { return g.first == &rep; });
        if (it == groups.end()) {
            groups.push_back({&rep, {}});
            it = std::prev(groups.end());
        }
        it->second.push_back(static_cast<std::uint32_t>(j));
    }
    return groups;
}

}  // namespace

DesignMatrix build_matrix(const TimeSeriesDataset& ds, const FeatureSet& features, TransformCache& cache) {
    DesignMatrix m;
    m.columns = features.features.size();
    m.rows.resize(ds.size());
    for (const auto& [rep, cols] : group_features(features)) {
        const auto& seqs = cache.get(*rep, ds);
        for (std::size_t i = 0; i < ds.size(); ++i) {
            const auto doc = seql::flatten(seqs[i].words);
            for (auto j : cols) {
                if (seql::feature_value(doc, features.features[j].tokens) != 0.0) m.rows[i].push_back(j);
            }
        }
    }
    for (auto& r : m.rows) std::sort(r.begin(), r.end());
    return m;
}

std::vector<double> feature_row(std::span<const double> series, const FeatureSet& features) {
    std::vector<double> row(features.features.size(), 0.0);
    for (const auto& [rep, cols] : group_features(features)) {
        const auto doc = seql::flatten(rep->transform(series).words);
        for (auto j : cols) row[j] = seql::feature_value(doc, features.features[j].tokens);
    }
    return row;
}

namespace {

double log_loss(double margin) {
    return margin > 0.0 ? std::log1p(std::exp(-margin)) : -margin + std::log1p(std::exp(margin));
}

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double row_dot(const std::vector<std::uint32_t>& row, std::span<const double> w) {
    double s = 0.0;
    for (auto c : row) s += w[c];
    return s;
}

/// Parameters packed as (w..., b).
struct Problem {
    const DesignMatrix& x;
    std::span<const int> y;
    double lambda;

    [[nodiscard]] std::size_t dim() const { return x.columns + 1; }

    double value(std::span<const double> p) const {
        const auto w = p.first(x.columns);
        const double b = p[x.columns];
        double f = 0.0;
        for (std::size_t i = 0; i < x.rows.size(); ++i) f += log_loss(y[i] * (row_dot(x.rows[i], w) + b));
        double reg = 0.0;
        for (double v : w) reg += v * v;
        return f + 0.5 * lambda * reg;
    }

    double value_and_gradient(std::span<const double> p, std::vector<double>& g) const {
        const auto w = p.first(x.columns);
        const double b = p[x.columns];
        g.assign(dim(), 0.0);
        double f = 0.0;
        for (std::size_t i = 0; i < x.rows.size(); ++i) {
            const double m = y[i] * (row_dot(x.rows[i], w) + b);
            f += log_loss(m);
            const double coef = -y[i] * sigmoid(-m);
            for (auto c : x.rows[i]) g[c] += coef;
            g[x.columns] += coef;
        }
        double reg = 0.0;
        for (std::size_t j = 0; j < x.columns; ++j) {
            reg += w[j] * w[j];
            g[j] += lambda * w[j];
        }
        return f + 0.5 * lambda * reg;
    }
};

double inf_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

void check_training_input(const DesignMatrix& x, std::span<const int> labels) {
    if (x.columns == 0) throw InvalidArgument("logistic regression needs at least one feature column");
    if (labels.size() != x.rows.size()) throw InvalidArgument("label count does not match matrix rows");
    bool pos = false;
    bool neg = false;
    for (int y : labels) {
        if (y == 1) pos = true;
        else if (y == -1) neg = true;
        else throw InvalidArgument("labels must be +1 or -1");
    }
    if (!pos || !neg) throw InvalidArgument("logistic regression needs both labels");
}

}  // namespace

double lr_loss(const DesignMatrix& x, std::span<const int> labels, const LrModel& model) {
    if (model.weights.size() != x.columns) throw InvalidArgument("model width does not match matrix");
    std::vector<double> p(model.weights);
    p.push_back(model.intercept);
    return Problem{x, labels, model.lambda}.value(p);
}

std::vector<double> lr_gradient(const DesignMatrix& x, std::span<const int> labels, const LrModel& model) {
    if (model.weights.size() != x.columns) throw InvalidArgument("model width does not match matrix");
    std::vector<double> p(model.weights);
    p.push_back(model.intercept);
    std::vector<double> g;
    Problem{x, labels, model.lambda}.value_and_gradient(p, g);
    return g;
}

LrFit train_lr(const DesignMatrix& x, std::span<const int> labels, const LrOptions& options) {
    check_training_input(x, labels);
    if (!(options.lambda >= 0.0)) throw InvalidArgument("lambda must be non-negative");
    const Problem prob{x, labels, options.lambda};
    const std::size_t n = prob.dim();
    constexpr std::size_t kMemory = 10;

    std::vector<double> p(n, 0.0);
    std::vector<double> g;
    double f = prob.value_and_gradient(p, g);
    std::deque<std::pair<std::vector<double>, std::vector<double>>> history;  // (s, y)
    std::vector<double> dir(n);
    std::vector<double> trial(n);
    std::vector<double> g_trial;
    std::vector<double> alpha(kMemory);

    LrFit fit;
    int it = 0;
    for (; it < options.max_iters && inf_norm(g) >= options.gradient_tol; ++it) {
        // Two-loop recursion for dir = -H g.
        for (std::size_t k = 0; k < n; ++k) dir[k] = -g[k];
        for (std::size_t h = history.size(); h-- > 0;) {
            const auto& [s, y] = history[h];
            alpha[h] = dot(s, dir) / dot(y, s);
            for (std::size_t k = 0; k < n; ++k) dir[k] -= alpha[h] * y[k];
        }
        if (!history.empty()) {
            const auto& [s, y] = history.back();
            const double scale = dot(s, y) / dot(y, y);
            for (auto& d : dir) d *= scale;
        }
        for (std::size_t h = 0; h < history.size(); ++h) {
            const auto& [s, y] = history[h];
            const double beta = dot(y, dir) / dot(y, s);
            for (std::size_t k = 0; k < n; ++k) dir[k] += (alpha[h] - beta) * s[k];
        }
        double slope = dot(g, dir);
        if (!(slope < 0.0)) {
            history.clear();
            for (std::size_t k = 0; k < n; ++k) dir[k] = -g[k];
            slope = dot(g, dir);
        }

        // Backtracking Armijo search.
        double step = history.empty() ? 1.0 / std::max(1.0, inf_norm(g)) : 1.0;
        double f_trial = 0.0;
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt) {
            for (std::size_t k = 0; k < n; ++k) trial[k] = p[k] + step * dir[k];
            f_trial = prob.value_and_gradient(trial, g_trial);
            if (f_trial <= f + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            if (history.empty()) break;
            history.clear();
            continue;
        }
        std::vector<double> s(n);
        std::vector<double> y(n);
        for (std::size_t k = 0; k < n; ++k) {
            s[k] = trial[k] - p[k];
            y[k] = g_trial[k] - g[k];
        }
        if (dot(s, y) > 1e-12 * dot(y, y)) {
            history.emplace_back(std::move(s), std::move(y));
            if (history.size() > kMemory) history.pop_front();
        }
        p.swap(trial);
        g.swap(g_trial);
        f = f_trial;
    }

    fit.model.weights.assign(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(x.columns));
    fit.model.intercept = p[x.columns];
    fit.model.lambda = options.lambda;
    fit.iterations = it;
    fit.loss = f;
    fit.gradient_norm = inf_norm(g);
    return fit;
}

LrPrediction predict_lr(const LrModel& model, std::span<const double> row) {
    if (row.size() != model.weights.size()) {
        throw InvalidArgument("row width " + std::to_string(row.size()) + " does not match model width " +
                              std::to_string(model.weights.size()));
    }
    const double z = dot(model.weights, row) + model.intercept;
    LrPrediction p;
    p.probability = sigmoid(z);
    p.label = p.probability > 0.5 ? 1 : -1;
    return p;
}

LrPrediction predict_lr(const LrModel& model, std::span<const std::uint32_t> active_columns) {
    double z = model.intercept;
    for (auto c : active_columns) {
        if (c >= model.weights.size()) throw InvalidArgument("column index outside the model width");
        z += model.weights[c];
    }
    LrPrediction p;
    p.probability = sigmoid(z);
    p.label = p.probability > 0.5 ? 1 : -1;
    return p;
}

void write_lr(std::ostream& out, const LrModel& model, const FeatureSet& features) {
    if (model.weights.size() != features.features.size()) throw InvalidArgument("LR width does not match features");
    out << "[lr lambda=" << textio::format_double(model.lambda) << " intercept="
        << textio::format_double(model.intercept) << " features=" << model.weights.size() << "]\n";
    for (std::size_t j = 0; j < model.weights.size(); ++j) {
        const auto& f = features.features[j];
        out << textio::format_double(model.weights[j]) << '\t' << textio::format_double(f.coefficient) << '\t'
            << describe(f.config) << '\t' << render_tokens(f.config, f.tokens) << '\n';
    }
}

LrModel parse_lr(std::string_view header, std::span<const std::string> lines, FeatureSet& features) {
    if (header.rfind("lr ", 0) != 0) throw FormatError("expected an lr section, got [" + std::string(header) + "]");
    LrModel m;
    m.lambda = textio::parse_double(textio::find_value(header, "lambda"));
    m.intercept = textio::parse_double(textio::find_value(header, "intercept"));
    const auto n = static_cast<std::size_t>(textio::parse_int(textio::find_value(header, "features")));
    if (lines.size() != n) throw FormatError("lr section declares " + std::to_string(n) + " features");
    features.features.clear();
    for (const auto& line : lines) {
        auto parts = textio::split(line, '\t');
        if (parts.size() != 4) throw FormatError("bad lr line: " + line);
        m.weights.push_back(textio::parse_double(parts[0]));
        MultiRepFeature f;
        f.coefficient = textio::parse_double(parts[1]);
        f.config = parse_config(parts[2]);
        f.tokens = parse_tokens(f.config, parts[3]);
        features.features.push_back(std::move(f));
    }
    return m;
}

}  // namespace mrseql
