#include "mrseql/classifier.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

#include "mrseql/error.hpp"
#include "mrseql/parallel.hpp"
#include "mrseql/textio.hpp"

namespace mrseql {

namespace {

struct ModeInfo {
    Mode mode;
    std::string_view name;
    bool sax;
    bool sfa;
    bool multi;
    bool lr;
};

constexpr std::array<ModeInfo, 8> kModes{{
    {Mode::SaxSeql, "sax-seql", true, false, false, false},
    {Mode::SfaSeql, "sfa-seql", false, true, false, false},
    {Mode::MtSaxSeql, "mtsax-seql", true, false, true, false},
    {Mode::MtSfaSeql, "mtsfa-seql", false, true, true, false},
    {Mode::MtSsSeql, "mtss-seql", true, true, true, false},
    {Mode::MtSaxSeqlLr, "mtsax-seql+lr", true, false, true, true},
    {Mode::MtSfaSeqlLr, "mtsfa-seql+lr", false, true, true, true},
    {Mode::MtSsSeqlLr, "mtss-seql+lr", true, true, true, true},
}};

const ModeInfo& info(Mode m) {
    return *std::find_if(kModes.begin(), kModes.end(), [m](const ModeInfo& i) { return i.mode == m; });
}

class Stopwatch {
public:
    [[nodiscard]] double lap() {
        const auto now = std::chrono::steady_clock::now();
        const double s = std::chrono::duration<double>(now - last_).count();
        last_ = now;
        return s;
    }

private:
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

}  // namespace

std::string_view to_string(Mode m) { return info(m).name; }

Mode parse_mode(std::string_view name) {
    for (const auto& i : kModes) {
        if (i.name == name) return i.mode;
    }
    throw InvalidArgument("unknown mode '" + std::string(name) + "'");
}

std::vector<Domain> mode_domains(Mode m) {
    std::vector<Domain> d;
    if (info(m).sax) d.push_back(Domain::Sax);
    if (info(m).sfa) d.push_back(Domain::Sfa);
    return d;
}

bool uses_lr(Mode m) { return info(m).lr; }
bool is_multi(Mode m) { return info(m).multi; }

RepSchedule mode_schedule(const RunConfig& cfg, std::size_t series_length) {
    auto params = cfg.schedule;
    params.domains = mode_domains(cfg.mode);
    if (is_multi(cfg.mode)) return build_schedule(series_length, params);
    return {{single_config(series_length, params.domains.front(), params)}};
}

Classifier Classifier::train(const TimeSeriesDataset& train, const RunConfig& cfg, Timing* timing) {
    Classifier c;
    c.mode_ = cfg.mode;
    c.class_ids_ = train.class_ids();
    c.length_ = train.length();
    const auto views = binary_views(train);
    const auto schedule = mode_schedule(cfg, train.length());

    Stopwatch clock;
    Timing t;
    const auto prepared = prepare(train, schedule, cfg.transform, cfg.threads);
    t.transform = clock.lap();
    for (const auto& p : prepared) c.reps_.push_back(p.rep);

    const EnsembleOptions options{cfg.seql, cfg.transform, cfg.threads};
    for (const auto& view : views) {
        ViewModel vm;
        vm.positive_class = view.positive_class;
        if (!uses_lr(cfg.mode)) {
            vm.ensemble = train_ensemble(prepared, view, options);
            t.learn += clock.lap();
        } else {
            vm.features = select_features(prepared, view, options);
            t.learn += clock.lap();
            TransformCache cache(train.size());
            for (const auto& p : prepared) cache.put(p.rep.config, p.sequences);
            const auto x = build_matrix(train, vm.features, cache);
            vm.lr = train_lr(x, view.labels, {cfg.lambda}).model;
            t.logreg += clock.lap();
        }
        c.views_.push_back(std::move(vm));
    }
    if (timing != nullptr) *timing = t;
    return c;
}

std::vector<double> Classifier::view_scores(const TimeSeries& series) const {
    if (series.values.size() != length_) {
        throw InvalidArgument("series length " + std::to_string(series.values.size()) + " does not match model length " +
                              std::to_string(length_));
    }
    std::vector<SymbolicSequence> transformed;
    std::vector<std::vector<Token>> docs;
    transformed.reserve(reps_.size());
    for (const auto& rep : reps_) {
        transformed.push_back(rep.transform(series.values));
        docs.push_back(seql::flatten(transformed.back().words));
    }
    auto rep_index = [&](const SymbolicConfig& cfg) {
        for (std::size_t i = 0; i < reps_.size(); ++i) {
            if (reps_[i].config == cfg) return i;
        }
        throw InvalidArgument("model references unknown representation " + describe(cfg));
    };

    std::vector<double> scores;
    scores.reserve(views_.size());
    for (const auto& v : views_) {
        if (!uses_lr(mode_)) {
            scores.push_back(v.ensemble.score(transformed));
            continue;
        }
        std::vector<std::uint32_t> active;
        for (std::size_t j = 0; j < v.features.features.size(); ++j) {
            const auto& f = v.features.features[j];
            if (seql::feature_value(docs[rep_index(f.config)], f.tokens) != 0.0) {
                active.push_back(static_cast<std::uint32_t>(j));
            }
        }
        scores.push_back(predict_lr(v.lr, active).probability);
    }
    return scores;
}

ClassPrediction Classifier::predict(const TimeSeries& series) const {
    const auto scores = view_scores(series);
    if (views_.size() == 1) {
        const double s = scores.front();
        const bool positive = uses_lr(mode_) ? s > 0.5 : s > 0.0;
        const int pos = views_.front().positive_class;
        const int neg = class_ids_.front() == pos ? class_ids_.back() : class_ids_.front();
        return {positive ? pos : neg, s};
    }
    // Views are ordered by class id, so the first maximum is the smallest id.
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i) {
        if (scores[i] > scores[best]) best = i;
    }
    return {views_[best].positive_class, scores[best]};
}

std::vector<ClassPrediction> Classifier::predict(const TimeSeriesDataset& test, Timing* timing) const {
    Stopwatch clock;
    std::vector<ClassPrediction> out(test.size());
    parallel_for(test.size(), 1, [&](std::size_t i) { out[i] = predict(test[i]); });
    if (timing != nullptr) timing->test = clock.lap();
    return out;
}

std::vector<ExplainFeature> Classifier::decision_features(int positive_class) const {
    auto it = std::find_if(views_.begin(), views_.end(), [&](const ViewModel& v) { return v.positive_class == positive_class; });
    if (it == views_.end()) throw InvalidArgument("no view for class " + std::to_string(positive_class));
    std::vector<ExplainFeature> out;
    if (uses_lr(mode_)) {
        for (std::size_t j = 0; j < it->features.features.size(); ++j) {
            const auto& f = it->features.features[j];
            out.push_back({f.tokens, it->lr.weights[j], f.config});
        }
        return out;
    }
    for (std::size_t m = 0; m < it->ensemble.models.size(); ++m) {
        const auto& cfg = it->ensemble.representations[m].config;
        for (const auto& f : it->ensemble.models[m].features) out.push_back({f.tokens, f.coefficient, cfg});
    }
    return out;
}

bool Classifier::sax_only() const {
    return std::all_of(reps_.begin(), reps_.end(), [](const Representation& r) { return r.config.domain == Domain::Sax; });
}

void Classifier::save(std::ostream& out) const {
    out << "mrseql-model 1\n";
    out << "mode " << to_string(mode_) << '\n';
    out << "length " << length_ << '\n';
    out << "classes";
    for (int c : class_ids_) out << ' ' << c;
    out << '\n';
    for (const auto& r : reps_) write_representation(out, r);
    for (const auto& v : views_) {
        out << "[view positive=" << v.positive_class << "]\n";
        if (!uses_lr(mode_)) {
            for (std::size_t m = 0; m < v.ensemble.models.size(); ++m) {
                const auto& cfg = v.ensemble.representations[m].config;
                out << "[seql " << describe(cfg) << "]\n";
                seql::write_model(out, v.ensemble.models[m], cfg);
            }
        } else {
            write_lr(out, v.lr, v.features);
        }
    }
    if (!out) throw IoError("failed to write model");
}

void Classifier::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    save(out);
}

Classifier Classifier::load(std::istream& in) {
    const auto sections = textio::read_sections(in);
    if (sections.empty() || !sections.front().header.empty() || sections.front().lines.empty() ||
        sections.front().lines.front() != "mrseql-model 1") {
        throw FormatError("not an mrseql model file");
    }
    Classifier c;
    for (const auto& line : sections.front().lines) {
        const std::string_view v(line);
        if (v.rfind("mode ", 0) == 0) c.mode_ = parse_mode(v.substr(5));
        else if (v.rfind("length ", 0) == 0) c.length_ = static_cast<std::size_t>(textio::parse_int(v.substr(7)));
        else if (v.rfind("classes ", 0) == 0) {
            for (auto f : textio::split(v.substr(8), ' ')) c.class_ids_.push_back(static_cast<int>(textio::parse_int(f)));
        }
    }
    if (c.class_ids_.size() < 2 || c.length_ == 0) throw FormatError("model file lacks classes or length");

    for (std::size_t s = 1; s < sections.size(); ++s) {
        const auto& sec = sections[s];
        const std::string_view h(sec.header);
        if (h.rfind("representation ", 0) == 0) {
            c.reps_.push_back(parse_representation(h, sec.lines));
        } else if (h.rfind("view ", 0) == 0) {
            ViewModel v;
            v.positive_class = static_cast<int>(textio::parse_int(textio::find_value(h, "positive")));
            c.views_.push_back(std::move(v));
        } else if (h.rfind("seql ", 0) == 0) {
            if (c.views_.empty()) throw FormatError("seql section outside a view");
            const auto cfg = parse_config(h.substr(5));
            auto it = std::find_if(c.reps_.begin(), c.reps_.end(), [&](const Representation& r) { return r.config == cfg; });
            if (it == c.reps_.end()) throw FormatError("seql section for unknown representation " + describe(cfg));
            auto& ens = c.views_.back().ensemble;
            ens.representations.push_back(*it);
            ens.models.push_back(seql::parse_model(sec.lines, cfg));
        } else if (h.rfind("lr ", 0) == 0) {
            if (c.views_.empty()) throw FormatError("lr section outside a view");
            auto& v = c.views_.back();
            v.features.representations = c.reps_;
            v.lr = parse_lr(h, sec.lines, v.features);
        } else {
            throw FormatError("unknown section [" + sec.header + "]");
        }
    }
    if (c.views_.empty()) throw FormatError("model file has no views");
    return c;
}

Classifier Classifier::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return load(in);
}

double error_rate(const TimeSeriesDataset& test, std::span<const ClassPrediction> predictions) {
    if (predictions.size() != test.size()) throw InvalidArgument("prediction count does not match test set");
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < test.size(); ++i) wrong += predictions[i].label != test[i].label ? 1 : 0;
    return static_cast<double>(wrong) / static_cast<double>(test.size());
}

}  // namespace mrseql
