#include "mrseql/multirep.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>

#include "mrseql/error.hpp"
#include "mrseql/parallel.hpp"
#include "mrseql/textio.hpp"

namespace mrseql {

int window_step(std::size_t series_length, double step_divisor) {
    if (!(step_divisor > 0.0)) throw InvalidArgument("step divisor must be positive");
    const double step = std::round(std::sqrt(static_cast<double>(series_length)) / step_divisor);
    return std::max(1, static_cast<int>(step));
}

namespace {

int word_length_for(Domain d, std::size_t series_length, const ScheduleParams& params) {
    const int L = static_cast<int>(series_length);
    if (d == Domain::Sax) return std::min(params.sax_word_length, L);
    int w = std::min(params.sfa_word_length, L);
    return w - w % 2;
}

}  // namespace

RepSchedule build_schedule(std::size_t series_length, const ScheduleParams& params) {
    const int L = static_cast<int>(series_length);
    if (params.min_window < 1) throw InvalidArgument("minimum window must be positive");
    if (params.min_window > L) {
        throw InvalidArgument("minimum window " + std::to_string(params.min_window) + " exceeds series length " +
                              std::to_string(L));
    }
    if (params.domains.empty()) throw InvalidArgument("schedule needs at least one domain");
    const int step = window_step(series_length, params.step_divisor);
    RepSchedule schedule;
    for (Domain d : params.domains) {
        const int w = word_length_for(d, series_length, params);
        if (w < (d == Domain::Sfa ? 2 : 1)) throw InvalidArgument("series too short for " + std::string(to_string(d)));
        int last = 0;
        for (int l = params.min_window; l <= L; l += step) {
            const int window = std::max(l, w);
            if (window > L || window <= last) continue;
            schedule.configs.push_back({d, window, w, params.alphabet});
            last = window;
        }
    }
    return schedule;
}

SymbolicConfig single_config(std::size_t series_length, Domain domain, const ScheduleParams& params) {
    const int L = static_cast<int>(series_length);
    const int w = word_length_for(domain, series_length, params);
    if (w < (domain == Domain::Sfa ? 2 : 1)) throw InvalidArgument("series too short for " + std::string(to_string(domain)));
    const int l = std::min(L, std::max(w, static_cast<int>(std::ceil(0.2 * L))));
    return {domain, l, w, params.alphabet};
}

SaxConfig sax_config(const SymbolicConfig& cfg, bool numerosity_reduction) {
    return {cfg.window, cfg.word_length, cfg.alphabet, numerosity_reduction};
}

SfaConfig sfa_config(const SymbolicConfig& cfg, const TransformOptions& options) {
    SfaConfig s;
    s.window = cfg.window;
    s.word_length = cfg.word_length;
    s.alphabet = cfg.alphabet;
    s.norm_window = options.sfa_norm_window;
    s.drop_dc = options.sfa_drop_dc;
    s.numerosity_reduction = options.numerosity_reduction;
    return s;
}

SymbolicSequence Representation::transform(std::span<const double> series) const {
    return transform(series, options.numerosity_reduction);
}

SymbolicSequence Representation::transform(std::span<const double> series, bool numerosity_reduction) const {
    if (config.domain == Domain::Sax) return sax_transform(series, sax_config(config, numerosity_reduction));
    if (!mcb) throw InvalidArgument("SFA representation " + describe(config) + " has no MCB table");
    auto sfa = sfa_config(config, options);
    sfa.numerosity_reduction = numerosity_reduction;
    return sfa_transform(series, sfa, *mcb);
}

Representation fit_representation(const TimeSeriesDataset& train, const SymbolicConfig& cfg,
                                  const TransformOptions& options) {
    Representation rep{cfg, options, std::nullopt};
    if (cfg.domain == Domain::Sfa) {
        rep.mcb = fit_mcb(train, sfa_config(cfg, options));
    } else {
        validate(sax_config(cfg, options.numerosity_reduction), train.length());
    }
    return rep;
}

namespace {

[[noreturn]] void rethrow_tagged(const SymbolicConfig& cfg) {
    try {
        throw;
    } catch (const Error& e) {
        throw Error("[" + describe(cfg) + "] " + e.what());
    }
}

}  // namespace

std::vector<PreparedRepresentation> prepare(const TimeSeriesDataset& train, const RepSchedule& schedule,
                                            const TransformOptions& options, std::size_t threads) {
    if (schedule.configs.empty()) throw InvalidArgument("empty representation schedule");
    std::vector<PreparedRepresentation> out(schedule.configs.size());
    parallel_for(out.size(), threads, [&](std::size_t i) {
        const auto& cfg = schedule.configs[i];
        try {
            auto rep = fit_representation(train, cfg, options);
            std::vector<SymbolicSequence> seqs;
            seqs.reserve(train.size());
            for (const auto& s : train.series()) seqs.push_back(rep.transform(s.values));
            out[i] = {std::move(rep), std::move(seqs)};
        } catch (...) {
            rethrow_tagged(cfg);
        }
    });
    return out;
}

double EnsembleModel::score(std::span<const SymbolicSequence> transformed) const {
    if (transformed.size() != models.size()) throw InvalidArgument("ensemble: transform count mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < models.size(); ++i) s += models[i].score(std::span<const Word>(transformed[i].words));
    return s;
}

double EnsembleModel::score(std::span<const double> series) const {
    std::vector<SymbolicSequence> transformed;
    transformed.reserve(representations.size());
    for (const auto& rep : representations) transformed.push_back(rep.transform(series));
    return score(transformed);
}

EnsembleModel train_ensemble(std::span<const PreparedRepresentation> prepared, const BinaryView& view,
                             const EnsembleOptions& options) {
    if (prepared.empty()) throw InvalidArgument("empty representation schedule");
    EnsembleModel ens;
    ens.representations.reserve(prepared.size());
    for (const auto& p : prepared) ens.representations.push_back(p.rep);
    ens.models.resize(prepared.size());
    parallel_for(prepared.size(), options.threads, [&](std::size_t i) {
        try {
            const auto corpus = seql::Corpus::from_sequences(prepared[i].sequences, view.labels);
            ens.models[i] = seql::train(corpus, options.seql);
        } catch (...) {
            rethrow_tagged(prepared[i].rep.config);
        }
    });
    return ens;
}

EnsembleModel train_ensemble(const TimeSeriesDataset& ds, const BinaryView& view, const RepSchedule& schedule,
                             const EnsembleOptions& options) {
    const auto prepared = prepare(ds, schedule, options.transform, options.threads);
    return train_ensemble(prepared, view, options);
}

Prediction predict_ensemble(const EnsembleModel& ensemble, const TimeSeries& series) {
    if (ensemble.models.empty()) throw InvalidArgument("empty ensemble");
    Prediction p;
    p.score = ensemble.score(series.values);
    p.label = p.score > 0.0 ? 1 : -1;
    return p;
}

const Representation* FeatureSet::find(const SymbolicConfig& cfg) const {
    for (const auto& r : representations) {
        if (r.config == cfg) return &r;
    }
    return nullptr;
}

FeatureSet select_features(std::span<const PreparedRepresentation> prepared, const BinaryView& view,
                           const EnsembleOptions& options) {
    const auto ens = train_ensemble(prepared, view, options);
    FeatureSet fs;
    fs.representations = ens.representations;
    std::map<std::pair<SymbolicConfig, seql::Subsequence>, std::size_t> seen;
    for (std::size_t i = 0; i < ens.models.size(); ++i) {
        const auto& cfg = ens.representations[i].config;
        for (const auto& f : ens.models[i].features) {
            auto key = std::make_pair(cfg, f.tokens);
            if (auto it = seen.find(key); it != seen.end()) {
                fs.features[it->second].coefficient += f.coefficient;
                continue;
            }
            seen.emplace(std::move(key), fs.features.size());
            fs.features.push_back({f.tokens, f.coefficient, cfg});
        }
    }
    return fs;
}

FeatureSet select_features(const TimeSeriesDataset& ds, const BinaryView& view, const RepSchedule& schedule,
                           const EnsembleOptions& options) {
    const auto prepared = prepare(ds, schedule, options.transform, options.threads);
    return select_features(prepared, view, options);
}

void write_representation(std::ostream& out, const Representation& rep) {
    out << "[representation " << describe(rep.config) << "]\n";
    out << "options numerosity_reduction=" << rep.options.numerosity_reduction
        << " norm_window=" << rep.options.sfa_norm_window << " drop_dc=" << rep.options.sfa_drop_dc << '\n';
    if (rep.mcb) {
        for (const auto& col : rep.mcb->bins) {
            out << "mcb";
            for (double b : col) out << ' ' << textio::format_double(b);
            out << '\n';
        }
    }
}

namespace {

constexpr std::string_view kRepPrefix = "representation ";

bool parse_flag(std::string_view v) {
    if (v == "1") return true;
    if (v == "0") return false;
    throw FormatError("bad flag '" + std::string(v) + "'");
}

}  // namespace

Representation parse_representation(std::string_view header, std::span<const std::string> lines) {
    if (header.substr(0, kRepPrefix.size()) != kRepPrefix) {
        throw FormatError("expected a representation section, got [" + std::string(header) + "]");
    }
    Representation rep;
    rep.config = parse_config(header.substr(kRepPrefix.size()));
    if (lines.empty() || lines.front().rfind("options ", 0) != 0) throw FormatError("representation without options");
    const std::string_view opts = lines.front();
    rep.options.numerosity_reduction = parse_flag(textio::find_value(opts, "numerosity_reduction"));
    rep.options.sfa_norm_window = parse_flag(textio::find_value(opts, "norm_window"));
    rep.options.sfa_drop_dc = parse_flag(textio::find_value(opts, "drop_dc"));
    if (rep.config.domain == Domain::Sfa) {
        McbTable table;
        table.config = sfa_config(rep.config, rep.options);
        for (std::size_t i = 1; i < lines.size() && lines[i].rfind("mcb", 0) == 0; ++i) {
            std::vector<double> col;
            for (auto f : textio::split(std::string_view(lines[i]).substr(3), ' ')) {
                if (!f.empty()) col.push_back(textio::parse_double(f));
            }
            table.bins.push_back(std::move(col));
        }
        if (table.bins.size() != static_cast<std::size_t>(rep.config.word_length)) {
            throw FormatError("SFA representation " + describe(rep.config) + " lacks a complete MCB table");
        }
        rep.mcb = std::move(table);
    }
    return rep;
}

namespace {

std::size_t representation_line_count(const Representation& rep) {
    return 1 + (rep.mcb ? rep.mcb->bins.size() : 0);
}

}  // namespace

void write_ensemble(std::ostream& out, const EnsembleModel& ensemble) {
    for (std::size_t i = 0; i < ensemble.models.size(); ++i) {
        write_representation(out, ensemble.representations[i]);
        seql::write_model(out, ensemble.models[i], ensemble.representations[i].config);
    }
}

EnsembleModel read_ensemble(std::istream& in) {
    EnsembleModel ens;
    for (const auto& sec : textio::read_sections(in)) {
        if (sec.header.empty()) continue;
        auto rep = parse_representation(sec.header, sec.lines);
        const auto skip = representation_line_count(rep);
        std::span<const std::string> rest(sec.lines);
        ens.models.push_back(seql::parse_model(rest.subspan(skip), rep.config));
        ens.representations.push_back(std::move(rep));
    }
    return ens;
}

void write_feature_set(std::ostream& out, const FeatureSet& fs) {
    for (const auto& rep : fs.representations) write_representation(out, rep);
    out << "[features count=" << fs.features.size() << "]\n";
    for (const auto& f : fs.features) {
        out << textio::format_double(f.coefficient) << '\t' << describe(f.config) << '\t'
            << render_tokens(f.config, f.tokens) << '\n';
    }
}

FeatureSet read_feature_set(std::istream& in) {
    FeatureSet fs;
    for (const auto& sec : textio::read_sections(in)) {
        if (sec.header.empty()) continue;
        if (sec.header.rfind("features", 0) == 0) {
            for (const auto& line : sec.lines) {
                auto parts = textio::split(line, '\t');
                if (parts.size() != 3) throw FormatError("bad feature line: " + line);
                MultiRepFeature f;
                f.coefficient = textio::parse_double(parts[0]);
                f.config = parse_config(parts[1]);
                f.tokens = parse_tokens(f.config, parts[2]);
                fs.features.push_back(std::move(f));
            }
            continue;
        }
        fs.representations.push_back(parse_representation(sec.header, sec.lines));
    }
    return fs;
}

}  // namespace mrseql
