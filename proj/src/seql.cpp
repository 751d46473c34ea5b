#include "mrseql/seql.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "mrseql/error.hpp"
#include "mrseql/textio.hpp"

namespace mrseql::seql {

std::vector<Token> flatten(std::span<const Word> words) {
    std::vector<Token> out;
    std::size_t total = 0;
    for (const auto& w : words) total += w.size() + 1;
    out.reserve(total);
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (i > 0) out.push_back(kBoundary);
        out.insert(out.end(), words[i].begin(), words[i].end());
    }
    return out;
}

Corpus::Corpus(std::vector<std::vector<Word>> documents, std::vector<int> labels, int vocabulary_size)
    : labels_(std::move(labels)), vocab_(vocabulary_size) {
    if (documents.size() != labels_.size()) throw InvalidArgument("corpus documents and labels differ in size");
    for (int y : labels_) {
        if (y != 1 && y != -1) throw InvalidArgument("corpus labels must be +1 or -1");
    }
    docs_.reserve(documents.size());
    for (const auto& d : documents) {
        for (const auto& w : d) {
            for (Token t : w) {
                if (t < 0 || t >= vocab_) throw InvalidArgument("token id outside the vocabulary");
            }
        }
        docs_.push_back(flatten(d));
    }
}

Corpus Corpus::from_sequences(std::span<const SymbolicSequence> sequences, std::span<const int> labels) {
    if (sequences.empty()) throw InvalidArgument("empty corpus");
    std::vector<std::vector<Word>> docs;
    docs.reserve(sequences.size());
    for (const auto& s : sequences) docs.push_back(s.words);
    return Corpus(std::move(docs), std::vector<int>(labels.begin(), labels.end()),
                  token_universe(sequences.front().config));
}

Corpus Corpus::read(std::istream& in, const SymbolicConfig& cfg) {
    std::vector<std::vector<Word>> docs;
    std::vector<int> labels;
    std::string line;
    while (std::getline(in, line)) {
        auto view = textio::trim(line);
        if (view.empty()) continue;
        auto fields = textio::split(view, ' ');
        const auto y = textio::parse_int(fields[0]);
        if (y != 1 && y != -1) throw FormatError("corpus label must be +1 or -1: " + line);
        labels.push_back(static_cast<int>(y));
        std::vector<Word> words;
        for (std::size_t i = 1; i < fields.size(); ++i) {
            if (!fields[i].empty()) words.push_back(parse_tokens(cfg, fields[i]));
        }
        docs.push_back(std::move(words));
    }
    return Corpus(std::move(docs), std::move(labels), token_universe(cfg));
}

std::size_t count_occurrences(std::span<const Token> doc, std::span<const Token> s) {
    if (s.empty() || s.size() > doc.size()) return 0;
    std::size_t n = 0;
    for (std::size_t i = 0; i + s.size() <= doc.size(); ++i) {
        if (std::equal(s.begin(), s.end(), doc.begin() + static_cast<std::ptrdiff_t>(i))) ++n;
    }
    return n;
}

double feature_value(std::span<const Token> doc, std::span<const Token> s, FeatureMode mode) {
    if (mode == FeatureMode::Count) return static_cast<double>(count_occurrences(doc, s));
    if (s.empty() || s.size() > doc.size()) return 0.0;
    for (std::size_t i = 0; i + s.size() <= doc.size(); ++i) {
        if (std::equal(s.begin(), s.end(), doc.begin() + static_cast<std::ptrdiff_t>(i))) return 1.0;
    }
    return 0.0;
}

std::vector<Location> find_locations(const Corpus& corpus, std::span<const Token> s) {
    std::vector<Location> out;
    if (s.empty()) return out;
    for (std::size_t d = 0; d < corpus.size(); ++d) {
        auto doc = corpus.document(d);
        for (std::size_t i = 0; i + s.size() <= doc.size(); ++i) {
            if (std::equal(s.begin(), s.end(), doc.begin() + static_cast<std::ptrdiff_t>(i))) {
                out.push_back({static_cast<std::uint32_t>(d), static_cast<std::uint32_t>(i + s.size() - 1)});
            }
        }
    }
    return out;
}

std::vector<SearchNode> all_unigrams(const Corpus& corpus) {
    std::vector<SearchNode> nodes(static_cast<std::size_t>(corpus.vocabulary_size()));
    for (std::size_t t = 0; t < nodes.size(); ++t) nodes[t].tokens = {static_cast<Token>(t)};
    for (std::size_t d = 0; d < corpus.size(); ++d) {
        auto doc = corpus.document(d);
        for (std::size_t i = 0; i < doc.size(); ++i) {
            if (doc[i] == kBoundary) continue;
            nodes[static_cast<std::size_t>(doc[i])].locations.push_back(
                {static_cast<std::uint32_t>(d), static_cast<std::uint32_t>(i)});
        }
    }
    std::erase_if(nodes, [](const SearchNode& n) { return n.locations.empty(); });
    return nodes;
}

namespace {

double log_loss(double margin) {
    return margin > 0.0 ? std::log1p(std::exp(-margin)) : -margin + std::log1p(std::exp(margin));
}

double sigmoid_neg(double margin) {
    // 1 / (1 + exp(margin)) without overflow.
    if (margin >= 0.0) {
        const double e = std::exp(-margin);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(margin));
}

/// Calls fn(doc, x) once per matched document, x being the feature value.
template <typename Fn>
void for_each_doc(std::span<const Location> locs, FeatureMode mode, Fn&& fn) {
    std::size_t i = 0;
    while (i < locs.size()) {
        const auto doc = locs[i].doc;
        std::size_t j = i;
        while (j < locs.size() && locs[j].doc == doc) ++j;
        fn(static_cast<std::size_t>(doc), mode == FeatureMode::Presence ? 1.0 : static_cast<double>(j - i));
        i = j;
    }
}

}  // namespace

LossState::LossState(const Corpus& corpus, const Params& params)
    : corpus_(&corpus), params_(params), margins_(corpus.size(), 0.0), factors_(corpus.size(), 0.5) {
    objective_ = recompute_objective();
}

double LossState::regularizer(double beta) const {
    return params_.C * (params_.gamma * std::abs(beta) + 0.5 * (1.0 - params_.gamma) * beta * beta);
}

double LossState::recompute_objective() const {
    std::vector<double> m(corpus_->size(), 0.0);
    for (std::size_t f = 0; f < active_.size(); ++f) {
        for_each_doc(active_[f].locations, params_.feature_mode, [&](std::size_t d, double x) {
            m[d] += corpus_->label(d) * x * coefs_[f];
        });
    }
    double total = 0.0;
    for (double v : m) total += log_loss(v);
    for (double b : coefs_) total += regularizer(b);
    return total;
}

double LossState::coefficient(std::span<const Token> s) const {
    auto it = index_.find(s);
    return it == index_.end() ? 0.0 : coefs_[it->second];
}

double LossState::objective_after(const SearchNode& node, double delta) const {
    std::vector<std::pair<std::size_t, double>> shifts;
    for_each_doc(node.locations, params_.feature_mode, [&](std::size_t d, double x) {
        shifts.emplace_back(d, corpus_->label(d) * x * delta);
    });
    double total = 0.0;
    std::size_t k = 0;
    for (std::size_t d = 0; d < margins_.size(); ++d) {
        if (k < shifts.size() && shifts[k].first == d) {
            total += log_loss(margins_[d] + shifts[k].second);
            ++k;
        } else {
            total += log_loss(margins_[d]);
        }
    }
    auto it = index_.find(node.tokens);
    const std::size_t target = it == index_.end() ? coefs_.size() : it->second;
    for (std::size_t f = 0; f < coefs_.size(); ++f) total += regularizer(f == target ? coefs_[f] + delta : coefs_[f]);
    if (target == coefs_.size()) total += regularizer(delta);
    return total;
}

void LossState::apply(const SearchNode& node, double delta) {
    auto it = index_.find(node.tokens);
    std::size_t f = 0;
    if (it == index_.end()) {
        f = active_.size();
        index_.emplace(node.tokens, f);
        active_.push_back(node);
        coefs_.push_back(0.0);
    } else {
        f = it->second;
    }
    coefs_[f] += delta;
    for_each_doc(node.locations, params_.feature_mode, [&](std::size_t d, double x) {
        margins_[d] += corpus_->label(d) * x * delta;
        factors_[d] = sigmoid_neg(margins_[d]);
    });
    double total = 0.0;
    for (double v : margins_) total += log_loss(v);
    for (double b : coefs_) total += regularizer(b);
    objective_ = total;
}

void LossState::assign(std::span<const SearchNode> nodes, std::span<const double> coefficients) {
    if (nodes.size() != coefficients.size()) throw InvalidArgument("assign: size mismatch");
    index_.clear();
    active_.clear();
    coefs_.clear();
    std::fill(margins_.begin(), margins_.end(), 0.0);
    std::fill(factors_.begin(), factors_.end(), 0.5);
    objective_ = recompute_objective();
    for (std::size_t i = 0; i < nodes.size(); ++i) apply(nodes[i], coefficients[i]);
}

namespace {

struct GradientAndBound {
    double gradient = 0.0;
    double bound = 0.0;
};

double finish_gradient(double data, double beta, const Params& p) {
    if (beta != 0.0) {
        const double sign = beta > 0.0 ? 1.0 : -1.0;
        return data + p.C * (p.gamma * sign + (1.0 - p.gamma) * beta);
    }
    const double threshold = p.C * p.gamma;
    if (std::abs(data) <= threshold) return 0.0;
    return data > 0.0 ? data - threshold : data + threshold;
}

// One pass over the matched documents for both quantities.
GradientAndBound gradient_and_bound(std::span<const Token> tokens, std::span<const Location> locations,
                                    const LossState& state) {
    const auto& corpus = state.corpus();
    const auto& p = state.params();
    double data = 0.0;
    double pos = 0.0;
    double neg = 0.0;
    for_each_doc(locations, p.feature_mode, [&](std::size_t d, double x) {
        const double f = x * state.logistic_factor(d);
        if (corpus.label(d) > 0) {
            data -= f;
            pos += f;
        } else {
            data += f;
            neg += f;
        }
    });
    return {finish_gradient(data, state.coefficient(tokens), p), std::max(0.0, std::max(pos, neg) - p.C * p.gamma)};
}

}  // namespace

double gradient(const SearchNode& node, const LossState& state) {
    const auto& corpus = state.corpus();
    const auto& p = state.params();
    double data = 0.0;
    for_each_doc(node.locations, p.feature_mode, [&](std::size_t d, double x) {
        data -= corpus.label(d) * x * state.logistic_factor(d);
    });
    return finish_gradient(data, state.coefficient(node.tokens), p);
}

double gradient(std::span<const Token> s, const LossState& state) {
    SearchNode node{Subsequence(s.begin(), s.end()), find_locations(state.corpus(), s)};
    return gradient(node, state);
}

double gradient_bound(const SearchNode& node, const LossState& state) {
    const auto& corpus = state.corpus();
    const auto& p = state.params();
    double pos = 0.0;
    double neg = 0.0;
    for_each_doc(node.locations, p.feature_mode, [&](std::size_t d, double x) {
        (corpus.label(d) > 0 ? pos : neg) += x * state.logistic_factor(d);
    });
    return std::max(0.0, std::max(pos, neg) - p.C * p.gamma);
}

bool better_candidate(double cand_abs, std::span<const Token> cand, double best_abs, std::span<const Token> best) {
    const double tol = kTieTolerance * std::max({1.0, cand_abs, best_abs});
    if (cand_abs > best_abs + tol) return true;
    if (cand_abs < best_abs - tol) return false;
    if (cand.size() != best.size()) return cand.size() < best.size();
    return std::lexicographical_compare(cand.begin(), cand.end(), best.begin(), best.end());
}

namespace {

// One breadth-first level: node i owns tokens[tok[i], tok[i+1]) and
// locations[loc[i], loc[i+1]).
struct Level {
    std::vector<Token> tokens;
    std::vector<Location> locations;
    std::vector<std::size_t> tok{0};
    std::vector<std::size_t> loc{0};

    [[nodiscard]] std::size_t size() const { return tok.size() - 1; }
    [[nodiscard]] std::span<const Token> node_tokens(std::size_t i) const {
        return std::span<const Token>(tokens).subspan(tok[i], tok[i + 1] - tok[i]);
    }
    [[nodiscard]] std::span<const Location> node_locations(std::size_t i) const {
        return std::span<const Location>(locations).subspan(loc[i], loc[i + 1] - loc[i]);
    }
    void clear() {
        tokens.clear();
        locations.clear();
        tok.assign(1, 0);
        loc.assign(1, 0);
    }
};

}  // namespace

SearchResult find_best_ngram(std::span<const SearchNode> seeds, const LossState& state) {
    if (seeds.empty()) throw InvalidArgument("empty vocabulary: no unigram seeds");
    SearchResult result;
    double best_abs = -1.0;
    bool have_best = false;

    auto consider = [&](std::span<const Token> tokens, std::span<const Location> locations, double g) {
        if (!have_best || better_candidate(std::abs(g), tokens, best_abs, result.node.tokens)) {
            result.node.tokens.assign(tokens.begin(), tokens.end());
            result.node.locations.assign(locations.begin(), locations.end());
            result.gradient = g;
            best_abs = std::abs(g);
            have_best = true;
        }
    };

    for (const auto& node : state.active()) {
        ++result.stats.visited;
        consider(node.tokens, node.locations, gradient(node, state));
    }

    const auto& corpus = state.corpus();
    const auto vocab = static_cast<std::size_t>(corpus.vocabulary_size());
    std::vector<std::size_t> counts(vocab);

    // Scores node i of `level`; unless pruned, appends its one-token
    // extensions to `next` in token order. Each child's locations keep the
    // parent's (document, position) order.
    auto expand = [&](const Level& level, std::size_t i, Level& next) {
        ++result.stats.visited;
        const auto tokens = level.node_tokens(i);
        const auto locations = level.node_locations(i);
        const auto gb = gradient_and_bound(tokens, locations, state);
        consider(tokens, locations, gb.gradient);
        const double tol = kTieTolerance * std::max(1.0, best_abs);
        // Descendants are longer than the node: when the incumbent is no longer
        // than the node, a tie cannot favour a descendant.
        if (have_best &&
            (gb.bound < best_abs - tol || (gb.bound <= best_abs + tol && result.node.tokens.size() <= tokens.size()))) {
            ++result.stats.pruned;
            return;
        }
        auto next_token = [&](const Location& l) -> Token {
            const auto doc = corpus.document(l.doc);
            const std::size_t nxt = static_cast<std::size_t>(l.end) + 1;
            return nxt < doc.size() ? doc[nxt] : kBoundary;
        };
        std::fill(counts.begin(), counts.end(), 0);
        std::size_t total = 0;
        for (const auto& l : locations) {
            const Token t = next_token(l);
            if (t == kBoundary) continue;
            ++counts[static_cast<std::size_t>(t)];
            ++total;
        }
        if (total == 0) return;
        // counts -> start offsets inside next.locations
        std::size_t offset = next.locations.size();
        next.locations.resize(offset + total);
        for (std::size_t t = 0; t < vocab; ++t) {
            if (counts[t] == 0) continue;
            next.tokens.insert(next.tokens.end(), tokens.begin(), tokens.end());
            next.tokens.push_back(static_cast<Token>(t));
            next.tok.push_back(next.tokens.size());
            const std::size_t n = counts[t];
            counts[t] = offset;
            offset += n;
            next.loc.push_back(offset);
        }
        for (const auto& l : locations) {
            const Token t = next_token(l);
            if (t == kBoundary) continue;
            next.locations[counts[static_cast<std::size_t>(t)]++] = {l.doc, l.end + 1};
        }
    };

    Level level;
    for (const auto& seed : seeds) {
        level.tokens.insert(level.tokens.end(), seed.tokens.begin(), seed.tokens.end());
        level.tok.push_back(level.tokens.size());
        level.locations.insert(level.locations.end(), seed.locations.begin(), seed.locations.end());
        level.loc.push_back(level.locations.size());
    }
    Level next;
    while (level.size() > 0) {
        next.clear();
        for (std::size_t i = 0; i < level.size(); ++i) expand(level, i, next);
        std::swap(level, next);
    }
    return result;
}

std::optional<double> line_search(const SearchNode& node, double gradient, const LossState& state) {
    if (gradient == 0.0 || !std::isfinite(gradient)) return std::nullopt;
    const auto& p = state.params();
    const double f0 = state.objective();
    double eta = p.initial_step;
    double f = state.objective_after(node, -eta * gradient);
    if (f < f0) {
        for (int i = 0; i < 64; ++i) {
            const double f2 = state.objective_after(node, -2.0 * eta * gradient);
            if (!(f2 < f)) break;
            eta *= 2.0;
            f = f2;
        }
        return eta;
    }
    for (int h = 0; h < p.max_halvings; ++h) {
        eta *= 0.5;
        f = state.objective_after(node, -eta * gradient);
        if (f < f0) return eta;
    }
    return std::nullopt;
}

double Model::score(std::span<const Token> doc) const {
    double s = bias;
    for (const auto& f : features) s += f.coefficient * feature_value(doc, f.tokens, params.feature_mode);
    return s;
}

double Model::score(std::span<const Word> words) const { return score(flatten(words)); }

Model train(const Corpus& corpus, const Params& params, const Observer& observer) {
    if (corpus.size() == 0) throw InvalidArgument("cannot train on an empty corpus");
    const auto& labels = corpus.labels();
    const bool has_pos = std::find(labels.begin(), labels.end(), 1) != labels.end();
    const bool has_neg = std::find(labels.begin(), labels.end(), -1) != labels.end();
    if (!has_pos || !has_neg) throw InvalidArgument("training corpus needs both +1 and -1 documents");

    const auto seeds = all_unigrams(corpus);
    LossState state(corpus, params);
    for (int it = 0; it < params.max_iters; ++it) {
        auto found = find_best_ngram(seeds, state);
        if (found.gradient == 0.0) break;
        const auto eta = line_search(found.node, found.gradient, state);
        if (!eta) break;
        IterationRecord rec;
        rec.iteration = it;
        rec.selected = found.node.tokens;
        rec.gradient = found.gradient;
        rec.step = *eta;
        rec.objective_before = state.objective();
        rec.stats = found.stats;
        state.apply(found.node, -*eta * found.gradient);
        rec.objective_after = state.objective();
        if (observer) observer(rec, state);
        const double rel = (rec.objective_before - rec.objective_after) / std::max(std::abs(rec.objective_before), 1e-300);
        if (rel < params.convergence_tol) break;
    }

    Model model;
    model.params = params;
    const auto& active = state.active();
    const auto& coefs = state.active_coefficients();
    for (std::size_t f = 0; f < active.size(); ++f) model.features.push_back({active[f].tokens, coefs[f]});
    return model;
}

std::string_view to_string(FeatureMode m) { return m == FeatureMode::Presence ? "presence" : "count"; }

FeatureMode parse_feature_mode(std::string_view s) {
    if (s == "presence") return FeatureMode::Presence;
    if (s == "count") return FeatureMode::Count;
    throw FormatError("unknown feature mode '" + std::string(s) + "'");
}

void write_model(std::ostream& out, const Model& model, const SymbolicConfig& cfg) {
    using textio::format_double;
    const auto& p = model.params;
    out << "# seql C=" << format_double(p.C) << " gamma=" << format_double(p.gamma) << " max_iters=" << p.max_iters
        << " convergence_tol=" << format_double(p.convergence_tol) << " initial_step=" << format_double(p.initial_step)
        << " max_halvings=" << p.max_halvings << " feature_mode=" << to_string(p.feature_mode)
        << " bias=" << format_double(model.bias) << " features=" << model.features.size() << '\n';
    for (const auto& f : model.features) out << format_double(f.coefficient) << '\t' << render_tokens(cfg, f.tokens) << '\n';
}

Model parse_model(std::span<const std::string> lines, const SymbolicConfig& cfg) {
    if (lines.empty() || lines.front().rfind("# seql", 0) != 0) throw FormatError("missing '# seql' model header");
    const std::string_view header = lines.front();
    Model m;
    auto& p = m.params;
    p.C = textio::parse_double(textio::find_value(header, "C"));
    p.gamma = textio::parse_double(textio::find_value(header, "gamma"));
    p.max_iters = static_cast<int>(textio::parse_int(textio::find_value(header, "max_iters")));
    p.convergence_tol = textio::parse_double(textio::find_value(header, "convergence_tol"));
    p.initial_step = textio::parse_double(textio::find_value(header, "initial_step"));
    p.max_halvings = static_cast<int>(textio::parse_int(textio::find_value(header, "max_halvings")));
    p.feature_mode = parse_feature_mode(textio::find_value(header, "feature_mode"));
    m.bias = textio::parse_double(textio::find_value(header, "bias"));
    const auto n = static_cast<std::size_t>(textio::parse_int(textio::find_value(header, "features")));
    if (lines.size() < n + 1) throw FormatError("model declares " + std::to_string(n) + " features but has fewer lines");
    for (std::size_t i = 1; i <= n; ++i) {
        const std::string_view line = lines[i];
        const auto tab = line.find('\t');
        if (tab == std::string_view::npos) throw FormatError("bad model line: " + std::string(line));
        const double coef = textio::parse_double(line.substr(0, tab));
        if (!std::isfinite(coef)) throw FormatError("non-finite coefficient");
        m.features.push_back({parse_tokens(cfg, textio::trim(line.substr(tab + 1))), coef});
    }
    return m;
}

Model read_model(std::istream& in, const SymbolicConfig& cfg) {
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) lines.push_back(line);
    }
    return parse_model(lines, cfg);
}

}  // namespace mrseql::seql
