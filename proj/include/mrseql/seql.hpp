#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mrseql/symbolic.hpp"

namespace mrseql::seql {

enum class FeatureMode : std::uint8_t {
    Presence,  ///< x_ij = 1 if the subsequence occurs in document i
    Count,     ///< x_ij = number of occurrences
};

struct Params {
    double C = 1.0;
    /// Elastic-net mix: 1 is pure L1, 0 pure L2.
    double gamma = 0.2;
    int max_iters = 500;
    /// Stop when (L_prev - L) / L_prev drops below this.
    double convergence_tol = 1e-6;
    double initial_step = 1.0;
    int max_halvings = 20;
    FeatureMode feature_mode = FeatureMode::Presence;
};

using Subsequence = std::vector<Token>;

/// Separates words inside a flattened document.
inline constexpr Token kBoundary = -1;

/// Labelled token documents. Each document is stored flat with kBoundary
/// between words, so a match can never cross a word.
class Corpus {
public:
    Corpus(std::vector<std::vector<Word>> documents, std::vector<int> labels, int vocabulary_size);

    static Corpus from_sequences(std::span<const SymbolicSequence> sequences, std::span<const int> labels);
    /// Reads the "+1 abba abbc" line format for words rendered under `cfg`.
    static Corpus read(std::istream& in, const SymbolicConfig& cfg);

    [[nodiscard]] std::size_t size() const noexcept { return docs_.size(); }
    [[nodiscard]] std::span<const Token> document(std::size_t i) const { return docs_[i]; }
    [[nodiscard]] int label(std::size_t i) const { return labels_[i]; }
    [[nodiscard]] const std::vector<int>& labels() const noexcept { return labels_; }
    [[nodiscard]] int vocabulary_size() const noexcept { return vocab_; }

private:
    std::vector<std::vector<Token>> docs_;
    std::vector<int> labels_;
    int vocab_ = 0;
};

/// Flattens words with kBoundary separators.
std::vector<Token> flatten(std::span<const Word> words);

/// Occurrence count of `s` inside the words of a flattened document.
std::size_t count_occurrences(std::span<const Token> doc, std::span<const Token> s);
double feature_value(std::span<const Token> doc, std::span<const Token> s, FeatureMode mode = FeatureMode::Presence);

/// Match of a subsequence: document and offset of its last token.
struct Location {
    std::uint32_t doc = 0;
    std::uint32_t end = 0;

    auto operator<=>(const Location&) const = default;
};

/// A node of the subsequence tree with every occurrence in the corpus.
struct SearchNode {
    Subsequence tokens;
    std::vector<Location> locations;
};

std::vector<Location> find_locations(const Corpus& corpus, std::span<const Token> s);

/// Unigram seeds, ordered by token id.
std::vector<SearchNode> all_unigrams(const Corpus& corpus);

/// Coefficients, cached margins y_i * beta^T x_i, and the elastic-net
/// regularized binomial log-likelihood they imply.
class LossState {
public:
    LossState(const Corpus& corpus, const Params& params);

    [[nodiscard]] const Corpus& corpus() const noexcept { return *corpus_; }
    [[nodiscard]] const Params& params() const noexcept { return params_; }
    [[nodiscard]] std::span<const double> margins() const noexcept { return margins_; }
    [[nodiscard]] double objective() const noexcept { return objective_; }
    /// Full recomputation of the objective from the coefficients.
    [[nodiscard]] double recompute_objective() const;

    [[nodiscard]] double coefficient(std::span<const Token> s) const;
    /// Active features in order of first selection.
    [[nodiscard]] const std::vector<SearchNode>& active() const noexcept { return active_; }
    [[nodiscard]] const std::vector<double>& active_coefficients() const noexcept { return coefs_; }

    /// 1 / (1 + exp(margin_i)), the logistic weight of document i.
    [[nodiscard]] double logistic_factor(std::size_t doc) const { return factors_[doc]; }

    /// Objective if the coefficient of `node` moved by `delta`.
    [[nodiscard]] double objective_after(const SearchNode& node, double delta) const;
    /// Applies beta_s += delta and refreshes margins and objective.
    void apply(const SearchNode& node, double delta);

    /// Sets an explicit coefficient vector (test helper); margins recomputed.
    void assign(std::span<const SearchNode> nodes, std::span<const double> coefficients);

private:
    [[nodiscard]] double regularizer(double beta) const;

    const Corpus* corpus_;
    Params params_;
    std::vector<double> margins_;
    std::vector<double> factors_;
    double objective_ = 0.0;
    struct TokensLess {
        using is_transparent = void;
        bool operator()(std::span<const Token> a, std::span<const Token> b) const {
            return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
        }
    };
    std::map<Subsequence, std::size_t, TokensLess> index_;
    std::vector<SearchNode> active_;
    std::vector<double> coefs_;
};

/// dL/d beta_s. For an inactive feature the L1 subgradient is soft-thresholded:
/// zero when |data term| <= C*gamma, else the data term shrunk by C*gamma.
double gradient(const SearchNode& node, const LossState& state);
double gradient(std::span<const Token> s, const LossState& state);

/// Upper bound on |gradient| of every inactive supersequence of the node:
/// max of the positive-class and negative-class sums of logistic factors over
/// matched documents, minus C*gamma, floored at zero.
double gradient_bound(const SearchNode& node, const LossState& state);

struct SearchStats {
    std::size_t visited = 0;
    std::size_t pruned = 0;
};

struct SearchResult {
    SearchNode node;
    double gradient = 0.0;
    SearchStats stats;
};

/// Relative tolerance under which two gradient magnitudes count as tied.
inline constexpr double kTieTolerance = 1e-12;

/// True if candidate (|g|, tokens) beats incumbent under max-|g|, then
/// shorter, then lexicographically smaller token ids.
bool better_candidate(double cand_abs, std::span<const Token> cand, double best_abs, std::span<const Token> best);

/// Breadth-first branch-and-bound search for the subsequence with maximal
/// |gradient|. Active features are scored first so pruning only needs to
/// bound inactive supersequences. Throws on an empty vocabulary.
SearchResult find_best_ngram(std::span<const SearchNode> seeds, const LossState& state);

/// Step length for beta_s -= eta * g: doubles from initial_step while the
/// objective keeps improving, otherwise halves up to max_halvings times.
/// nullopt when no step improves the objective.
std::optional<double> line_search(const SearchNode& node, double gradient, const LossState& state);

struct Feature {
    Subsequence tokens;
    double coefficient = 0.0;
};

struct Model {
    std::vector<Feature> features;
    double bias = 0.0;
    Params params;

    [[nodiscard]] double score(std::span<const Token> doc) const;
    [[nodiscard]] double score(std::span<const Word> words) const;
    /// Sign of the score; an exact zero predicts -1.
    [[nodiscard]] int predict(std::span<const Token> doc) const { return score(doc) > 0.0 ? 1 : -1; }
};

struct IterationRecord {
    int iteration = 0;
    Subsequence selected;
    double gradient = 0.0;
    double step = 0.0;
    double objective_before = 0.0;
    double objective_after = 0.0;
    SearchStats stats;
};

/// Called after each accepted update. The state reflects the update.
using Observer = std::function<void(const IterationRecord&, const LossState&)>;

/// Greedy coordinate descent over the all-subsequence space.
Model train(const Corpus& corpus, const Params& params, const Observer& observer = {});

/// Header line plus "coefficient<TAB>tokens" per feature.
void write_model(std::ostream& out, const Model& model, const SymbolicConfig& cfg);
Model parse_model(std::span<const std::string> lines, const SymbolicConfig& cfg);
Model read_model(std::istream& in, const SymbolicConfig& cfg);

std::string_view to_string(FeatureMode m);
FeatureMode parse_feature_mode(std::string_view s);

}  // namespace mrseql::seql
