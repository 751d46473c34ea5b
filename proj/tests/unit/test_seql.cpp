#include <cmath>
#include <sstream>

#include "doctest.h"
#include "mrseql/error.hpp"
#include "mrseql/seql.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

using namespace mrseql;
using namespace mrseql::seql;

namespace {

const SymbolicConfig kSax4{Domain::Sax, 8, 4, 4};

Corpus parse_corpus(const std::string& text) {
    std::istringstream in(text);
    return Corpus::read(in, kSax4);
}

}  // namespace

TEST_CASE("corpus reading and feature values") {
    const auto c = parse_corpus("+1 abba abbc\n-1 abba\n");
    REQUIRE(c.size() == 2);
    CHECK(c.label(0) == 1);
    CHECK(c.label(1) == -1);
    const auto doc = c.document(0);
    CHECK(feature_value(doc, Subsequence{1, 1}) == 1.0);        // "bb"
    CHECK(feature_value(c.document(1), Subsequence{0, 2}) == 0.0);  // "ac"
    CHECK(feature_value(doc, Subsequence{0, 0}) == 0.0);        // "a a" spans a space
    CHECK(feature_value(doc, Subsequence{1, 1}, FeatureMode::Count) == 2.0);
    CHECK(count_occurrences(doc, Subsequence{1}) == 4);

    std::istringstream bad("0 abba\n");
    CHECK_THROWS_AS(Corpus::read(bad, kSax4), FormatError);
    std::istringstream wrong_letter("+1 abxa\n");
    CHECK_THROWS_AS(Corpus::read(wrong_letter, kSax4), FormatError);
}

TEST_CASE("locations are exact and shrink along the tree") {
    synth::Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const auto p = synth::random_problem(rng, 12, 6, 3);
        const auto corpus = synth::to_corpus(p, 3);
        for (const auto& s : oracle::all_subsequences(p)) {
            const auto locs = find_locations(corpus, Subsequence(s.begin(), s.end()));
            std::set<std::uint32_t> docs;
            for (const auto& l : locs) docs.insert(l.doc);
            for (std::size_t i = 0; i < p.docs.size(); ++i) CHECK(docs.contains(static_cast<std::uint32_t>(i)) == oracle::contains(p.docs[i], s));
            if (s.size() > 1) {
                const auto parent = find_locations(corpus, Subsequence(s.begin(), s.end() - 1));
                CHECK(locs.size() <= parent.size());
            }
        }
    }
}

TEST_CASE("gradient special cases") {
    Params params;
    params.C = 0.0;
    const auto c = parse_corpus("+1 ab\n+1 ab\n-1 cd\n-1 ab\n");
    LossState state(c, params);
    // beta = 0, C = 0: gradient is -1/2 * sum y_i x_i.
    CHECK(gradient(Subsequence{0, 1}, state) == doctest::Approx(-0.5 * (1 + 1 - 1)));
    CHECK(gradient(Subsequence{2}, state) == doctest::Approx(0.5));

    const auto balanced = parse_corpus("+1 ab\n-1 ab\n+1 cc\n-1 dd\n");
    LossState b(balanced, params);
    CHECK(gradient(Subsequence{0}, b) == 0.0);

    // One-sided support at beta = 0 makes the bound tight.
    const SearchNode node{{0, 1}, find_locations(c, Subsequence{0, 1})};
    const SearchNode cc{{2, 2}, find_locations(c, Subsequence{2, 2})};
    CHECK(gradient_bound(SearchNode{{2}, find_locations(c, Subsequence{2})}, state) == doctest::Approx(0.5));
    CHECK(gradient_bound(node, state) == doctest::Approx(1.0));
    CHECK(gradient_bound(cc, state) == 0.0);

    Params reg;
    LossState r(c, reg);
    CHECK(gradient_bound(cc, r) == 0.0);
    CHECK(gradient(Subsequence{3}, r) == doctest::Approx(0.5 - reg.C * reg.gamma));
}

TEST_CASE("gradient matches the from-scratch oracle and finite differences") {
    synth::Rng rng(33);
    std::uniform_real_distribution<double> coef(-1.5, 1.5);
    for (int trial = 0; trial < 60; ++trial) {
        auto p = synth::random_problem(rng, 15, 5, 3);
        p.C = 0.5 + trial % 3;
        p.gamma = (trial % 5) / 4.0;
        const auto corpus = synth::to_corpus(p, 3);
        Params params;
        params.C = p.C;
        params.gamma = p.gamma;
        LossState state(corpus, params);

        const auto subs = oracle::all_subsequences(p);
        std::vector<SearchNode> nodes;
        std::vector<double> values;
        oracle::Coefficients beta;
        std::size_t k = 0;
        for (const auto& s : subs) {
            if (k++ % 3 != 0) continue;
            const Subsequence t(s.begin(), s.end());
            nodes.push_back({t, find_locations(corpus, t)});
            values.push_back(coef(rng));
            beta[s] = values.back();
        }
        state.assign(nodes, values);
        CHECK(state.objective() == doctest::Approx(oracle::objective(p, beta)).epsilon(1e-12));
        CHECK(state.recompute_objective() == doctest::Approx(state.objective()).epsilon(1e-12));

        for (const auto& s : subs) {
            const Subsequence t(s.begin(), s.end());
            const double g = gradient(t, state);
            const double want = oracle::gradient(p, beta, s);
            CHECK(g == doctest::Approx(want).epsilon(1e-10).scale(1.0));
            if (!beta.contains(s)) {
                const SearchNode node{t, find_locations(corpus, t)};
                CHECK(gradient_bound(node, state) + 1e-12 >= std::abs(g));
            }
        }
    }
}

TEST_CASE("find_best_ngram equals the exhaustive argmax") {
    synth::Rng rng(35);
    for (int trial = 0; trial < 30; ++trial) {
        const auto p = synth::random_problem(rng, 20, 6, 3);
        const auto corpus = synth::to_corpus(p, 3);
        Params params;
        params.C = p.C;
        params.gamma = p.gamma;
        LossState state(corpus, params);
        const auto seeds = all_unigrams(corpus);
        const auto got = find_best_ngram(seeds, state);
        const auto want = oracle::argmax(p, {});
        CHECK(std::vector<int>(got.node.tokens.begin(), got.node.tokens.end()) == want.tokens);
        CHECK(got.gradient == doctest::Approx(want.gradient).epsilon(1e-12));
    }
}

TEST_CASE("dominant unigram wins") {
    const auto c = parse_corpus("+1 ab\n+1 ab\n+1 ab\n-1 bb\n-1 bb\n-1 bb\n");
    LossState state(c, Params{});
    const auto r = find_best_ngram(all_unigrams(c), state);
    CHECK(r.node.tokens == Subsequence{0});
    CHECK_THROWS_AS(find_best_ngram({}, state), InvalidArgument);
}

TEST_CASE("pruning activates on a larger corpus") {
    synth::Rng rng(37);
    auto p = synth::random_problem(rng, 100, 8, 4);
    while (p.docs.size() < 100) p = synth::random_problem(rng, 100, 8, 4);
    const auto corpus = synth::to_corpus(p, 4);
    LossState state(corpus, Params{});
    const auto r = find_best_ngram(all_unigrams(corpus), state);
    CHECK(r.stats.pruned > 0);
}

TEST_CASE("line search and training") {
    std::string text;
    for (int i = 0; i < 10; ++i) text += "+1 aa\n-1 bb\n";
    const auto c = parse_corpus(text);
    Params params;
    LossState state(c, params);
    const auto best = find_best_ngram(all_unigrams(c), state);
    const auto eta = line_search(best.node, best.gradient, state);
    REQUIRE(eta.has_value());
    CHECK(*eta > 0.0);
    CHECK(state.objective_after(best.node, -*eta * best.gradient) < state.objective());
    CHECK_FALSE(line_search(best.node, 0.0, state).has_value());

    std::vector<double> trace;
    const auto model = train(c, params, [&](const IterationRecord& r, const LossState& s) {
        CHECK(r.objective_after <= r.objective_before);
        CHECK(s.recompute_objective() == doctest::Approx(s.objective()).epsilon(1e-9));
        trace.push_back(r.objective_after);
    });
    CHECK_FALSE(trace.empty());
    CHECK(model.predict(parse_corpus("+1 aa\n").document(0)) == 1);
    CHECK(model.predict(parse_corpus("-1 bb\n").document(0)) == -1);

    const auto single = parse_corpus("+1 aa\n+1 ab\n");
    CHECK_THROWS_AS(train(single, params), InvalidArgument);
}

TEST_CASE("training is deterministic and margins agree with scores") {
    synth::Rng rng(39);
    const auto p = synth::random_problem(rng, 30, 6, 4);
    const auto corpus = synth::to_corpus(p, 4);
    Params params;
    params.C = 0.1;
    const Model a = train(corpus, params);
    const Model b = train(corpus, params);
    std::ostringstream sa;
    std::ostringstream sb;
    write_model(sa, a, kSax4);
    write_model(sb, b, kSax4);
    CHECK(sa.str() == sb.str());

    LossState state(corpus, params);
    std::vector<SearchNode> nodes;
    std::vector<double> coefs;
    for (const auto& f : a.features) {
        nodes.push_back({f.tokens, find_locations(corpus, f.tokens)});
        coefs.push_back(f.coefficient);
    }
    state.assign(nodes, coefs);
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        CHECK(state.margins()[i] == doctest::Approx(corpus.label(i) * a.score(corpus.document(i))).epsilon(1e-9));
    }
    std::set<Subsequence> unique;
    for (const auto& f : a.features) CHECK(unique.insert(f.tokens).second);
}

TEST_CASE("model scoring") {
    const auto abba = parse_corpus("+1 abba\n");
    const auto doc = abba.document(0);
    Model empty;
    CHECK(empty.score(doc) == 0.0);
    CHECK(empty.predict(doc) == -1);
    Model one;
    one.features.push_back({{1, 1}, 0.5});
    CHECK(one.score(doc) == 0.5);

    synth::Rng rng(41);
    const auto p = synth::random_problem(rng, 10, 5, 3);
    const auto corpus = synth::to_corpus(p, 3);
    Model m;
    const auto subs = oracle::all_subsequences(p);
    double w = 0.25;
    for (const auto& s : subs) m.features.push_back({Subsequence(s.begin(), s.end()), w += 0.5});
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        double dot = 0.0;
        for (const auto& f : m.features) dot += f.coefficient * (oracle::contains(p.docs[i], {f.tokens.begin(), f.tokens.end()}) ? 1.0 : 0.0);
        CHECK(m.score(corpus.document(i)) == doctest::Approx(dot));
    }
}

TEST_CASE("model text round trip") {
    Model m;
    m.params.C = 0.3;
    m.params.feature_mode = FeatureMode::Count;
    m.features.push_back({{0, 1, 1}, 1.0 / 3.0});
    m.features.push_back({{3}, -2e-7});
    std::ostringstream out;
    write_model(out, m, kSax4);
    std::istringstream in(out.str());
    const auto back = read_model(in, kSax4);
    CHECK(back.params.C == m.params.C);
    CHECK(back.params.feature_mode == FeatureMode::Count);
    REQUIRE(back.features.size() == 2);
    CHECK(back.features[0].tokens == m.features[0].tokens);
    CHECK(back.features[0].coefficient == m.features[0].coefficient);
    CHECK(back.features[1].coefficient == m.features[1].coefficient);

    std::istringstream junk("0.5\tab\n");
    CHECK_THROWS_AS(read_model(junk, kSax4), FormatError);
}
