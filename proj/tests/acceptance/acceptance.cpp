// Acceptance suite: one PASS/FAIL line per criterion. Pass criterion numbers
// on the command line to run a subset; the exit status is non-zero if any
// selected criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mrseql/classifier.hpp"
#include "mrseql/interpret.hpp"
#include "mrseql/sax.hpp"
#include "mrseql/seql.hpp"
#include "mrseql/sfa.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

using namespace mrseql;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kBreakpointTol = 1e-4;
constexpr double kDftTol = 1e-9;
constexpr double kFdStep = 1e-5;  // near the cube root of machine epsilon
constexpr double kFdRelTol = 1e-5;
// Relative error denominators are floored here so a vanishing gradient is
// compared in absolute terms.
constexpr double kFdFloor = 1e-3;
constexpr double kBaselineTol = 0.01;
constexpr double kConservationTol = 1e-9;
constexpr double kDeskSeconds = 120.0;
constexpr double kScalingSlack = 1.5;
constexpr double kSaxSeconds = 10.0;
constexpr double kSeqlSeconds = 60.0;

// Small UCR suite. Coffee joins the suite when its split is present.
const std::vector<std::string> kSuite{"ArrowHead", "Coffee", "GunPoint", "ItalyPowerDemand", "Trace", "UnitTest"};

// Test errors of mtsax-seql+lr recorded from the first correct build:
// {dataset, step divisor 1, step divisor 0.25}.
struct Baseline {
    const char* dataset;
    double divisor_1;
    double divisor_quarter;
};
constexpr Baseline kBaselines[] = {
    {"ArrowHead", 0.251429, 0.262857},
    {"GunPoint", 0.006667, 0.006667},
    {"ItalyPowerDemand", 0.104956, 0.104956},
    {"Trace", 0.0, 0.0},
    {"UnitTest", 0.090909, 0.090909},
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// ---------------------------------------------------------------------------
// Data and cached runs shared between criteria.

struct Split {
    TimeSeriesDataset train;
    TimeSeriesDataset test;
};

std::optional<Split> load_split(const std::string& name) {
    const fs::path dir = fs::path(MRSEQL_DATA_DIR) / name;
    for (const char* ext : {"", ".tsv", ".txt", ".csv"}) {
        const auto train = dir / (name + "_TRAIN" + ext);
        const auto test = dir / (name + "_TEST" + ext);
        if (fs::exists(train) && fs::exists(test)) return Split{load_ucr(train), load_ucr(test)};
    }
    return std::nullopt;
}

struct RunResult {
    double error = 0.0;
    double seconds = 0.0;  // load + train + predict
    std::shared_ptr<Classifier> model;
};

std::map<std::string, RunResult> g_runs;

const RunResult* run(const std::string& dataset, Mode mode, double divisor = 1.0) {
    const auto key = dataset + "/" + std::string(to_string(mode)) + "/" + fmt("%g", divisor);
    if (auto it = g_runs.find(key); it != g_runs.end()) return &it->second;
    const auto start = Clock::now();
    const auto split = load_split(dataset);
    if (!split) return nullptr;
    RunConfig cfg;
    cfg.mode = mode;
    cfg.schedule.step_divisor = divisor;
    auto model = std::make_shared<Classifier>(Classifier::train(split->train, cfg));
    const auto predictions = model->predict(split->test);
    RunResult r{error_rate(split->test, predictions), seconds_since(start), model};
    std::fprintf(stderr, "  [%s error %.6f, %.1f s]\n", key.c_str(), r.error, r.seconds);
    return &g_runs.emplace(key, std::move(r)).first->second;
}

std::vector<std::string> available_suite() {
    std::vector<std::string> out;
    for (const auto& name : kSuite) {
        if (load_split(name)) out.push_back(name);
    }
    return out;
}

// ---------------------------------------------------------------------------
// 1. SAX against the reference implementation.

Outcome sax_oracle() {
    synth::Rng rng(1001);
    std::size_t mismatches = 0;
    std::size_t words = 0;
    const auto start = Clock::now();
    for (int trial = 0; trial < 1000; ++trial) {
        const auto L = std::uniform_int_distribution<int>(30, 300)(rng);
        const auto l = std::uniform_int_distribution<int>(2, L)(rng);
        // w = 1 makes every segment mean the window mean, which is exactly
        // the breakpoint 0 up to rounding; the symbol is then rounding noise.
        const auto w = std::uniform_int_distribution<int>(2, std::min(l, 32))(rng);
        const auto alpha = std::uniform_int_distribution<int>(2, 20)(rng);
        const bool reduce = trial % 2 == 0;
        const auto x = trial % 3 == 0 ? synth::gaussian(rng, static_cast<std::size_t>(L))
                                      : synth::random_walk(rng, static_cast<std::size_t>(L));
        const SaxConfig cfg{l, w, alpha, reduce};
        const auto got = sax_transform(x, cfg);
        const auto want = oracle::sax(x, l, w, alpha, reduce);
        words += want.size();
        if (got.words.size() != want.size()) {
            ++mismatches;
            continue;
        }
        for (std::size_t i = 0; i < want.size(); ++i) {
            std::string s;
            for (auto t : got.words[i]) s.push_back(static_cast<char>('a' + t));
            if (s != want[i]) {
                ++mismatches;
                break;
            }
        }
    }
    const double secs = seconds_since(start);
    return {mismatches == 0 && secs < kSaxSeconds,
            fmt("1000 series, %zu words, %zu mismatching series, %.2f s (limit %.0f s)", words, mismatches, secs, kSaxSeconds)};
}

// 2. Gaussian breakpoints.

Outcome breakpoints() {
    const auto b = gaussian_breakpoints(4).breakpoints;
    const std::vector<double> want{-0.6745, 0.0, 0.6745};
    double worst = 0.0;
    for (std::size_t i = 0; i < 3; ++i) worst = std::max(worst, std::abs(b.at(i) - want[i]));
    return {b.size() == 3 && worst <= kBreakpointTol,
            fmt("alpha=4 -> {%.6f, %.6f, %.6f}, max deviation %.2e", b[0], b[1], b[2], worst)};
}

// 3. Equi-depth MCB occupancy and DFT against direct summation.

Outcome sfa_checks() {
    synth::Rng rng(1003);
    constexpr int kWindow = 32;
    std::vector<TimeSeries> windows;
    for (int i = 0; i < 1000; ++i) windows.push_back({synth::gaussian(rng, kWindow), i % 2});
    const TimeSeriesDataset ds(windows);
    SfaConfig cfg{kWindow, 8, 4};
    cfg.drop_dc = true;  // with normalized windows the DC pair is constant
    const auto table = fit_mcb(ds, cfg);
    int worst = 0;
    for (std::size_t p = 0; p < table.bins.size(); ++p) {
        std::vector<int> occupancy(static_cast<std::size_t>(cfg.alphabet), 0);
        for (const auto& s : windows) {
            const double v = sfa_approx(s.values, cfg)[p];
            ++occupancy[static_cast<std::size_t>(table.lookup(p, v))];
        }
        for (int n : occupancy) worst = std::max(worst, std::abs(n - 1000 / cfg.alphabet));
    }

    double dft_err = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t l = 8 + static_cast<std::size_t>(trial % 120);
        const int w = 2 * (1 + trial % 6);
        const auto x = synth::random_walk(rng, l);
        const auto got = dft_approx(x, w);
        const auto want = oracle::dft(x, w);
        for (std::size_t i = 0; i < want.size(); ++i) dft_err = std::max(dft_err, std::abs(got.at(i) - want[i]));
    }
    return {worst <= 1 && dft_err <= kDftTol,
            fmt("1000 windows, %zu positions, worst occupancy deviation %d (limit 1); DFT max error %.2e over 200 windows",
                table.bins.size(), worst, dft_err)};
}

// 4. Every SEQL selection equals the exhaustive argmax.

oracle::Coefficients snapshot(const seql::LossState& state) {
    oracle::Coefficients beta;
    for (std::size_t f = 0; f < state.active().size(); ++f) {
        const auto& t = state.active()[f].tokens;
        beta[std::vector<int>(t.begin(), t.end())] = state.active_coefficients()[f];
    }
    return beta;
}

std::size_t g_trace_violations = 0;
std::size_t g_trace_runs = 0;

Outcome seql_soundness() {
    synth::Rng rng(1004);
    const auto start = Clock::now();
    std::size_t iterations = 0;
    std::size_t wrong = 0;
    std::size_t pruned = 0;
    for (int c = 0; c < 50; ++c) {
        const int vocab = 2 + c % 3;
        const auto p = synth::random_problem(rng, 30, 6, vocab);
        const auto corpus = synth::to_corpus(p, vocab);
        seql::Params params;
        oracle::Coefficients before;
        (void)seql::train(corpus, params, [&](const seql::IterationRecord& r, const seql::LossState& s) {
            const auto want = oracle::argmax(p, before, seql::kTieTolerance);
            if (std::vector<int>(r.selected.begin(), r.selected.end()) != want.tokens) ++wrong;
            if (r.objective_after > r.objective_before) ++g_trace_violations;
            pruned += r.stats.pruned;
            ++iterations;
            before = snapshot(s);
        });
        ++g_trace_runs;
    }
    const double secs = seconds_since(start);
    return {wrong == 0 && iterations > 0 && secs < kSeqlSeconds,
            fmt("50 corpora, %zu iterations, %zu selections differ from the exhaustive argmax, %zu subtrees pruned, %.2f s "
                "(limit %.0f s)",
                iterations, wrong, pruned, secs, kSeqlSeconds)};
}

// 5. Gradient against finite differences; monotone objective traces.

Outcome gradient_checks() {
    synth::Rng rng(1005);
    std::uniform_real_distribution<double> coef(-1.5, 1.5);
    double worst = 0.0;
    std::size_t checked = 0;
    std::size_t kink_violations = 0;
    for (int inst = 0; inst < 100; ++inst) {
        const int vocab = 2 + inst % 3;
        auto p = synth::random_problem(rng, 20, 5, vocab);
        p.C = 0.25 + 0.25 * (inst % 8);
        p.gamma = (inst % 5) / 4.0;
        const auto corpus = synth::to_corpus(p, vocab);
        seql::Params params;
        params.C = p.C;
        params.gamma = p.gamma;
        seql::LossState state(corpus, params);

        const auto subs = oracle::all_subsequences(p);
        std::vector<seql::SearchNode> nodes;
        std::vector<double> values;
        std::size_t k = 0;
        for (const auto& s : subs) {
            if (k++ % 2 != 0) continue;
            double v = coef(rng);
            if (std::abs(v) < 1e-2) v = 0.5;
            const seql::Subsequence t(s.begin(), s.end());
            nodes.push_back({t, seql::find_locations(corpus, t)});
            values.push_back(v);
        }
        state.assign(nodes, values);
        const auto active = snapshot(state);
        const double f0 = state.objective();
        const double h = kFdStep;

        for (const auto& s : subs) {
            const seql::Subsequence t(s.begin(), s.end());
            const seql::SearchNode node{t, seql::find_locations(corpus, t)};
            const double g = seql::gradient(node, state);
            if (active.contains(s)) {
                const double fd = (state.objective_after(node, h) - state.objective_after(node, -h)) / (2.0 * h);
                worst = std::max(worst, std::abs(g - fd) / std::max({std::abs(g), std::abs(fd), kFdFloor}));
                ++checked;
                continue;
            }
            // At beta = 0 the objective has a kink. Second-order one-sided
            // differences give the right and left derivatives.
            const double right = (-3.0 * f0 + 4.0 * state.objective_after(node, h) - state.objective_after(node, 2 * h)) / (2.0 * h);
            const double left = (3.0 * f0 - 4.0 * state.objective_after(node, -h) + state.objective_after(node, -2 * h)) / (2.0 * h);
            if (g == 0.0) {
                // Zero is a subgradient: the objective rises in both directions.
                if (right < -kFdRelTol || left > kFdRelTol) ++kink_violations;
                continue;
            }
            // A non-zero soft-thresholded gradient is the derivative along the descent side.
            const double fd = g < 0.0 ? right : left;
            worst = std::max(worst, std::abs(g - fd) / std::max({std::abs(g), std::abs(fd), kFdFloor}));
            ++checked;
        }

        // Training runs on the same instance feed the trace check.
        (void)seql::train(corpus, params, [&](const seql::IterationRecord& r, const seql::LossState&) {
            if (r.objective_after > r.objective_before) ++g_trace_violations;
        });
        ++g_trace_runs;
    }
    return {worst < kFdRelTol && kink_violations == 0 && g_trace_violations == 0,
            fmt("100 instances, %zu gradients, max relative error %.2e (limit %.0e), %zu kink violations; %zu training runs, "
                "%zu objective increases",
                checked, worst, kFdRelTol, kink_violations, g_trace_runs, g_trace_violations)};
}

// 6. More representations do not hurt: step divisor 1 vs 0.25.

Outcome tradeoff() {
    const auto suite = available_suite();
    double sum1 = 0.0;
    double sum4 = 0.0;
    std::string per;
    bool baselines_ok = true;
    std::size_t missing_baselines = 0;
    for (const auto& name : suite) {
        const auto* a = run(name, Mode::MtSaxSeqlLr, 1.0);
        const auto* b = run(name, Mode::MtSaxSeqlLr, 0.25);
        sum1 += a->error;
        sum4 += b->error;
        per += fmt(" %s %.4f/%.4f", name.c_str(), a->error, b->error);
        const auto* base = std::find_if(std::begin(kBaselines), std::end(kBaselines),
                                        [&](const Baseline& x) { return name == x.dataset; });
        if (base == std::end(kBaselines) || base->divisor_1 < 0) {
            ++missing_baselines;
            baselines_ok = false;
            continue;
        }
        if (std::abs(a->error - base->divisor_1) > kBaselineTol || std::abs(b->error - base->divisor_quarter) > kBaselineTol) {
            baselines_ok = false;
            per += "(baseline drift)";
        }
    }
    const auto n = static_cast<double>(suite.size());
    const double avg1 = sum1 / n;
    const double avg4 = sum4 / n;
    return {suite.size() >= 5 && avg1 <= avg4 && baselines_ok,
            fmt("%zu datasets, average error divisor 1 = %.4f, divisor 0.25 = %.4f;%s; %zu without baseline", suite.size(),
                avg1, avg4, per.c_str(), missing_baselines)};
}

// 7. Desk-scale sanity against 1NN-ED.

Outcome desk_scale() {
    bool pass = true;
    std::string detail;
    for (const std::string name : {"GunPoint", "Coffee"}) {
        const auto split = load_split(name);
        if (!split) {
            pass = false;
            detail += " " + name + " split not found under the data directory;";
            continue;
        }
        const auto* r = run(name, Mode::MtSaxSeqlLr, 1.0);
        const double nn = oracle::one_nn_error(split->train.series(), split->test.series());
        const bool ok = r->error <= nn && r->seconds < kDeskSeconds;
        pass &= ok;
        detail += fmt(" %s error %.4f vs 1NN-ED %.4f, %.1f s (limit %.0f s);", name.c_str(), r->error, nn, r->seconds,
                      kDeskSeconds);
    }
    return {pass, detail};
}

// 8. Training time scaling over L in {128, 256, 512}.

Outcome scaling() {
    RunConfig cfg;
    cfg.mode = Mode::MtSaxSeql;
    std::vector<double> times;
    const std::vector<std::size_t> lengths{128, 256, 512};
    for (auto L : lengths) {
        synth::Rng rng(1008);
        const auto ds = synth::cbf_dataset(rng, {1, 2}, 10, L);
        // Best of three damps scheduler noise.
        double best = std::numeric_limits<double>::infinity();
        for (int rep = 0; rep < 3; ++rep) {
            const auto start = Clock::now();
            (void)Classifier::train(ds, cfg);
            best = std::min(best, seconds_since(start));
        }
        times.push_back(best);
    }
    bool pass = true;
    std::string detail = fmt("train seconds L=128 %.3f, 256 %.3f, 512 %.3f;", times[0], times[1], times[2]);
    for (std::size_t i = 1; i < lengths.size(); ++i) {
        const double L = static_cast<double>(lengths[i - 1]);
        const double bound = std::pow(2.0, 1.5) * (std::log(2.0 * L) / std::log(L)) * kScalingSlack;
        const double ratio = times[i] / times[i - 1];
        pass &= ratio <= bound;
        detail += fmt(" ratio %zu->%zu %.2f (bound %.2f);", lengths[i - 1], lengths[i], ratio, bound);
    }
    return {pass, detail};
}

// 9. Interpretation conservation and faithful shares.

bool oracle_matches(const std::vector<double>& x, const ExplainFeature& f) {
    const auto words = oracle::sax(x, f.config.window, f.config.word_length, f.config.alphabet, false);
    std::string needle;
    for (auto t : f.tokens) needle.push_back(static_cast<char>('a' + t));
    return std::any_of(words.begin(), words.end(), [&](const std::string& w) { return w.find(needle) != std::string::npos; });
}

Outcome interpretation() {
    const auto split = load_split("GunPoint");
    if (!split) return {false, "GunPoint split not found"};
    const auto* r = run("GunPoint", Mode::MtSaxSeqlLr, 1.0);
    const auto& model = *r->model;
    const auto features = model.decision_features(model.views().front().positive_class);
    double worst = 0.0;
    std::size_t share_mismatches = 0;
    std::size_t locations = 0;
    for (const auto& series : split->test.series()) {
        double expected = 0.0;
        for (const auto& f : features) {
            if (oracle_matches(series.values, f)) expected += f.coefficient;
        }
        for (bool single : {false, true}) {
            const auto mts = explain(features, series, {single});
            double total = 0.0;
            for (double w : mts.weights) total += w;
            worst = std::max(worst, std::abs(total - expected));
        }
    }
    // Per feature, single-index mode puts coefficient / |locations| on each location.
    const auto& series = split->test[0];
    for (const auto& f : features) {
        const auto matches = feature_matches(series.values, f);
        const auto mts = explain(std::vector<ExplainFeature>{f}, series, {true});
        std::vector<double> want(series.values.size(), 0.0);
        if (!matches.empty()) {
            const double share = f.coefficient / static_cast<double>(matches.size());
            for (const auto& m : matches) want[match_span(f.config, m, f.tokens.size(), want.size()).first] += share;
        }
        locations += matches.size();
        if (mts.weights != want) ++share_mismatches;
    }
    return {worst <= kConservationTol && share_mismatches == 0 && locations > 0,
            fmt("%zu features over %zu GunPoint test series, max |sum weights - sum matched coefficients| %.2e (limit %.0e); "
                "single-index shares: %zu locations, %zu features differ",
                features.size(), split->test.size(), worst, kConservationTol, locations, share_mismatches)};
}

// 10. mtSS-SEQL+LR against single SAX-SEQL.

Outcome cross_mode() {
    const auto suite = available_suite();
    double ss = 0.0;
    double sax = 0.0;
    std::string per;
    for (const auto& name : suite) {
        const auto* a = run(name, Mode::MtSsSeqlLr);
        const auto* b = run(name, Mode::SaxSeql);
        ss += a->error;
        sax += b->error;
        per += fmt(" %s %.4f/%.4f", name.c_str(), a->error, b->error);
    }
    const auto n = static_cast<double>(suite.size());
    return {suite.size() >= 5 && ss / n <= sax / n,
            fmt("%zu datasets, average error mtss-seql+lr = %.4f, sax-seql = %.4f;%s", suite.size(), ss / n, sax / n,
                per.c_str())};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"SAX matches the reference transform", sax_oracle},
        {"Gaussian breakpoints", breakpoints},
        {"SFA equi-depth bins and DFT", sfa_checks},
        {"SEQL pruning soundness", seql_soundness},
        {"gradient vs finite differences", gradient_checks},
        {"multi-resolution trade-off", tradeoff},
        {"desk-scale sanity vs 1NN-ED", desk_scale},
        {"training time scaling", scaling},
        {"interpretation conservation", interpretation},
        {"mtSS-SEQL+LR vs SAX-SEQL", cross_mode},
    };
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!selected.empty() && !selected.contains(id)) continue;
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("%s %2d %s:%s%s\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first,
                    o.detail.empty() || o.detail.front() == ' ' ? "" : " ", o.detail.c_str());
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
