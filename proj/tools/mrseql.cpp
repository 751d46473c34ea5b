// mrseql: command-line front end for the multi-resolution symbolic classifier.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mrseql/bench.hpp"
#include "mrseql/classifier.hpp"
#include "mrseql/error.hpp"
#include "mrseql/interpret.hpp"
#include "mrseql/parallel.hpp"

namespace {

using namespace mrseql;

struct Flags {
    std::string mode = "mtss-seql+lr";
    int minl = 20;
    double step_divisor = 1.0;
    int alpha = 4;
    int sax_w = 16;
    int sfa_w = 8;
    double C = 1.0;
    double gamma = 0.2;
    double lambda = 1.0;
    int max_iters = 500;
    std::size_t threads = 0;
    bool no_numerosity_reduction = false;
    bool faithful = false;
};

void add_model_flags(CLI::App* cmd, Flags& f, bool with_mode) {
    if (with_mode) cmd->add_option("--mode", f.mode, "sax-seql, sfa-seql, mtsax-seql, mtsfa-seql, mtss-seql, or +lr on a multi mode")->capture_default_str();
    cmd->add_option("--minl", f.minl, "smallest window length")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--step-divisor", f.step_divisor, "window step is round(sqrt(L) / divisor)")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--alpha", f.alpha, "alphabet size")->capture_default_str()->check(CLI::Range(2, 26));
    cmd->add_option("--sax-w", f.sax_w, "SAX word length")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--sfa-w", f.sfa_w, "SFA word length")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--C", f.C, "regularization weight of the sequence learner")->capture_default_str()->check(CLI::NonNegativeNumber);
    cmd->add_option("--gamma", f.gamma, "L1 share of the elastic net")->capture_default_str()->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--lambda", f.lambda, "L2 weight of the logistic regression")->capture_default_str()->check(CLI::NonNegativeNumber);
    cmd->add_option("--max-iters", f.max_iters, "sequence learner iterations")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--threads", f.threads, "worker threads, 0 = all cores (MRSEQL_THREADS overrides)")->capture_default_str();
    cmd->add_flag("--no-numerosity-reduction", f.no_numerosity_reduction, "keep repeated consecutive words");
}

RunConfig run_config(const Flags& f) {
    RunConfig cfg;
    cfg.mode = parse_mode(f.mode);
    cfg.schedule.min_window = f.minl;
    cfg.schedule.step_divisor = f.step_divisor;
    cfg.schedule.alphabet = f.alpha;
    cfg.schedule.sax_word_length = f.sax_w;
    cfg.schedule.sfa_word_length = f.sfa_w;
    cfg.seql.C = f.C;
    cfg.seql.gamma = f.gamma;
    cfg.seql.max_iters = f.max_iters;
    cfg.lambda = f.lambda;
    cfg.transform.numerosity_reduction = !f.no_numerosity_reduction;
    cfg.threads = resolve_threads(f.threads);
    return cfg;
}

void print_timing(const Timing& t) {
    std::printf("Transform: %.3f s\nLearn: %.3f s\n", t.transform, t.learn + t.logreg);
    if (t.logreg > 0.0) std::printf("  (logistic regression: %.3f s)\n", t.logreg);
    std::printf("Test: %.3f s\n", t.test);
}

int cmd_transform(const std::string& input, const std::string& out_dir, const Flags& f) {
    const auto ds = load_ucr(input);
    const auto cfg = run_config(f);
    const auto prepared = prepare(ds, mode_schedule(cfg, ds.length()), cfg.transform, cfg.threads);
    std::filesystem::create_directories(out_dir);
    for (const auto& p : prepared) {
        const auto path = std::filesystem::path(out_dir) / (describe(p.rep.config) + ".txt");
        std::ofstream out(path);
        if (!out) throw IoError("cannot write " + path.string());
        for (std::size_t i = 0; i < ds.size(); ++i) write_corpus_line(out, p.sequences[i], ds[i].label);
        std::cout << path.string() << '\n';
    }
    return 0;
}

int cmd_train(const std::string& train_path, const std::string& model_path, const std::string& test_path, const Flags& f) {
    const auto train = load_ucr(train_path);
    Timing timing;
    const auto model = Classifier::train(train, run_config(f), &timing);
    model.save(std::filesystem::path(model_path));
    if (!test_path.empty()) {
        const auto test = load_ucr(test_path);
        const auto predictions = model.predict(test, &timing);
        std::printf("error rate %.6f\n", error_rate(test, predictions));
    }
    print_timing(timing);
    return 0;
}

int cmd_predict(const std::string& model_path, const std::string& test_path) {
    const auto model = Classifier::load(std::filesystem::path(model_path));
    const auto test = load_ucr(test_path);
    const auto predictions = model.predict(test);
    for (std::size_t i = 0; i < test.size(); ++i) {
        std::printf("%zu %d %d %.6f\n", i, test[i].label, predictions[i].label, predictions[i].score);
    }
    std::printf("error rate %.6f\n", error_rate(test, predictions));
    return 0;
}

int cmd_explain(const std::string& model_path, const std::string& test_path, std::size_t index, const std::string& out_path,
                double tau, bool faithful) {
    const auto model = Classifier::load(std::filesystem::path(model_path));
    if (!model.sax_only()) throw InvalidArgument("explain supports SAX-only models; this model contains SFA representations");
    const auto test = load_ucr(test_path);
    if (index >= test.size()) throw InvalidArgument("index " + std::to_string(index) + " out of range");
    const auto& series = test[index];
    const auto predicted = model.predict(series);
    // Binary models have one view whose weights already point at either class.
    const int view_class = model.views().size() == 1 ? model.views().front().positive_class : predicted.label;
    const auto features = model.decision_features(view_class);
    auto mts = explain(features, series, {faithful});
    mts.model_id = std::string(to_string(model.mode())) + "/class" + std::to_string(view_class);
    mts.series_id = index;
    const auto regions = highlights(mts, tau);
    export_explanation(series, mts, regions, out_path);
    std::printf("series %zu true %d predicted %d score %.6f\n", index, series.label, predicted.label, predicted.score);
    for (std::size_t r = 0; r < regions.size(); ++r) {
        std::printf("region %zu [%zu, %zu) intensity %.6f\n", r, regions[r].start, regions[r].end, regions[r].intensity);
    }
    return 0;
}

int cmd_benchmark(const std::string& dir, const std::vector<std::string>& modes, const std::string& report_path,
                  const Flags& f) {
    BenchOptions options;
    options.config = run_config(f);
    options.threads = options.config.threads;
    for (const auto& m : modes) options.modes.push_back(parse_mode(m));
    const auto report = run_benchmark(dir, options, &std::cerr);
    std::ofstream out(report_path);
    if (!out) throw IoError("cannot write " + report_path);
    write_report(out, report);
    write_report(std::cout, report);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-resolution symbolic sequence learner for time series classification"};
    app.require_subcommand(1);
    Flags flags;

    std::string input, out_dir;
    auto* transform = app.add_subcommand("transform", "write the symbolic corpus of every representation");
    transform->add_option("input", input, "UCR-format file")->required()->check(CLI::ExistingFile);
    transform->add_option("out", out_dir, "output directory")->required();
    add_model_flags(transform, flags, true);

    std::string train_path, model_path, test_path;
    auto* train = app.add_subcommand("train", "train a model and save it");
    train->add_option("train", train_path, "UCR-format training file")->required()->check(CLI::ExistingFile);
    train->add_option("model", model_path, "model output path")->required();
    train->add_option("--test", test_path, "also report the error rate on this file")->check(CLI::ExistingFile);
    add_model_flags(train, flags, true);

    auto* predict = app.add_subcommand("predict", "classify a test file");
    predict->add_option("model", model_path, "model file")->required()->check(CLI::ExistingFile);
    predict->add_option("test", test_path, "UCR-format test file")->required()->check(CLI::ExistingFile);

    std::size_t index = 0;
    std::string csv_path;
    double tau = 0.5;
    auto* explain_cmd = app.add_subcommand("explain", "per-time-step weights of one test series");
    explain_cmd->add_option("model", model_path, "model file")->required()->check(CLI::ExistingFile);
    explain_cmd->add_option("test", test_path, "UCR-format test file")->required()->check(CLI::ExistingFile);
    explain_cmd->add_option("index", index, "series index in the test file")->required();
    explain_cmd->add_option("out", csv_path, "CSV output path")->required();
    explain_cmd->add_option("--tau", tau, "highlight threshold relative to the largest weight")->capture_default_str()->check(CLI::Range(0.0, 1.0));
    explain_cmd->add_flag("--faithful-alg7", flags.faithful, "place each match's share on a single index");

    std::string bench_dir, report_path;
    std::vector<std::string> modes{"sax-seql", "mtss-seql+lr"};
    auto* bench = app.add_subcommand("benchmark", "evaluate modes over a directory of UCR datasets");
    bench->add_option("dir", bench_dir, "directory with <name>_TRAIN/<name>_TEST pairs")->required()->check(CLI::ExistingDirectory);
    bench->add_option("report", report_path, "CSV report path")->required();
    bench->add_option("--modes", modes, "modes to compare")->delimiter(',')->capture_default_str();
    add_model_flags(bench, flags, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*transform) return cmd_transform(input, out_dir, flags);
        if (*train) return cmd_train(train_path, model_path, test_path, flags);
        if (*predict) return cmd_predict(model_path, test_path);
        if (*explain_cmd) return cmd_explain(model_path, test_path, index, csv_path, tau, flags.faithful);
        if (*bench) return cmd_benchmark(bench_dir, modes, report_path, flags);
    } catch (const mrseql::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
