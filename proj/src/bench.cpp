#include "mrseql/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <map>
#include <numeric>
#include <ostream>

#include "mrseql/error.hpp"
#include "mrseql/parallel.hpp"
#include "mrseql/textio.hpp"

namespace mrseql {

namespace fs = std::filesystem;

namespace {

constexpr std::array<std::string_view, 4> kSuffixes{"", ".txt", ".tsv", ".csv"};

// "Foo_TRAIN.tsv" -> "Foo"
std::optional<std::string> train_stem(const fs::path& p) {
    const std::string name = p.filename().string();
    for (auto suffix : kSuffixes) {
        const std::string tail = "_TRAIN" + std::string(suffix);
        if (name.size() > tail.size() && name.compare(name.size() - tail.size(), tail.size(), tail) == 0) {
            return name.substr(0, name.size() - tail.size());
        }
    }
    return std::nullopt;
}

std::optional<fs::path> find_test(const fs::path& folder, const std::string& name) {
    for (auto suffix : kSuffixes) {
        auto p = folder / (name + "_TEST" + std::string(suffix));
        if (fs::is_regular_file(p)) return p;
    }
    return std::nullopt;
}

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

void collect(const fs::path& folder, std::map<std::string, DatasetPair>& found, std::vector<BenchSkip>& skipped) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(folder)) {
        if (e.is_regular_file()) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
        auto name = train_stem(f);
        if (!name || found.contains(*name)) continue;
        if (auto test = find_test(folder, *name)) {
            found[*name] = {*name, f, *test};
        } else {
            skipped.push_back({*name, "missing TEST file"});
        }
    }
}

}  // namespace

std::vector<DatasetPair> discover_datasets(const fs::path& dir, std::vector<BenchSkip>& skipped) {
    if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
    std::map<std::string, DatasetPair> found;
    collect(dir, found, skipped);
    std::vector<fs::path> subdirs;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.is_directory()) subdirs.push_back(e.path());
    }
    std::sort(subdirs.begin(), subdirs.end());
    for (const auto& d : subdirs) collect(d, found, skipped);
    std::sort(skipped.begin(), skipped.end(), [](const BenchSkip& a, const BenchSkip& b) { return a.dataset < b.dataset; });

    std::vector<DatasetPair> out;
    for (auto& [_, p] : found) out.push_back(std::move(p));
    return out;
}

std::vector<double> fractional_ranks(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
        const double r = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

std::vector<std::pair<int, double>> class_errors(const TimeSeriesDataset& test, std::span<const ClassPrediction> predictions) {
    if (predictions.size() != test.size()) throw InvalidArgument("prediction count does not match test set");
    std::map<int, std::pair<std::size_t, std::size_t>> tally;  // class -> (wrong, total)
    for (std::size_t i = 0; i < test.size(); ++i) {
        auto& t = tally[test[i].label];
        t.second += 1;
        if (predictions[i].label != test[i].label) t.first += 1;
    }
    std::vector<std::pair<int, double>> out;
    for (const auto& [c, t] : tally) out.emplace_back(c, static_cast<double>(t.first) / static_cast<double>(t.second));
    return out;
}

void summarize(BenchReport& report) {
    std::vector<Mode> modes;
    std::map<std::string, std::vector<std::size_t>> by_dataset;
    for (std::size_t i = 0; i < report.entries.size(); ++i) {
        const auto& e = report.entries[i];
        if (std::find(modes.begin(), modes.end(), e.mode) == modes.end()) modes.push_back(e.mode);
        by_dataset[e.dataset].push_back(i);
    }
    for (auto& [_, idx] : by_dataset) {
        std::vector<double> errors;
        for (auto i : idx) errors.push_back(report.entries[i].error);
        const auto ranks = fractional_ranks(errors);
        for (std::size_t k = 0; k < idx.size(); ++k) report.entries[idx[k]].rank = ranks[k];
    }

    report.summary.clear();
    for (Mode m : modes) {
        ModeSummary s;
        s.mode = m;
        std::size_t n = 0;
        for (const auto& [_, idx] : by_dataset) {
            double best = 1.0;
            for (auto i : idx) best = std::min(best, report.entries[i].error);
            for (auto i : idx) {
                const auto& e = report.entries[i];
                if (e.mode != m) continue;
                ++n;
                s.average_error += e.error;
                s.mpce += e.error / static_cast<double>(e.classes);
                s.average_rank += e.rank;
                if (e.error == best) ++s.wins;
            }
        }
        if (n > 0) {
            s.average_error /= static_cast<double>(n);
            s.mpce /= static_cast<double>(n);
            s.average_rank /= static_cast<double>(n);
        }
        report.summary.push_back(s);
    }
}

BenchEntry run_one(const DatasetPair& pair, const RunConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    const auto train = load_ucr(pair.train);
    const auto test = load_ucr(pair.test);
    if (test.length() != train.length()) throw FormatError(pair.name + ": TRAIN and TEST lengths differ");

    BenchEntry e;
    e.dataset = pair.name;
    e.mode = cfg.mode;
    e.classes = train.class_ids().size();
    e.train_size = train.size();
    e.test_size = test.size();
    const auto model = Classifier::train(train, cfg, &e.timing);
    const auto predictions = model.predict(test, &e.timing);
    e.error = error_rate(test, predictions);
    e.class_errors = class_errors(test, predictions);
    e.total_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return e;
}

BenchReport run_benchmark(const fs::path& dir, const BenchOptions& options, std::ostream* log) {
    if (options.modes.empty()) throw InvalidArgument("benchmark needs at least one mode");
    BenchReport report;
    const auto pairs = discover_datasets(dir, report.skipped);
    if (log != nullptr) {
        for (const auto& s : report.skipped) *log << "warning: skipping " << s.dataset << ": " << s.reason << '\n';
    }

    const std::size_t jobs = pairs.size() * options.modes.size();
    std::vector<std::optional<BenchEntry>> results(jobs);
    std::vector<std::string> failures(jobs);
    parallel_for(jobs, options.threads, [&](std::size_t j) {
        auto cfg = options.config;
        cfg.mode = options.modes[j % options.modes.size()];
        cfg.threads = 1;
        try {
            results[j] = run_one(pairs[j / options.modes.size()], cfg);
        } catch (const Error& ex) {
            failures[j] = ex.what();
        }
    });

    for (std::size_t j = 0; j < jobs; ++j) {
        const auto& name = pairs[j / options.modes.size()].name;
        const auto mode = options.modes[j % options.modes.size()];
        if (results[j]) {
            report.entries.push_back(std::move(*results[j]));
            if (log != nullptr) {
                *log << name << ' ' << to_string(mode) << " error=" << fixed(report.entries.back().error, 6) << '\n';
            }
        } else {
            report.skipped.push_back({name + "/" + std::string(to_string(mode)), failures[j]});
            if (log != nullptr) *log << "warning: " << name << ' ' << to_string(mode) << " failed: " << failures[j] << '\n';
        }
    }
    summarize(report);
    return report;
}

void write_report(std::ostream& out, const BenchReport& report) {
    out << "dataset,mode,classes,train_size,test_size,error,per_class_error,rank,"
           "transform_s,learn_s,logreg_s,test_s,total_s\n";
    for (const auto& e : report.entries) {
        std::string per_class;
        for (const auto& [c, err] : e.class_errors) {
            if (!per_class.empty()) per_class += ';';
            per_class += std::to_string(c) + ':' + fixed(err, 6);
        }
        out << e.dataset << ',' << to_string(e.mode) << ',' << e.classes << ',' << e.train_size << ',' << e.test_size << ','
            << fixed(e.error, 6) << ',' << per_class << ',' << fixed(e.rank, 2) << ',' << fixed(e.timing.transform, 3) << ','
            << fixed(e.timing.learn, 3) << ',' << fixed(e.timing.logreg, 3) << ',' << fixed(e.timing.test, 3) << ','
            << fixed(e.total_seconds, 3) << '\n';
    }
    out << "\nmode,average_error,mpce,wins,average_rank\n";
    for (const auto& s : report.summary) {
        out << to_string(s.mode) << ',' << fixed(s.average_error, 6) << ',' << fixed(s.mpce, 6) << ',' << s.wins << ','
            << fixed(s.average_rank, 4) << '\n';
    }
    if (!report.skipped.empty()) {
        out << "\nskipped,reason\n";
        for (const auto& s : report.skipped) {
            std::string reason = s.reason;
            std::replace(reason.begin(), reason.end(), ',', ';');
            out << s.dataset << ',' << reason << '\n';
        }
    }
}

}  // namespace mrseql
