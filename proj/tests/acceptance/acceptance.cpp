// Acceptance runner: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails. Tolerances and thresholds are fixed here.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "mmsarc/annotate.hpp"
#include "mmsarc/cli.hpp"
#include "mmsarc/corpus.hpp"
#include "mmsarc/error.hpp"
#include "mmsarc/fusionnet.hpp"
#include "mmsarc/hash.hpp"
#include "mmsarc/random.hpp"
#include "mmsarc/svm.hpp"
#include "netcheck.hpp"
#include "oracles.hpp"
#include "support.hpp"

namespace {

namespace fs = std::filesystem;
using namespace mmsarc;

constexpr double kSvmRelTol = 1e-3;
constexpr double kSvmOneDimTol = 1e-3;
constexpr double kSvmSeconds = 10.0;
constexpr double kGradRelTol = 1e-4;
constexpr double kForwardTol = 1e-12;
constexpr double kNetSeconds = 30.0;
constexpr double kFusionMargin = 0.05;
constexpr double kSvmFusionFloor = 0.95;
constexpr double kPipelineSeconds = 300.0;
constexpr double kKappaTol = 1e-9;

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void report(int number, const std::string& title, const std::function<Outcome()>& check) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = check();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failures;
    std::printf("criterion %d: %s  %s (%s; %.2fs)\n", number, o.pass ? "PASS" : "FAIL", title.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
}

double elapsed(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

FeatureVector dense(std::vector<double> v) {
    FeatureVector fv;
    fv.add_dense("x", std::move(v));
    return fv;
}

Outcome svm_solver() {
    const auto start = std::chrono::steady_clock::now();
    Rng rng(20240);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + rng.below(19), d = 1 + rng.below(5);
        std::vector<std::vector<double>> X;
        std::vector<int> y;
        std::vector<FeatureVector> fv;
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<double> x(d);
            for (auto& v : x) v = rng.normal();
            const int label = i == 0 ? 1 : i == 1 ? -1 : (rng.bernoulli(0.5) ? 1 : -1);
            x[0] += 0.5 * label;
            X.push_back(x);
            y.push_back(label);
            fv.push_back(dense(x));
        }
        svm::TrainConfig cfg;
        cfg.C = std::exp(rng.uniform(std::log(0.1), std::log(10.0)));
        cfg.tol = 1e-6;
        cfg.max_epochs = 100000;
        const auto m = svm::train(fv, y, cfg);
        const auto ref = oracle::svm_reference(X, y, cfg.C);
        const double ours = oracle::svm_primal(X, y, m.w, m.b, cfg.C);
        worst = std::max(worst, (ours - ref.primal) / std::abs(ref.primal));
    }
    const std::vector<FeatureVector> X1 = {dense({1.0}), dense({-1.0})};
    const auto m1 = svm::train(X1, std::vector<int>{1, -1}, svm::TrainConfig{});
    const double w_err = std::abs(m1.w[0] - 1.0);
    const double secs = elapsed(start);
    return {worst <= kSvmRelTol && w_err <= kSvmOneDimTol && secs < kSvmSeconds,
            "worst primal excess " + fmt("%.2e", worst) + " (tol 1e-3), 1-D |w-1| " + fmt("%.2e", w_err) +
                ", " + fmt("%.2f", secs) + "s < 10s"};
}

Outcome net_checks() {
    using fusionnet::Mode;
    const auto start = std::chrono::steady_clock::now();
    const Mode modes[] = {Mode::TextOnly, Mode::ImageOnly, Mode::Fusion};
    Rng rng(777);
    double worst_grad = 0.0, worst_fwd = 0.0;
    int nets = 0;
    while (nets < 20) {
        const auto r = oracle::random_net(rng, modes[nets % 3]);
        if (!oracle::away_from_kinks(r)) continue;
        worst_grad = std::max(worst_grad, oracle::grad_check(r).max_rel_error);
        worst_fwd = std::max(worst_fwd, oracle::forward_error(r));
        ++nets;
    }
    const double secs = elapsed(start);
    return {worst_grad <= kGradRelTol && worst_fwd <= kForwardTol && secs < kNetSeconds,
            "20 nets, worst gradient rel err " + fmt("%.2e", worst_grad) + " (tol 1e-4), worst forward err " +
                fmt("%.2e", worst_fwd) + " (tol 1e-12), " + fmt("%.2f", secs) + "s < 30s"};
}

struct CliRun {
    int code;
    std::string err;
};

CliRun cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::dispatch(args, out, err);
    return {code, err.str()};
}

void require(const CliRun& r, const std::string& what) {
    if (r.code != 0) throw std::runtime_error(what + " failed: " + r.err);
}

double kv_value(const fs::path& file, const std::string& key) {
    const auto text = testing_support::read_file(file);
    const auto pos = text.find(key + " = ");
    if (pos == std::string::npos) throw std::runtime_error("missing " + key + " in " + file.string());
    return std::stod(text.substr(pos + key.size() + 3));
}

// synth -> train -> evaluate for both methods at default sizes.
void pipeline(const fs::path& base) {
    const auto data = base / "data";
    require(cli({"synth", "--n", "2000", "--q", "0.5", "--seed", "7", "--out", data.string()}), "synth");
    const auto cfg = (data / "config.json").string();
    require(cli({"train-svm", "--config", cfg, "--feature-sets", "ngrams,ngrams+vsf", "--out",
                 (base / "svm-models").string()}),
            "train-svm");
    require(cli({"train-net", "--config", cfg, "--feature-sets", "unigram,unigram+avr", "--out",
                 (base / "net-models").string()}),
            "train-net");
    require(cli({"evaluate", "--config", cfg, "--method", "svm", "--feature-sets", "ngrams,ngrams+vsf", "--models",
                 (base / "svm-models" / "models").string(), "--out", (base / "eval-svm").string()}),
            "evaluate svm");
    require(cli({"evaluate", "--config", cfg, "--method", "deep", "--feature-sets", "unigram,unigram+avr", "--models",
                 (base / "net-models" / "models").string(), "--out", (base / "eval-deep").string()}),
            "evaluate deep");
}

Outcome fusion_claim(const fs::path& base) {
    const auto start = std::chrono::steady_clock::now();
    pipeline(base);
    const double secs = elapsed(start);
    const double svm_text = kv_value(base / "eval-svm" / "report.kv", "accuracy.ngrams.IG.silver");
    const double svm_fused = kv_value(base / "eval-svm" / "report.kv", "accuracy.ngrams+vsf.IG.silver");
    const double net_text = kv_value(base / "eval-deep" / "report.kv", "accuracy.unigram.IG.silver");
    const double net_fused = kv_value(base / "eval-deep" / "report.kv", "accuracy.unigram+avr.IG.silver");
    const bool pass = svm_fused - svm_text >= kFusionMargin && net_fused - net_text >= kFusionMargin &&
                      svm_fused >= kSvmFusionFloor && secs < kPipelineSeconds;
    return {pass, "svm text " + fmt("%.4f", svm_text) + " fusion " + fmt("%.4f", svm_fused) + ", deep text " +
                      fmt("%.4f", net_text) + " fusion " + fmt("%.4f", net_fused) +
                      "; margin >= 0.05, svm fusion >= 0.95, pipeline " + fmt("%.1f", secs) + "s < 300s"};
}

Outcome agreement() {
    using namespace annotate;
    const auto unanimous = load_judgments(testing_support::data_path("fixtures/judgments/unanimous.jsonl"));
    const auto split = load_judgments(testing_support::data_path("fixtures/judgments/split_2_2.jsonl"));
    const double k1 = fleiss_kappa(unanimous);
    const double k2 = fleiss_kappa(split);

    const std::vector<JudgmentSet> m60 = {{"a", Task::TextOnlyTask, {Vote::Yes, Vote::Yes, Vote::Yes, Vote::No, Vote::No}}};
    const std::vector<JudgmentSet> m80 = {m60[0], {"b", Task::TextOnlyTask, std::vector<Vote>(5, Vote::No)}};
    const auto mixed = load_judgments(testing_support::data_path("fixtures/judgments/mixed.jsonl"));
    std::vector<JudgmentSet> text;
    for (const auto& j : mixed) {
        if (j.task == Task::TextOnlyTask) text.push_back(j);
    }
    const bool matching_ok = matching_percent(unanimous) == 100.0 && matching_percent(m60) == 60.0 &&
                             matching_percent(m80) == 80.0 &&
                             std::abs(matching_percent(text) - 440.0 / 6.0) < 1e-12;

    Rng rng(55);
    int monotone = 0;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<AnnotatedPost> posts;
        const std::size_t n = 10 + rng.below(40);
        for (std::size_t i = 0; i < n; ++i) {
            const std::string id = "p" + std::to_string(i);
            std::vector<Vote> t1(5), t2(5);
            for (auto& v : t1) v = kAllVotes[rng.below(3)];
            for (auto& v : t2) v = rng.bernoulli(0.7) ? Vote::Yes : kAllVotes[rng.below(3)];
            AnnotatedPost p{id, {id, Task::TextOnlyTask, t1}, std::nullopt};
            if (majority(p.task1) == Majority::No) p.task2 = JudgmentSet{id, Task::TextImageTask, t2};
            posts.push_back(p);
        }
        std::vector<std::string> pool;
        for (int i = 0; i < 60; ++i) pool.push_back("neg" + std::to_string(i));
        auto pos = [&](double t) {
            auto v = build_gold(posts, pool, t, 3).positives;
            std::sort(v.begin(), v.end());
            return v;
        };
        const auto d50 = pos(0.5), d80 = pos(0.8), d100 = pos(1.0);
        monotone += std::includes(d80.begin(), d80.end(), d100.begin(), d100.end()) &&
                    std::includes(d50.begin(), d50.end(), d80.begin(), d80.end());
    }
    const bool pass = k1 == 1.0 && std::abs(k2 + 1.0 / 3.0) <= kKappaTol && matching_ok && monotone == 100;
    return {pass, "kappa unanimous " + fmt("%.17g", k1) + ", kappa 2/2 split " + fmt("%.17g", k2) + ", matching " +
                      (matching_ok ? "exact" : "MISMATCH") + ", gold monotone " + std::to_string(monotone) + "/100"};
}

Outcome filtering() {
    using namespace corpus;
    const auto posts = load_corpus(testing_support::data_path("fixtures/filter/posts.jsonl"));
    std::unordered_set<std::string> images;
    std::istringstream concepts(testing_support::read_file(testing_support::data_path("fixtures/filter/concepts.txt")));
    for (std::string line; std::getline(concepts, line);) images.insert(line.substr(0, line.find(' ')));
    std::map<std::string, std::string> expected;
    std::istringstream exp(testing_support::read_file(testing_support::data_path("fixtures/filter/expected.tsv")));
    for (std::string line; std::getline(exp, line);) {
        if (line.empty() || line[0] == '#') continue;
        const auto tab = line.find('\t');
        expected[line.substr(0, tab)] = line.substr(tab + 1);
    }
    std::size_t match = 0;
    std::string first_miss;
    for (const auto& p : posts) {
        const auto r = filter_post(p, FilterConfig{}, EmojiTable::builtin(), &images);
        const std::string verdict = r ? std::string(to_string(*r)) : "keep";
        if (verdict == expected.at(p.id)) ++match;
        else if (first_miss.empty()) first_miss = p.id + " got " + verdict;
    }
    return {posts.size() == 25 && match == 25,
            std::to_string(match) + "/" + std::to_string(posts.size()) + " verdicts match" +
                (first_miss.empty() ? "" : ", first miss " + first_miss)};
}

Outcome topology() {
    const fusionnet::NetDims d{1000};
    const auto net = fusionnet::FusionNet::init(d, fusionnet::Mode::Fusion, 1);
    const bool pass = net.b_text().size() == 512 && d.image_dim == 4096 && d.concat_dim() == 4608 &&
                      net.b_out().size() == 2 && net.w_out().size() == 2 * 4608;
    return {pass, "hidden " + std::to_string(net.b_text().size()) + ", image " + std::to_string(d.image_dim) +
                      ", concat " + std::to_string(d.concat_dim()) + ", output " + std::to_string(net.b_out().size())};
}

std::map<std::string, std::string> tree_hashes(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = sha256_file(e.path().string());
    }
    return out;
}

Outcome determinism(const fs::path& first, const fs::path& second) {
    pipeline(second);
    const auto a = tree_hashes(first), b = tree_hashes(second);
    std::size_t differing = 0;
    for (const auto& [name, h] : a) {
        auto it = b.find(name);
        if (it == b.end() || it->second != h) ++differing;
    }
    return {a == b && !a.empty(),
            std::to_string(a.size()) + " artifacts hashed per run, " + std::to_string(differing) + " differ"};
}

}  // namespace

int main() {
    testing_support::TempDir work("acceptance");
    const auto run1 = work.path() / "run1", run2 = work.path() / "run2";
    report(2, "SVM solver agrees with reference oracle", svm_solver);
    report(3, "fusion network gradients and forward pass", net_checks);
    report(4, "fusion beats text-only on the incongruity corpus", [&] { return fusion_claim(run1); });
    report(5, "agreement analytics and gold-set monotonicity", agreement);
    report(6, "25-post filtering fixture", filtering);
    report(7, "network topology at default sizes", topology);
    report(8, "train/evaluate outputs are bit-reproducible", [&] { return determinism(run1, run2); });
    std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
    return failures ? 1 : 0;
}
