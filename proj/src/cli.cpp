#include "mmsarc/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_set>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mmsarc/annotate.hpp"
#include "mmsarc/config.hpp"
#include "mmsarc/error.hpp"
#include "mmsarc/eval.hpp"
#include "mmsarc/format.hpp"
#include "mmsarc/hash.hpp"
#include "mmsarc/random.hpp"
#include "mmsarc/synth.hpp"

namespace mmsarc::cli {

namespace {

namespace fs = std::filesystem;

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out = "mmsarc-out";
    std::optional<std::size_t> threads;
    std::string method;
    std::vector<std::string> feature_sets;
    std::string regime;
    std::string models;
    std::string feature_set;
    std::string platform;
    std::optional<std::size_t> n;
    std::optional<double> q;
    std::optional<std::size_t> avr_dim;
    std::optional<std::size_t> n_concepts;
};

// Collects the files a verb writes and ends with the manifest.
class Run {
public:
    Run(std::string verb, const Options& opt) : verb_(std::move(verb)), dir_(opt.out) {
        fs::create_directories(dir_);
    }

    const fs::path& dir() const { return dir_; }

    void write(const std::string& name, const std::string& content) {
        const fs::path p = dir_ / name;
        fs::create_directories(p.parent_path());
        std::ofstream out(p, std::ios::binary);
        out << content;
        if (!out) throw Error(ErrorKind::Io, "cannot write '" + p.string() + "'");
        record(name);
    }

    // For files written by a library routine.
    void record(const std::string& name) { outputs_.insert(name); }

    void finish(const config::RunConfig* cfg, std::uint64_t seed) {
        nlohmann::ordered_json m;
        m["verb"] = verb_;
        m["seed"] = seed;
        m["config_sha256"] = cfg ? sha256_hex(cfg->text) : "";
        nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
        if (cfg) {
            const fs::path base = cfg->source.empty() ? fs::path(".") : fs::path(cfg->source).parent_path();
            std::map<std::string, std::string> sorted;
            for (const auto& f : cfg->input_files()) {
                sorted[fs::path(f).lexically_relative(base.empty() ? fs::path(".") : base).generic_string()] =
                    sha256_file(f);
            }
            for (const auto& [k, v] : sorted) inputs[k] = v;
        }
        m["inputs"] = inputs;
        nlohmann::ordered_json outputs = nlohmann::ordered_json::object();
        for (const auto& name : outputs_) outputs[name] = sha256_file((dir_ / name).string());
        m["outputs"] = outputs;
        std::ofstream out(dir_ / "manifest.json");
        out << m.dump(2) << '\n';
        if (!out) throw Error(ErrorKind::Io, "cannot write manifest");
    }

private:
    std::string verb_;
    fs::path dir_;
    std::set<std::string> outputs_;
};

config::RunConfig load_config(const Options& opt) {
    if (opt.config.empty()) throw Error(ErrorKind::InvalidArgument, "--config is required");
    auto cfg = config::load(opt.config);
    if (opt.seed) {
        cfg.seed = *opt.seed;
        cfg.experiment.seed = *opt.seed;
    }
    if (opt.threads) cfg.experiment.threads = *opt.threads;
    if (!opt.regime.empty()) cfg.experiment.regime = eval::parse_regime(opt.regime);
    return cfg;
}

// Experiment settings for one method: explicit --feature-sets win, then the
// config's sets that belong to the method, then the method's defaults.
eval::ExperimentConfig experiment_for(const config::RunConfig& cfg, const Options& opt,
                                      std::optional<eval::Method> forced) {
    auto ex = cfg.experiment;
    if (forced) ex.method = *forced;
    else if (!opt.method.empty()) ex.method = eval::parse_method(opt.method);
    std::vector<eval::FeatureSet> sets;
    if (!opt.feature_sets.empty()) {
        for (const auto& s : opt.feature_sets) sets.push_back(eval::parse_feature_set(s));
    } else {
        for (auto f : cfg.experiment.feature_sets) {
            if (eval::method_of(f) == ex.method) sets.push_back(f);
        }
        if (sets.empty()) sets = config::default_feature_sets(ex.method);
    }
    ex.feature_sets = std::move(sets);
    ex.validate();
    return ex;
}

std::string fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

int cmd_synth(const Options& opt, std::ostream& out) {
    std::optional<config::RunConfig> cfg;
    synth::Params p;
    if (!opt.config.empty()) {
        cfg = config::load(opt.config);
        p = cfg->synth;
    }
    if (opt.seed) p.seed = *opt.seed;
    if (opt.n) p.n = *opt.n;
    if (opt.q) p.q = *opt.q;
    if (opt.avr_dim) p.avr_dim = *opt.avr_dim;
    if (opt.n_concepts) p.n_concepts = *opt.n_concepts;
    if (!opt.platform.empty()) p.platforms = {corpus::parse_platform(opt.platform)};

    Run run("synth", opt);
    const auto corpus = synth::generate(p);
    synth::write(corpus, run.dir().string());
    for (const auto& entry : fs::directory_iterator(run.dir())) {
        const auto name = entry.path().filename().string();
        if (entry.is_regular_file() && name != "manifest.json") run.record(name);
    }
    run.finish(cfg ? &*cfg : nullptr, p.seed);
    out << "wrote " << corpus.posts.size() << " posts, " << corpus.judgments.size() << " judgment sets to "
        << run.dir().string() << '\n';
    return 0;
}

int cmd_ingest(const Options& opt, std::ostream& out) {
    const auto cfg = load_config(opt);
    if (cfg.corpus.empty()) throw Error(ErrorKind::InvalidArgument, "config names no corpus");
    const auto emoji = config::emoji_table(cfg);
    const auto posts = corpus::load_corpus(cfg.corpus, emoji);

    std::optional<std::unordered_set<std::string>> available;
    if (!cfg.concepts.empty() || !cfg.avr.empty()) {
        visfeat::FeatureStore store(cfg.avr_dim);
        if (!cfg.concepts.empty()) store.load_concepts(cfg.concepts);
        if (!cfg.avr.empty()) store.load_avr(cfg.avr);
        const auto ids = store.image_ids();
        available.emplace(ids.begin(), ids.end());
    }

    constexpr corpus::RejectReason kReasons[] = {
        corpus::RejectReason::NoImage,       corpus::RejectReason::MissingImage,
        corpus::RejectReason::Mention,       corpus::RejectReason::ExternalLink,
        corpus::RejectReason::CollectionTagAsWord, corpus::RejectReason::CollectionTagInSentence,
        corpus::RejectReason::BannedTag,     corpus::RejectReason::TooFewWords};
    std::map<corpus::RejectReason, std::size_t> counts;
    std::ostringstream kept, rejects;
    std::size_t n_kept = 0;
    for (const auto& p : posts) {
        const auto reason = corpus::filter_post(p, cfg.filter, emoji, available ? &*available : nullptr);
        if (reason) {
            ++counts[*reason];
            rejects << p.id << '\t' << corpus::to_string(*reason) << '\n';
        } else {
            corpus::write_post(kept, corpus::strip_collection_artifacts(p, cfg.filter, emoji));
            ++n_kept;
        }
    }
    std::ostringstream hist;
    hist << "input " << posts.size() << '\n' << "kept " << n_kept << '\n';
    for (auto r : kReasons) hist << corpus::to_string(r) << ' ' << counts[r] << '\n';

    Run run("ingest", opt);
    run.write("filtered.jsonl", kept.str());
    run.write("rejects.tsv", rejects.str());
    run.write("reject_histogram.txt", hist.str());
    run.finish(&cfg, cfg.seed);
    out << hist.str();
    return 0;
}

int cmd_stats(const Options& opt, std::ostream& out) {
    const auto cfg = load_config(opt);
    if (cfg.corpus.empty()) throw Error(ErrorKind::InvalidArgument, "config names no corpus");
    const auto posts = corpus::load_corpus(cfg.corpus, config::emoji_table(cfg));
    std::map<corpus::Platform, std::vector<corpus::Post>> by_platform;
    for (const auto& p : posts) by_platform[p.platform].push_back(p);

    std::ostringstream table;
    char line[160];
    std::snprintf(line, sizeof line, "%-8s %8s %9s %10s %8s %8s %8s %8s\n", "platform", "posts", "avg_words",
                  "avg_emojis", "avg_tags", "%text", "%images", "%both");
    table << line;
    auto row = [&](const std::string& name, std::span<const corpus::Post> ps) {
        const auto s = corpus::corpus_stats(ps);
        std::snprintf(line, sizeof line, "%-8s %8zu %9.2f %10.2f %8.2f %8.2f %8.2f %8.2f\n", name.c_str(), s.n_posts,
                      s.avg_words, s.avg_emojis, s.avg_tags, s.pct_with_text, s.pct_with_images, s.pct_with_both);
        table << line;
    };
    for (const auto& [pl, ps] : by_platform) row(std::string(corpus::to_string(pl)), ps);
    row("all", posts);

    Run run("stats", opt);
    run.write("stats.txt", table.str());
    run.finish(&cfg, cfg.seed);
    out << table.str();
    return 0;
}

int cmd_featurize(const Options& opt, std::ostream& out) {
    const auto cfg = load_config(opt);
    const auto data = config::load_dataset(cfg);
    auto ex = cfg.experiment;
    const auto f = opt.feature_set.empty() ? ex.feature_sets.front() : eval::parse_feature_set(opt.feature_set);
    ex.method = eval::method_of(f);
    ex.feature_sets = {f};
    ex.validate();

    Run run("featurize", opt);
    std::size_t rows = 0;
    for (auto pl : eval::experiment_platforms(ex, data)) {
        const auto split = eval::make_cell_split(ex, data, pl);
        std::vector<corpus::Post> train_posts;
        for (auto i : split.train) train_posts.push_back(data.posts[i]);
        const bool svm_set = eval::method_of(f) == eval::Method::SvmFusion;
        const auto vocab = textfeat::NgramVocab::build(train_posts, ex.min_count, svm_set ? 2 : 1, "silver-train");
        eval::FeatureContext ctx{&data.resources, &data.concepts, &data.images, &vocab, ex.image_policy,
                                 ex.concept_threshold};

        auto features = [&](const corpus::Post& p) {
            if (svm_set) return eval::svm_features(f, p, ctx);
            FeatureVector fv;
            if (eval::uses_text(f)) fv.add_sparse("unigram", vocab.size(), textfeat::ngram_features(p, vocab));
            if (eval::uses_image(f)) {
                fv.add_dense("avr", visfeat::post_image_block(p, data.images, data.concepts, ex.image_policy,
                                                              ex.concept_threshold)
                                        .avr);
            }
            return fv;
        };

        std::ostringstream body;
        std::optional<std::vector<BlockLayout>> layout;
        auto emit = [&](std::size_t i, const char* side, int label) {
            const auto fv = features(data.posts[i]);
            if (!layout) layout = fv.layout();
            body << data.posts[i].id << ' ' << side << ' ' << (label > 0 ? "+1" : "-1");
            for (const auto& [idx, v] : fv.nonzeros()) body << ' ' << idx << ':' << shortest(v);
            body << '\n';
            ++rows;
        };
        for (auto i : split.train) emit(i, "train", eval::signed_label(data.posts[i]));
        for (std::size_t k = 0; k < split.test.size(); ++k) emit(split.test[k], "test", split.test_labels[k]);

        std::ostringstream header;
        header << "# feature_set " << eval::to_string(f) << " platform " << corpus::to_string(pl) << '\n';
        for (const auto& b : *layout) {
            header << "# block " << b.name << " offset " << b.offset << " dim " << b.dim << ' '
                   << (b.sparse ? "sparse" : "dense") << '\n';
        }
        const std::string stem = eval::cell_file_stem(f, pl);
        run.write("features." + stem + ".txt", header.str() + body.str());
        std::ostringstream v;
        vocab.save(v);
        run.write("vocab." + stem + ".txt", v.str());
    }
    run.finish(&cfg, cfg.seed);
    out << "wrote " << rows << " feature rows for " << eval::to_string(f) << '\n';
    return 0;
}

int cmd_train(const Options& opt, std::ostream& out, eval::Method method) {
    const auto cfg = load_config(opt);
    const auto data = config::load_dataset(cfg);
    const auto ex = experiment_for(cfg, opt, method);
    const auto platforms = eval::experiment_platforms(ex, data);

    Run run(method == eval::Method::SvmFusion ? "train-svm" : "train-net", opt);
    fs::create_directories(run.dir() / "models");
    std::ostringstream summary;
    for (auto pl : platforms) {
        const auto split = eval::make_cell_split(ex, data, pl);
        for (auto f : ex.feature_sets) {
            const auto cell = eval::train_cell(ex, data, f, pl, split);
            eval::save_cell((run.dir() / "models").string(), cell);
            const auto stem = eval::cell_file_stem(f, pl);
            run.record("models/" + stem + ".model");
            run.record("models/" + stem + ".vocab");
            summary << stem << " n_train " << split.train.size() << " vocab " << cell.vocab.size() << '\n';
        }
    }
    run.write("train_summary.txt", summary.str());
    run.finish(&cfg, ex.seed);
    out << summary.str();
    return 0;
}

int cmd_evaluate(const Options& opt, std::ostream& out, std::ostream& err) {
    const auto cfg = load_config(opt);
    const auto data = config::load_dataset(cfg);
    const auto ex = experiment_for(cfg, opt, std::nullopt);
    eval::ModelSource source;
    if (!opt.models.empty()) {
        source = [&](eval::FeatureSet f, corpus::Platform pl, const eval::CellSplit&) {
            return eval::load_cell(opt.models, f, pl);
        };
    }
    const auto report = eval::run_experiment(ex, data, source);

    Run run("evaluate", opt);
    run.write("report.txt", eval::format_table(report));
    run.write("report.kv", eval::format_kv(report));
    run.finish(&cfg, ex.seed);
    out << eval::format_table(report);
    // Wall-clock times vary between runs, so they stay out of the artifacts.
    err << eval::format_timings(report);
    return 0;
}

int cmd_predict(const Options& opt, std::ostream& out) {
    const auto cfg = load_config(opt);
    if (opt.models.empty()) throw Error(ErrorKind::InvalidArgument, "--models is required");
    const auto data = config::load_dataset(cfg);
    auto ex = cfg.experiment;
    const auto f = opt.feature_set.empty() ? ex.feature_sets.front() : eval::parse_feature_set(opt.feature_set);
    std::vector<corpus::Platform> platforms;
    if (!opt.platform.empty()) {
        platforms.push_back(corpus::parse_platform(opt.platform));
    } else {
        std::set<corpus::Platform> present;
        for (const auto& p : data.posts) present.insert(p.platform);
        platforms.assign(present.begin(), present.end());
    }

    std::ostringstream body;
    std::size_t n = 0;
    for (auto pl : platforms) {
        const auto cell = eval::load_cell(opt.models, f, pl);
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < data.posts.size(); ++i) {
            if (data.posts[i].platform == pl) idx.push_back(i);
        }
        const auto preds = eval::predict_posts(cell, ex, data, idx);
        for (std::size_t k = 0; k < idx.size(); ++k) {
            body << data.posts[idx[k]].id << '\t' << (preds[k].label > 0 ? "sarcastic" : "non_sarcastic") << '\t'
                 << shortest(preds[k].score) << '\n';
        }
        n += idx.size();
    }
    Run run("predict", opt);
    run.write("predictions.tsv", body.str());
    run.finish(&cfg, cfg.seed);
    out << "predicted " << n << " posts\n";
    return 0;
}

std::vector<annotate::JudgmentSet> load_judgments(const config::RunConfig& cfg) {
    if (cfg.judgments.empty()) throw Error(ErrorKind::InvalidArgument, "config names no judgments");
    return annotate::load_judgments(cfg.judgments);
}

int cmd_agreement(const Options& opt, std::ostream& out) {
    const auto cfg = load_config(opt);
    const auto records = load_judgments(cfg);
    std::vector<annotate::JudgmentSet> task1, task2;
    for (const auto& j : records) (j.task == annotate::Task::TextOnlyTask ? task1 : task2).push_back(j);

    std::ostringstream table;
    char line[160];
    std::snprintf(line, sizeof line, "%-10s %6s %11s %9s\n", "task", "posts", "matching_%", "kappa");
    table << line;
    auto row = [&](const char* name, const std::vector<annotate::JudgmentSet>& sets) {
        std::string matching = "-", kappa = "-";
        if (!sets.empty()) {
            matching = fixed(annotate::matching_percent(sets), 2);
            try {
                kappa = fixed(annotate::fleiss_kappa(sets), 4);
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::DegenerateMarginals) throw;
                kappa = "undefined";
            }
        }
        std::snprintf(line, sizeof line, "%-10s %6zu %11s %9s\n", name, sets.size(), matching.c_str(), kappa.c_str());
        table << line;
    };
    row("text", task1);
    row("text_image", task2);

    const auto posts = annotate::group_by_post(records);
    const auto dist = annotate::category_distribution(posts);
    table << "\ncategory      share_%\n";
    auto share = [&](const char* name, double v) {
        std::snprintf(line, sizeof line, "%-13s %7.2f\n", name, 100.0 * v);
        table << line;
    };
    share("text_only", dist.text_only);
    share("text_image", dist.text_image);
    share("not_sarcastic", dist.not_sarcastic);
    share("undecided", dist.undecided);
    share("d80", dist.d80);
    share("d100", dist.d100);

    Run run("agreement", opt);
    run.write("agreement.txt", table.str());
    run.finish(&cfg, cfg.seed);
    out << table.str();
    return 0;
}

int cmd_gold(const Options& opt, std::ostream& out) {
    const auto cfg = load_config(opt);
    const auto posts = annotate::group_by_post(load_judgments(cfg));
    std::vector<std::string> pool;
    if (!cfg.corpus.empty()) {
        std::unordered_set<std::string> judged;
        for (const auto& p : posts) judged.insert(p.post_id);
        for (const auto& p : corpus::load_corpus(cfg.corpus, config::emoji_table(cfg))) {
            if (p.label == corpus::Label::NonSarcastic && !judged.contains(p.id)) pool.push_back(p.id);
        }
        std::sort(pool.begin(), pool.end());
    }

    Run run("gold", opt);
    const std::pair<const char*, double> levels[] = {{"d50", 0.5}, {"d80", 0.8}, {"d100", 1.0}};
    std::uint64_t salt = 0;
    for (const auto& [name, t] : levels) {
        const bool balanced = !pool.empty();
        const auto gold = annotate::build_gold(posts, pool, t, Rng::derive(cfg.seed, 300 + salt++), balanced);
        std::ostringstream body;
        annotate::write_gold(body, gold);
        run.write(std::string("gold-") + name + ".tsv", body.str());
        out << name << " positives " << gold.positives.size() << " negatives " << gold.negatives.size() << '\n';
    }
    run.finish(&cfg, cfg.seed);
    return 0;
}

struct Verb {
    const char* name;
    const char* help;
};

constexpr Verb kVerbs[] = {
    {"ingest", "filter a raw corpus and strip collection artifacts"},
    {"stats", "per-platform corpus statistics"},
    {"featurize", "write feature vectors for one feature set"},
    {"train-svm", "train the linear SVM on every configured feature set"},
    {"train-net", "train the fusion network on every configured feature set"},
    {"evaluate", "run the experiment grid and write the report"},
    {"agreement", "matching percentage and Fleiss' kappa per task"},
    {"gold", "build the D-50/D-80/D-100 gold sets"},
    {"predict", "label posts with a trained model"},
    {"synth", "generate the synthetic incongruity corpus"},
};

void add_options(CLI::App& app, Options& opt, const std::string& verb) {
    app.add_option("--config", opt.config, "JSON run configuration");
    app.add_option("--seed", opt.seed, "root seed (overrides the config)");
    app.add_option("--out", opt.out, "output directory")->capture_default_str();
    app.add_option("--threads", opt.threads, "worker threads for independent cells");
    if (verb == "evaluate" || verb == "train-svm" || verb == "train-net") {
        app.add_option("--feature-sets", opt.feature_sets, "feature sets to run")->delimiter(',');
        app.add_option("--regime", opt.regime, "silver, gold-d50, gold-d80 or gold-d100");
    }
    if (verb == "evaluate") {
        app.add_option("--method", opt.method, "svm or deep");
        app.add_option("--models", opt.models, "directory of models written by train-svm/train-net");
    }
    if (verb == "predict") app.add_option("--models", opt.models, "model directory")->required();
    if (verb == "predict" || verb == "featurize") app.add_option("--feature-set", opt.feature_set, "feature set");
    if (verb == "predict" || verb == "synth") app.add_option("--platform", opt.platform, "IG, TU or TW");
    if (verb == "synth") {
        app.add_option("--n", opt.n, "number of posts");
        app.add_option("--q", opt.q, "share of posts whose cue is only in the image");
        app.add_option("--avr-dim", opt.avr_dim, "adapted visual representation size");
        app.add_option("--concepts", opt.n_concepts, "concept vocabulary size");
    }
}

int run_verb(const std::string& verb, const Options& opt, std::ostream& out, std::ostream& err) {
    if (verb == "synth") return cmd_synth(opt, out);
    if (verb == "ingest") return cmd_ingest(opt, out);
    if (verb == "stats") return cmd_stats(opt, out);
    if (verb == "featurize") return cmd_featurize(opt, out);
    if (verb == "train-svm") return cmd_train(opt, out, eval::Method::SvmFusion);
    if (verb == "train-net") return cmd_train(opt, out, eval::Method::DeepFusion);
    if (verb == "evaluate") return cmd_evaluate(opt, out, err);
    if (verb == "agreement") return cmd_agreement(opt, out);
    if (verb == "gold") return cmd_gold(opt, out);
    if (verb == "predict") return cmd_predict(opt, out);
    return 2;
}

std::string one_line(std::string s) {
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

}  // namespace

std::string usage() {
    std::ostringstream u;
    u << "usage: mmsarc <verb> [--config FILE] [--seed N] [--out DIR] [--threads N] [options]\n\nverbs:\n";
    for (const auto& v : kVerbs) {
        char line[128];
        std::snprintf(line, sizeof line, "  %-10s %s\n", v.name, v.help);
        u << line;
    }
    u << "\nrun 'mmsarc <verb> --help' for the options of a verb\n";
    return u.str();
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    if (args.empty() || args[0] == "--help" || args[0] == "-h") {
        (args.empty() ? err : out) << usage();
        return args.empty() ? 2 : 0;
    }
    const std::string verb = args[0];
    const bool known = std::any_of(std::begin(kVerbs), std::end(kVerbs), [&](const Verb& v) { return verb == v.name; });
    if (!known) {
        err << "unknown verb '" << verb << "'\n" << usage();
        return 2;
    }

    Options opt;
    CLI::App app("mmsarc " + verb, "mmsarc " + verb);
    add_options(app, opt, verb);
    std::vector<std::string> rest(args.rbegin(), args.rend() - 1);
    try {
        app.parse(rest);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: Usage: " << one_line(e.what()) << '\n';
        return 2;
    }

    try {
        return run_verb(verb, opt, out, err);
    } catch (const Error& e) {
        err << "error: " << to_string(e.kind()) << ": " << one_line(e.what()) << '\n';
    } catch (const fs::filesystem_error& e) {
        err << "error: IoError: " << one_line(e.what()) << '\n';
    } catch (const std::exception& e) {
        err << "error: InternalError: " << one_line(e.what()) << '\n';
    }
    return 1;
}

}  // namespace mmsarc::cli
