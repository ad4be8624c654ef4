#include "mmsarc/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "mmsarc/error.hpp"
#include "mmsarc/format.hpp"
#include "mmsarc/hash.hpp"
#include "mmsarc/random.hpp"

namespace mmsarc::eval {

namespace {

struct FeatureSetInfo {
    FeatureSet set;
    std::string_view name;
};

constexpr FeatureSetInfo kFeatureSets[] = {
    {FeatureSet::Lexical, "lexical"},
    {FeatureSet::Subjectivity, "subjectivity"},
    {FeatureSet::Ngrams, "ngrams"},
    {FeatureSet::Word2vec, "word2vec"},
    {FeatureSet::Combination, "combination"},
    {FeatureSet::VsfOnly, "vsf_only"},
    {FeatureSet::NgramsVsf, "ngrams+vsf"},
    {FeatureSet::CombinationVsf, "combination+vsf"},
    {FeatureSet::Unigram, "unigram"},
    {FeatureSet::AvrOnly, "avr_only"},
    {FeatureSet::UnigramAvr, "unigram+avr"},
};

constexpr std::uint64_t kSplitSalt = 100;
constexpr std::uint64_t kGoldSalt = 200;
constexpr std::uint64_t kTrainSalt = 1000;

bool needs_ngram_vocab(FeatureSet f) {
    return f == FeatureSet::Ngrams || f == FeatureSet::Combination || f == FeatureSet::NgramsVsf ||
           f == FeatureSet::CombinationVsf;
}

std::vector<Post> gather(const Dataset& data, std::span<const std::size_t> idx) {
    std::vector<Post> out;
    out.reserve(idx.size());
    for (auto i : idx) out.push_back(data.posts[i]);
    return out;
}

FeatureContext make_context(const ExperimentConfig& cfg, const Dataset& data, const textfeat::NgramVocab& vocab) {
    FeatureContext ctx;
    ctx.resources = &data.resources;
    ctx.concepts = &data.concepts;
    ctx.images = &data.images;
    ctx.vocab = &vocab;
    ctx.image_policy = cfg.image_policy;
    ctx.concept_threshold = cfg.concept_threshold;
    return ctx;
}

// Network inputs for a set of posts. The AVR storage must outlive the examples.
std::vector<fusionnet::Example> net_examples(const ExperimentConfig& cfg, const Dataset& data, fusionnet::Mode mode,
                                             const textfeat::NgramVocab& vocab, std::span<const std::size_t> idx,
                                             std::vector<std::vector<double>>& avr_store, bool labeled) {
    std::vector<fusionnet::Example> out;
    out.reserve(idx.size());
    avr_store.clear();
    avr_store.reserve(idx.size());
    for (auto i : idx) {
        const auto& p = data.posts[i];
        fusionnet::Example ex;
        ex.text = textfeat::ngram_features(p, vocab);
        if (labeled) ex.label = signed_label(p) > 0 ? 1 : 0;
        if (mode != fusionnet::Mode::TextOnly) {
            auto blocks = visfeat::post_image_block(p, data.images, data.concepts, cfg.image_policy,
                                                    cfg.concept_threshold);
            if (blocks.avr.empty()) {
                throw Error(ErrorKind::MissingImage, "post '" + p.id + "' has no adapted visual representation");
            }
            avr_store.push_back(std::move(blocks.avr));
            ex.avr = avr_store.back();
        }
        out.push_back(std::move(ex));
    }
    return out;
}

std::string vocab_text(const textfeat::NgramVocab& v) {
    std::ostringstream out;
    v.save(out);
    return out.str();
}

}  // namespace

std::string_view to_string(Method m) { return m == Method::SvmFusion ? "svm" : "deep"; }

std::string_view to_string(Regime r) {
    switch (r) {
        case Regime::Silver: return "silver";
        case Regime::GoldD50: return "gold-d50";
        case Regime::GoldD80: return "gold-d80";
        case Regime::GoldD100: return "gold-d100";
    }
    return "?";
}

std::string_view to_string(FeatureSet f) {
    for (const auto& info : kFeatureSets) {
        if (info.set == f) return info.name;
    }
    return "?";
}

Method parse_method(std::string_view s) {
    if (s == "svm") return Method::SvmFusion;
    if (s == "deep") return Method::DeepFusion;
    throw Error(ErrorKind::Parse, "unknown method '" + std::string(s) + "' (expected svm or deep)");
}

Regime parse_regime(std::string_view s) {
    for (Regime r : {Regime::Silver, Regime::GoldD50, Regime::GoldD80, Regime::GoldD100}) {
        if (to_string(r) == s) return r;
    }
    throw Error(ErrorKind::Parse, "unknown regime '" + std::string(s) + "'");
}

FeatureSet parse_feature_set(std::string_view s) {
    for (const auto& info : kFeatureSets) {
        if (info.name == s) return info.set;
    }
    throw Error(ErrorKind::Parse, "unknown feature set '" + std::string(s) + "'");
}

Method method_of(FeatureSet f) {
    switch (f) {
        case FeatureSet::Unigram:
        case FeatureSet::AvrOnly:
        case FeatureSet::UnigramAvr: return Method::DeepFusion;
        default: return Method::SvmFusion;
    }
}

bool uses_text(FeatureSet f) { return f != FeatureSet::VsfOnly && f != FeatureSet::AvrOnly; }

bool uses_image(FeatureSet f) {
    return f == FeatureSet::VsfOnly || f == FeatureSet::NgramsVsf || f == FeatureSet::CombinationVsf ||
           f == FeatureSet::AvrOnly || f == FeatureSet::UnigramAvr;
}

fusionnet::Mode net_mode(FeatureSet f) {
    switch (f) {
        case FeatureSet::Unigram: return fusionnet::Mode::TextOnly;
        case FeatureSet::AvrOnly: return fusionnet::Mode::ImageOnly;
        case FeatureSet::UnigramAvr: return fusionnet::Mode::Fusion;
        default: throw Error(ErrorKind::InvalidArgument, "feature set '" + std::string(to_string(f)) +
                                                             "' is not a network feature set");
    }
}

double gold_threshold(Regime r) {
    switch (r) {
        case Regime::Silver: return 0.0;
        case Regime::GoldD50: return 0.5;
        case Regime::GoldD80: return 0.8;
        case Regime::GoldD100: return 1.0;
    }
    return 0.0;
}

void ExperimentConfig::validate() const {
    if (!(split_ratio > 0.0 && split_ratio < 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "split_ratio must be in (0, 1)");
    }
    if (feature_sets.empty()) throw Error(ErrorKind::InvalidArgument, "experiment needs at least one feature set");
    for (auto f : feature_sets) {
        if (method_of(f) != method) {
            throw Error(ErrorKind::InvalidArgument, "feature set '" + std::string(to_string(f)) +
                                                        "' does not belong to method '" +
                                                        std::string(to_string(method)) + "'");
        }
    }
    if (hidden == 0) throw Error(ErrorKind::InvalidArgument, "hidden must be at least 1");
    svm.validate();
    net.validate();
}

SplitIndices balanced_split_indices(std::span<const Post> posts, double ratio, std::uint64_t seed) {
    if (!(ratio > 0.0 && ratio < 1.0)) throw Error(ErrorKind::InvalidArgument, "split ratio must be in (0, 1)");
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < posts.size(); ++i) {
        if (posts[i].label == corpus::Label::Sarcastic) pos.push_back(i);
        else if (posts[i].label == corpus::Label::NonSarcastic) neg.push_back(i);
    }
    if (pos.size() < 2 || neg.size() < 2) {
        throw Error(ErrorKind::InsufficientData, "balanced split needs at least two posts per class (have " +
                                                     std::to_string(pos.size()) + " sarcastic, " +
                                                     std::to_string(neg.size()) + " non-sarcastic)");
    }
    Rng rng(seed);
    SplitIndices out;
    for (auto* cls : {&pos, &neg}) {
        rng.shuffle(*cls);
        const auto n_train = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(cls->size())));
        out.train.insert(out.train.end(), cls->begin(), cls->begin() + static_cast<std::ptrdiff_t>(n_train));
        out.test.insert(out.test.end(), cls->begin() + static_cast<std::ptrdiff_t>(n_train), cls->end());
    }
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

std::pair<std::vector<Post>, std::vector<Post>> balanced_split(std::span<const Post> posts, double ratio,
                                                               std::uint64_t seed) {
    const auto idx = balanced_split_indices(posts, ratio, seed);
    std::pair<std::vector<Post>, std::vector<Post>> out;
    for (auto i : idx.train) out.first.push_back(posts[i]);
    for (auto i : idx.test) out.second.push_back(posts[i]);
    return out;
}

double accuracy(std::span<const int> preds, std::span<const int> labels) {
    if (preds.size() != labels.size()) throw Error(ErrorKind::InvalidArgument, "prediction and label counts differ");
    if (preds.empty()) throw Error(ErrorKind::InvalidArgument, "accuracy of an empty set is undefined");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) hits += preds[i] == labels[i];
    return static_cast<double>(hits) / static_cast<double>(preds.size());
}

int signed_label(const Post& p) {
    switch (p.label) {
        case corpus::Label::Sarcastic: return 1;
        case corpus::Label::NonSarcastic: return -1;
        case corpus::Label::Unlabeled: break;
    }
    throw Error(ErrorKind::InvalidArgument, "post '" + p.id + "' is unlabeled");
}

FeatureVector svm_features(FeatureSet f, const Post& p, const FeatureContext& ctx) {
    if (!ctx.resources || !ctx.concepts || !ctx.images) {
        throw Error(ErrorKind::InvalidArgument, "feature context is incomplete");
    }
    if (needs_ngram_vocab(f) && !ctx.vocab) throw Error(ErrorKind::InvalidArgument, "feature set needs a vocabulary");
    const auto& r = *ctx.resources;
    auto vsf = [&] {
        FeatureVector fv;
        const auto blocks = visfeat::post_image_block(p, *ctx.images, *ctx.concepts, ctx.image_policy,
                                                      ctx.concept_threshold);
        fv.add_sparse("vsf", ctx.concepts->size(), blocks.vsf);
        return fv;
    };
    auto ngrams = [&] {
        FeatureVector fv;
        fv.add_sparse("ngrams", ctx.vocab->size(), textfeat::ngram_features(p, *ctx.vocab));
        return fv;
    };
    FeatureVector fv;
    switch (f) {
        case FeatureSet::Lexical: fv.add_dense("lexical", textfeat::lexical_features(p, r)); return fv;
        case FeatureSet::Subjectivity: fv.add_dense("subjectivity", textfeat::subjectivity_features(p, r)); return fv;
        case FeatureSet::Ngrams: return ngrams();
        case FeatureSet::Word2vec: fv.add_dense("word2vec", textfeat::embedding_feature(p, r)); return fv;
        case FeatureSet::Combination: return textfeat::combination_features(p, *ctx.vocab, r);
        case FeatureSet::VsfOnly: return vsf();
        case FeatureSet::NgramsVsf: {
            const FeatureVector parts[] = {ngrams(), vsf()};
            return svm::concat(parts);
        }
        case FeatureSet::CombinationVsf: {
            const FeatureVector parts[] = {textfeat::combination_features(p, *ctx.vocab, r), vsf()};
            return svm::concat(parts);
        }
        default: break;
    }
    throw Error(ErrorKind::InvalidArgument, "feature set '" + std::string(to_string(f)) + "' is not an SVM feature set");
}

CellSplit make_cell_split(const ExperimentConfig& cfg, const Dataset& data, Platform platform) {
    const auto platform_salt = static_cast<std::uint64_t>(platform);
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < data.posts.size(); ++i) {
        const auto& p = data.posts[i];
        if (p.platform == platform && p.label != corpus::Label::Unlabeled) members.push_back(i);
    }

    CellSplit out;
    if (cfg.regime == Regime::Silver) {
        const auto subset = gather(data, members);
        const auto split = balanced_split_indices(subset, cfg.split_ratio, Rng::derive(cfg.seed, kSplitSalt + platform_salt));
        for (auto k : split.train) out.train.push_back(members[k]);
        for (auto k : split.test) {
            out.test.push_back(members[k]);
            out.test_labels.push_back(signed_label(data.posts[members[k]]));
        }
        return out;
    }

    // Gold: judged posts never enter training; the non-sarcastic half of the
    // silver test side supplies the negative pool.
    std::unordered_map<std::string, std::size_t> by_id;
    for (auto i : members) by_id.emplace(data.posts[i].id, i);
    std::vector<annotate::JudgmentSet> judged;
    std::unordered_set<std::string> judged_ids;
    for (const auto& j : data.judgments) {
        if (by_id.contains(j.post_id)) {
            judged.push_back(j);
            judged_ids.insert(j.post_id);
        }
    }
    if (judged.empty()) {
        throw Error(ErrorKind::InsufficientData,
                    "no judgments for platform " + std::string(corpus::to_string(platform)));
    }
    std::vector<std::size_t> silver;
    for (auto i : members) {
        if (!judged_ids.contains(data.posts[i].id)) silver.push_back(i);
    }
    const auto subset = gather(data, silver);
    const auto split = balanced_split_indices(subset, cfg.split_ratio, Rng::derive(cfg.seed, kSplitSalt + platform_salt));
    for (auto k : split.train) out.train.push_back(silver[k]);
    std::vector<std::string> pool;
    for (auto k : split.test) {
        const auto& p = data.posts[silver[k]];
        if (p.label == corpus::Label::NonSarcastic) pool.push_back(p.id);
    }
    const auto annotated = annotate::group_by_post(judged);
    const auto gold = annotate::build_gold(annotated, pool, gold_threshold(cfg.regime),
                                           Rng::derive(cfg.seed, kGoldSalt + platform_salt));
    if (gold.positives.empty()) {
        throw Error(ErrorKind::InsufficientData, "gold set for platform " + std::string(corpus::to_string(platform)) +
                                                     " has no positives at this threshold");
    }
    for (const auto& id : gold.positives) {
        out.test.push_back(by_id.at(id));
        out.test_labels.push_back(1);
    }
    for (const auto& id : gold.negatives) {
        out.test.push_back(by_id.at(id));
        out.test_labels.push_back(-1);
    }
    std::unordered_set<std::string> train_ids;
    for (auto i : out.train) train_ids.insert(data.posts[i].id);
    for (auto i : out.test) {
        if (train_ids.contains(data.posts[i].id)) {
            throw Error(ErrorKind::ProtocolViolation, "gold test post '" + data.posts[i].id + "' is in training");
        }
    }
    return out;
}

std::uint64_t cell_seed(const ExperimentConfig& cfg, FeatureSet f, Platform platform) {
    return Rng::derive(cfg.seed, kTrainSalt + 16 * static_cast<std::uint64_t>(f) + static_cast<std::uint64_t>(platform));
}

TrainedCell train_cell(const ExperimentConfig& cfg, const Dataset& data, FeatureSet f, Platform platform,
                       const CellSplit& split) {
    TrainedCell out;
    out.feature_set = f;
    out.platform = platform;
    const auto train_posts = gather(data, split.train);
    const std::uint64_t seed = cell_seed(cfg, f, platform);

    if (method_of(f) == Method::SvmFusion) {
        if (needs_ngram_vocab(f)) out.vocab = textfeat::NgramVocab::build(train_posts, cfg.min_count, 2, "silver-train");
        const auto ctx = make_context(cfg, data, out.vocab);
        std::vector<FeatureVector> X;
        std::vector<int> y;
        X.reserve(train_posts.size());
        for (const auto& p : train_posts) {
            X.push_back(svm_features(f, p, ctx));
            y.push_back(signed_label(p));
        }
        auto svm_cfg = cfg.svm;
        svm_cfg.seed = seed;
        out.svm = svm::train(X, y, svm_cfg);
        return out;
    }

    const auto mode = net_mode(f);
    out.vocab = textfeat::NgramVocab::build(train_posts, cfg.min_count, 1, "silver-train");
    std::vector<std::vector<double>> avr_store;
    const auto examples = net_examples(cfg, data, mode, out.vocab, split.train, avr_store, true);
    fusionnet::NetDims dims;
    dims.text_in = out.vocab.size();
    dims.hidden = cfg.hidden;
    dims.image_dim = data.images.avr_dim();
    auto net_cfg = cfg.net;
    net_cfg.mode = mode;
    net_cfg.seed = seed;
    fusionnet::Checkpoint ckpt;
    ckpt.net = fusionnet::train(dims, examples, net_cfg);
    ckpt.config = net_cfg;
    ckpt.vocab_hash = sha256_hex(vocab_text(out.vocab));
    out.net = std::move(ckpt);
    return out;
}

std::vector<PostPrediction> predict_posts(const TrainedCell& model, const ExperimentConfig& cfg, const Dataset& data,
                                          std::span<const std::size_t> post_indices) {
    std::vector<PostPrediction> out;
    out.reserve(post_indices.size());
    if (model.svm) {
        const auto ctx = make_context(cfg, data, model.vocab);
        for (auto i : post_indices) {
            const auto pred = svm::predict(*model.svm, svm_features(model.feature_set, data.posts[i], ctx));
            out.push_back({pred.label, pred.score});
        }
        return out;
    }
    if (!model.net) throw Error(ErrorKind::InvalidArgument, "trained cell holds no model");
    const auto& net = model.net->net;
    if (net.dims().text_in != model.vocab.size()) {
        throw Error(ErrorKind::DimensionMismatch, "network input size does not match its vocabulary");
    }
    std::vector<std::vector<double>> avr_store;
    const auto examples = net_examples(cfg, data, net.mode(), model.vocab, post_indices, avr_store, false);
    for (const auto& ex : examples) {
        const auto probs = fusionnet::forward(net, ex.text, ex.avr);
        out.push_back({probs[1] >= probs[0] ? 1 : -1, probs[1]});
    }
    return out;
}

std::string cell_file_stem(FeatureSet f, Platform platform) {
    return std::string(to_string(f)) + "." + std::string(corpus::to_string(platform));
}

void save_cell(const std::string& dir, const TrainedCell& cell) {
    const std::string stem = dir + "/" + cell_file_stem(cell.feature_set, cell.platform);
    std::ofstream model(stem + ".model");
    std::ofstream vocab(stem + ".vocab");
    if (!model || !vocab) throw Error(ErrorKind::Io, "cannot write model files '" + stem + ".*'");
    if (cell.svm) svm::save(model, *cell.svm);
    else if (cell.net) fusionnet::save(model, *cell.net);
    else throw Error(ErrorKind::InvalidArgument, "trained cell holds no model");
    cell.vocab.save(vocab);
    if (!model || !vocab) throw Error(ErrorKind::Io, "failed writing model files '" + stem + ".*'");
}

TrainedCell load_cell(const std::string& dir, FeatureSet f, Platform platform) {
    const std::string stem = dir + "/" + cell_file_stem(f, platform);
    std::ifstream model(stem + ".model");
    std::ifstream vocab(stem + ".vocab");
    if (!model || !vocab) throw Error(ErrorKind::Io, "cannot open model files '" + stem + ".*'");
    TrainedCell cell;
    cell.feature_set = f;
    cell.platform = platform;
    cell.vocab = textfeat::NgramVocab::read(vocab);
    if (method_of(f) == Method::SvmFusion) {
        cell.svm = svm::load(model);
    } else {
        cell.net = fusionnet::load(model);
        if (cell.net->vocab_hash != sha256_hex(vocab_text(cell.vocab))) {
            throw Error(ErrorKind::LayoutMismatch, "checkpoint '" + stem + ".model' was trained on another vocabulary");
        }
        if (cell.net->net.mode() != net_mode(f)) {
            throw Error(ErrorKind::LayoutMismatch, "checkpoint '" + stem + ".model' has the wrong mode");
        }
    }
    return cell;
}

const Cell* Report::find(FeatureSet f, Platform p) const {
    for (const auto& c : cells) {
        if (c.feature_set == f && c.platform == p) return &c;
    }
    return nullptr;
}

Report assemble_report(Method method, Regime regime, std::uint64_t seed, std::vector<FeatureSet> feature_sets,
                       std::vector<Platform> platforms, std::vector<Cell> cells) {
    Report r;
    r.method = method;
    r.regime = regime;
    r.seed = seed;
    auto rank = [&](const Cell& c) {
        const auto fs = std::find(feature_sets.begin(), feature_sets.end(), c.feature_set) - feature_sets.begin();
        const auto pl = std::find(platforms.begin(), platforms.end(), c.platform) - platforms.begin();
        return std::pair(fs, pl);
    };
    std::sort(cells.begin(), cells.end(), [&](const Cell& a, const Cell& b) { return rank(a) < rank(b); });
    if (cells.size() != feature_sets.size() * platforms.size()) {
        throw Error(ErrorKind::InvalidArgument, "report grid is incomplete");
    }
    for (std::size_t k = 0; k < cells.size(); ++k) {
        const auto [fs, pl] = rank(cells[k]);
        if (static_cast<std::size_t>(fs) * platforms.size() + static_cast<std::size_t>(pl) != k) {
            throw Error(ErrorKind::InvalidArgument, "report grid has a duplicate or foreign cell");
        }
    }
    r.feature_sets = std::move(feature_sets);
    r.platforms = std::move(platforms);
    r.cells = std::move(cells);
    return r;
}

std::vector<Platform> experiment_platforms(const ExperimentConfig& cfg, const Dataset& data) {
    if (!cfg.platforms.empty()) return cfg.platforms;
    std::set<Platform> present;
    for (const auto& p : data.posts) {
        if (p.label != corpus::Label::Unlabeled) present.insert(p.platform);
    }
    if (present.empty()) throw Error(ErrorKind::EmptyCorpus, "no labeled posts to evaluate");
    return {present.begin(), present.end()};
}

Report run_experiment(const ExperimentConfig& cfg, const Dataset& data, const ModelSource& source) {
    cfg.validate();
    const auto platforms = experiment_platforms(cfg, data);

    // Splits are shared by every feature set of a platform.
    std::map<Platform, CellSplit> splits;
    for (auto pl : platforms) splits.emplace(pl, make_cell_split(cfg, data, pl));

    struct Job {
        FeatureSet f;
        Platform pl;
    };
    std::vector<Job> jobs;
    for (auto f : cfg.feature_sets) {
        for (auto pl : platforms) jobs.push_back({f, pl});
    }

    auto run_job = [&](const Job& job) {
        const auto& split = splits.at(job.pl);
        const auto start = std::chrono::steady_clock::now();
        const auto model = source ? source(job.f, job.pl, split) : train_cell(cfg, data, job.f, job.pl, split);
        const auto preds = predict_posts(model, cfg, data, split.test);
        std::vector<int> labels;
        labels.reserve(preds.size());
        for (const auto& p : preds) labels.push_back(p.label);
        Cell c{job.f, job.pl, cfg.regime};
        c.n_train = split.train.size();
        c.n_test = split.test.size();
        c.accuracy = accuracy(labels, split.test_labels);
        c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return c;
    };

    std::vector<Cell> cells;
    const std::size_t workers = std::max<std::size_t>(1, cfg.threads);
    if (workers == 1) {
        for (const auto& job : jobs) cells.push_back(run_job(job));
    } else {
        // Completion order does not matter; assemble_report reorders.
        for (std::size_t start = 0; start < jobs.size(); start += workers) {
            std::vector<std::future<Cell>> pending;
            for (std::size_t k = start; k < std::min(jobs.size(), start + workers); ++k) {
                pending.push_back(std::async(std::launch::async, run_job, jobs[k]));
            }
            for (auto& f : pending) cells.push_back(f.get());
        }
    }
    return assemble_report(cfg.method, cfg.regime, cfg.seed, cfg.feature_sets, platforms, std::move(cells));
}

std::string format_table(const Report& r) {
    std::size_t width = std::string_view("feature set").size();
    for (auto f : r.feature_sets) width = std::max(width, to_string(f).size());
    std::ostringstream out;
    out << "# method=" << to_string(r.method) << " regime=" << to_string(r.regime) << " seed=" << r.seed << '\n';
    char buf[64];
    std::snprintf(buf, sizeof buf, "%-*s", static_cast<int>(width), "feature set");
    out << buf;
    for (auto pl : r.platforms) {
        std::snprintf(buf, sizeof buf, "  %8s", std::string(corpus::to_string(pl)).c_str());
        out << buf;
    }
    out << '\n';
    for (auto f : r.feature_sets) {
        std::snprintf(buf, sizeof buf, "%-*s", static_cast<int>(width), std::string(to_string(f)).c_str());
        out << buf;
        for (auto pl : r.platforms) {
            std::snprintf(buf, sizeof buf, "  %8.2f", 100.0 * r.find(f, pl)->accuracy);
            out << buf;
        }
        out << '\n';
    }
    out << "# baseline accuracy 50.00 (class-balanced test sets)\n";
    return out.str();
}

std::string format_kv(const Report& r) {
    std::ostringstream out;
    out << "method = " << to_string(r.method) << '\n';
    out << "regime = " << to_string(r.regime) << '\n';
    out << "seed = " << r.seed << '\n';
    for (const auto& c : r.cells) {
        const std::string key = std::string(to_string(c.feature_set)) + "." + std::string(corpus::to_string(c.platform)) +
                                "." + std::string(to_string(c.regime));
        out << "accuracy." << key << " = " << shortest(c.accuracy) << '\n';
        out << "n_train." << key << " = " << c.n_train << '\n';
        out << "n_test." << key << " = " << c.n_test << '\n';
    }
    return out.str();
}

std::string format_timings(const Report& r) {
    std::ostringstream out;
    for (const auto& c : r.cells) {
        out << to_string(c.feature_set) << '.' << corpus::to_string(c.platform) << " seconds = " << c.seconds << '\n';
    }
    return out.str();
}

}  // namespace mmsarc::eval
