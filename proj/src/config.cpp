#include "mmsarc/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mmsarc/annotate.hpp"
#include "mmsarc/error.hpp"

namespace mmsarc::config {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void check_keys(const json& obj, std::string_view where, std::initializer_list<std::string_view> allowed) {
    if (!obj.is_object()) throw Error(ErrorKind::Parse, "config: '" + std::string(where) + "' must be an object");
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (auto a : allowed) known |= key == a;
        if (!known) throw Error(ErrorKind::Parse, "config: unknown key '" + key + "' in " + std::string(where));
    }
}

// Typed lookup with a readable error; leaves target untouched when absent.
template <typename T>
void get(const json& obj, const char* key, T& target) {
    auto it = obj.find(key);
    if (it == obj.end()) return;
    try {
        target = it->get<T>();
    } catch (const json::exception&) {
        throw Error(ErrorKind::Parse, std::string("config: '") + key + "' has the wrong type");
    }
}

void get_path(const json& obj, const char* key, const fs::path& base, std::string& target) {
    std::string rel;
    get(obj, key, rel);
    if (rel.empty()) return;
    const fs::path p(rel);
    target = (p.is_absolute() ? p : base / p).lexically_normal().string();
}

visfeat::MultiImagePolicy parse_policy(const std::string& s) {
    if (s == "union_mean") return visfeat::MultiImagePolicy::UnionMean;
    if (s == "first_image") return visfeat::MultiImagePolicy::FirstImage;
    throw Error(ErrorKind::Parse, "config: unknown image_policy '" + s + "'");
}

}  // namespace

std::vector<eval::FeatureSet> default_feature_sets(eval::Method m) {
    using eval::FeatureSet;
    if (m == eval::Method::SvmFusion) {
        return {FeatureSet::Lexical,     FeatureSet::Subjectivity, FeatureSet::Ngrams,    FeatureSet::Word2vec,
                FeatureSet::Combination, FeatureSet::VsfOnly,      FeatureSet::NgramsVsf, FeatureSet::CombinationVsf};
    }
    return {FeatureSet::Unigram, FeatureSet::AvrOnly, FeatureSet::UnigramAvr};
}

std::vector<std::string> RunConfig::input_files() const {
    std::vector<std::string> out;
    for (const auto* p : {&corpus, &concept_vocab, &concepts, &avr, &judgments, &emoji_ranges, &resources.word_freq,
                          &resources.formality, &resources.sentiment, &resources.subjectivity, &resources.hedges,
                          &resources.contractions, &resources.pronouns_1st, &resources.pronouns_3rd,
                          &resources.irregular_participles, &resources.embeddings, &resources.syllable_exceptions}) {
        if (!p->empty()) out.push_back(*p);
    }
    return out;
}

RunConfig parse(const std::string& json_text, const std::string& base_dir) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Parse, std::string("config is not valid JSON: ") + e.what());
    }
    check_keys(root, "config",
               {"seed", "corpus", "concept_vocab", "concepts", "avr", "avr_dim", "judgments", "emoji_ranges",
                "resources", "filter", "experiment", "svm", "net", "synth"});
    const fs::path base(base_dir.empty() ? "." : base_dir);
    RunConfig cfg;
    cfg.text = json_text;
    get(root, "seed", cfg.seed);
    get_path(root, "corpus", base, cfg.corpus);
    get_path(root, "concept_vocab", base, cfg.concept_vocab);
    get_path(root, "concepts", base, cfg.concepts);
    get_path(root, "avr", base, cfg.avr);
    get(root, "avr_dim", cfg.avr_dim);
    get_path(root, "judgments", base, cfg.judgments);
    get_path(root, "emoji_ranges", base, cfg.emoji_ranges);

    if (auto it = root.find("resources"); it != root.end()) {
        const auto& r = *it;
        check_keys(r, "resources",
                   {"word_freq", "formality", "sentiment", "subjectivity", "hedges", "contractions", "pronouns_1st",
                    "pronouns_3rd", "irregular_participles", "embeddings", "syllable_exceptions", "log_base"});
        auto& p = cfg.resources;
        get_path(r, "word_freq", base, p.word_freq);
        get_path(r, "formality", base, p.formality);
        get_path(r, "sentiment", base, p.sentiment);
        get_path(r, "subjectivity", base, p.subjectivity);
        get_path(r, "hedges", base, p.hedges);
        get_path(r, "contractions", base, p.contractions);
        get_path(r, "pronouns_1st", base, p.pronouns_1st);
        get_path(r, "pronouns_3rd", base, p.pronouns_3rd);
        get_path(r, "irregular_participles", base, p.irregular_participles);
        get_path(r, "embeddings", base, p.embeddings);
        get_path(r, "syllable_exceptions", base, p.syllable_exceptions);
        std::string log_base = "e";
        get(r, "log_base", log_base);
        if (log_base == "e") cfg.log_base = textfeat::LogBase::Natural;
        else if (log_base == "10") cfg.log_base = textfeat::LogBase::Ten;
        else throw Error(ErrorKind::Parse, "config: log_base must be \"e\" or \"10\"");
    }

    if (auto it = root.find("filter"); it != root.end()) {
        check_keys(*it, "filter",
                   {"min_regular_words", "banned_tag_substrings", "collection_tags", "internal_link_allowlist"});
        get(*it, "min_regular_words", cfg.filter.min_regular_words);
        get(*it, "banned_tag_substrings", cfg.filter.banned_tag_substrings);
        get(*it, "collection_tags", cfg.filter.collection_tags);
        get(*it, "internal_link_allowlist", cfg.filter.internal_link_allowlist);
        cfg.filter.validate();
    }

    auto& ex = cfg.experiment;
    if (auto it = root.find("experiment"); it != root.end()) {
        const auto& e = *it;
        check_keys(e, "experiment",
                   {"method", "feature_sets", "split_ratio", "regime", "platforms", "min_count", "image_policy",
                    "concept_threshold", "hidden", "threads"});
        std::string s;
        if (get(e, "method", s), !s.empty()) ex.method = eval::parse_method(s);
        std::vector<std::string> names;
        get(e, "feature_sets", names);
        for (const auto& n : names) ex.feature_sets.push_back(eval::parse_feature_set(n));
        cfg.feature_sets_given = !names.empty();
        get(e, "split_ratio", ex.split_ratio);
        s.clear();
        if (get(e, "regime", s), !s.empty()) ex.regime = eval::parse_regime(s);
        names.clear();
        get(e, "platforms", names);
        for (const auto& n : names) ex.platforms.push_back(corpus::parse_platform(n));
        get(e, "min_count", ex.min_count);
        s.clear();
        if (get(e, "image_policy", s), !s.empty()) ex.image_policy = parse_policy(s);
        get(e, "concept_threshold", ex.concept_threshold);
        get(e, "hidden", ex.hidden);
        get(e, "threads", ex.threads);
    }
    if (auto it = root.find("svm"); it != root.end()) {
        check_keys(*it, "svm", {"C", "max_epochs", "tol", "normalize"});
        get(*it, "C", ex.svm.C);
        get(*it, "max_epochs", ex.svm.max_epochs);
        get(*it, "tol", ex.svm.tol);
        get(*it, "normalize", ex.svm.normalize);
    }
    if (auto it = root.find("net"); it != root.end()) {
        check_keys(*it, "net", {"batch_size", "epochs", "learning_rate", "momentum"});
        get(*it, "batch_size", ex.net.batch_size);
        get(*it, "epochs", ex.net.epochs);
        get(*it, "learning_rate", ex.net.learning_rate);
        get(*it, "momentum", ex.net.momentum);
    }
    if (!cfg.feature_sets_given) ex.feature_sets = default_feature_sets(ex.method);
    ex.seed = cfg.seed;

    if (auto it = root.find("synth"); it != root.end()) {
        const auto& s = *it;
        check_keys(s, "synth",
                   {"n", "q", "seed", "platforms", "n_concepts", "avr_dim", "distractors", "prototype_dims",
                    "avr_noise", "embedding_dim", "judged_fraction", "raters", "vote_accuracy", "dont_know_rate"});
        auto& p = cfg.synth;
        get(s, "n", p.n);
        get(s, "q", p.q);
        get(s, "seed", p.seed);
        std::vector<std::string> names;
        get(s, "platforms", names);
        if (!names.empty()) {
            p.platforms.clear();
            for (const auto& n : names) p.platforms.push_back(corpus::parse_platform(n));
        }
        get(s, "n_concepts", p.n_concepts);
        get(s, "avr_dim", p.avr_dim);
        get(s, "distractors", p.distractors);
        get(s, "prototype_dims", p.prototype_dims);
        get(s, "avr_noise", p.avr_noise);
        get(s, "embedding_dim", p.embedding_dim);
        get(s, "judged_fraction", p.judged_fraction);
        get(s, "raters", p.raters);
        get(s, "vote_accuracy", p.vote_accuracy);
        get(s, "dont_know_rate", p.dont_know_rate);
    }
    return cfg;
}

RunConfig load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open config '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    auto cfg = parse(buf.str(), fs::path(path).parent_path().string());
    cfg.source = path;
    return cfg;
}

corpus::EmojiTable emoji_table(const RunConfig& cfg) {
    return cfg.emoji_ranges.empty() ? corpus::EmojiTable::builtin() : corpus::EmojiTable::load(cfg.emoji_ranges);
}

eval::Dataset load_dataset(const RunConfig& cfg) {
    eval::Dataset d{{}, {}, {}, visfeat::FeatureStore(cfg.avr_dim), {}};
    if (cfg.corpus.empty()) throw Error(ErrorKind::InvalidArgument, "config names no corpus");
    d.posts = corpus::load_corpus(cfg.corpus, emoji_table(cfg));
    d.resources = textfeat::load_resources(cfg.resources, cfg.log_base);
    if (!cfg.concept_vocab.empty()) d.concepts = visfeat::ConceptVocab::load(cfg.concept_vocab);
    if (!cfg.concepts.empty()) d.images.load_concepts(cfg.concepts);
    if (!cfg.avr.empty()) d.images.load_avr(cfg.avr);
    if (!cfg.judgments.empty()) d.judgments = annotate::load_judgments(cfg.judgments);
    return d;
}

}  // namespace mmsarc::config
