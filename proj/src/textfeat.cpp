#include "mmsarc/textfeat.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mmsarc/error.hpp"
#include "mmsarc/utf8.hpp"

namespace mmsarc::textfeat {

namespace {

// Lowercase and fold the typographic apostrophe so "Don’t" hits "don't".
std::string normalize(std::string_view word) {
    std::string out = utf8::ascii_lower(word);
    for (std::size_t pos; (pos = out.find("\xE2\x80\x99")) != std::string::npos;) out.replace(pos, 3, "'");
    return out;
}

const std::unordered_set<std::string> kBeForms = {
    "am", "is", "are", "was", "were", "be", "been", "being",
    "isn't", "aren't", "wasn't", "weren't", "'m", "'re", "'s"};

std::ifstream open(const std::string& path, std::string_view what) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + std::string(what) + " '" + path + "'");
    return in;
}

bool is_blank_or_comment(const std::string& line) {
    const auto first = line.find_first_not_of(" \t\r");
    return first == std::string::npos || line[first] == '#';
}

double mean_score(const std::vector<std::string>& tokens, const WordScorer* scorer) {
    if (!scorer) return 0.0;
    double sum = 0.0;
    std::size_t covered = 0;
    for (const auto& t : tokens) {
        if (auto s = scorer->score(normalize(t))) {
            sum += *s;
            ++covered;
        }
    }
    return covered ? sum / static_cast<double>(covered) : 0.0;
}

std::size_t count_in(const std::vector<std::string>& tokens, const std::unordered_set<std::string>& set) {
    std::size_t n = 0;
    for (const auto& t : tokens) n += set.contains(normalize(t));
    return n;
}

bool is_vowel(char c) {
    return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y';
}

}  // namespace

LexiconScorer::LexiconScorer(std::unordered_map<std::string, double> table) : table_(std::move(table)) {}

std::optional<double> LexiconScorer::score(std::string_view lowered_word) const {
    auto it = table_.find(std::string(lowered_word));
    if (it == table_.end()) return std::nullopt;
    return it->second;
}

const std::vector<double>* Embeddings::find(std::string_view word) const {
    auto it = vectors.find(std::string(word));
    if (it != vectors.end()) return &it->second;
    it = vectors.find(normalize(word));
    return it == vectors.end() ? nullptr : &it->second;
}

std::unordered_set<std::string> LexResources::default_irregular_participles() {
    return {"arisen", "awoken", "been",   "beaten",  "become",  "begun",  "bent",    "bitten",
            "blown",  "broken", "brought", "built",  "bought",  "caught", "chosen",  "done",
            "drawn",  "driven", "eaten",  "fallen",  "felt",    "forgotten", "forgiven", "found",
            "frozen", "given",  "gone",   "grown",   "heard",   "held",   "hidden",  "hit",
            "hurt",   "kept",   "known",  "laid",    "led",     "left",   "lost",    "made",
            "meant",  "met",    "paid",   "put",     "read",    "ridden", "run",     "said",
            "seen",   "sent",   "set",    "shaken",  "shot",    "shown",  "shut",    "sold",
            "spent",  "spoken", "stolen", "struck",  "sung",    "sunk",   "taken",   "taught",
            "thought", "thrown", "told",  "torn",    "understood", "woken", "won",   "worn",
            "written"};
}

void LexResources::validate() const {
    for (const auto& [word, value] : word_log_freq) {
        if (!std::isfinite(value)) throw Error(ErrorKind::InvalidArgument, "non-finite log frequency for '" + word + "'");
    }
    for (const auto& [word, vec] : embeddings.vectors) {
        if (vec.size() != embeddings.dim) {
            throw Error(ErrorKind::DimensionMismatch, "embedding for '" + word + "' has wrong dimension");
        }
    }
}

std::unordered_map<std::string, double> load_lexicon(const std::string& path) {
    auto in = open(path, "lexicon");
    std::unordered_map<std::string, double> table;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (is_blank_or_comment(line)) continue;
        std::istringstream fields(line);
        std::string word;
        double value = 0.0;
        if (!(fields >> word >> value)) {
            throw Error(ErrorKind::Parse, path + ":" + std::to_string(lineno) + ": expected 'word score'");
        }
        table[normalize(word)] = value;
    }
    return table;
}

std::unordered_set<std::string> load_word_set(const std::string& path) {
    auto in = open(path, "word list");
    std::unordered_set<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        if (is_blank_or_comment(line)) continue;
        std::istringstream fields(line);
        std::string word;
        fields >> word;
        words.insert(normalize(word));
    }
    return words;
}

std::unordered_map<std::string, double> load_log_frequencies(const std::string& path, LogBase base) {
    std::unordered_map<std::string, double> out;
    for (const auto& [word, count] : load_lexicon(path)) {
        if (!(count > 0.0) || !std::isfinite(count)) {
            throw Error(ErrorKind::Parse, path + ": frequency for '" + word + "' must be positive");
        }
        out[word] = base == LogBase::Natural ? std::log(count) : std::log10(count);
    }
    return out;
}

Embeddings read_embeddings(std::istream& in) {
    Embeddings emb;
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorKind::Parse, "embedding file is empty");
    std::size_t count = 0;
    {
        std::istringstream header(line);
        if (!(header >> count >> emb.dim) || emb.dim == 0) {
            throw Error(ErrorKind::Parse, "embedding header must be 'count dim'");
        }
    }
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream fields(line);
        std::string word;
        fields >> word;
        std::vector<double> vec;
        vec.reserve(emb.dim);
        double v;
        while (fields >> v) vec.push_back(v);
        if (vec.size() != emb.dim) {
            throw Error(ErrorKind::DimensionMismatch,
                        "embedding line " + std::to_string(lineno) + " has " + std::to_string(vec.size()) +
                            " values, expected " + std::to_string(emb.dim));
        }
        emb.vectors[word] = std::move(vec);
    }
    if (emb.vectors.size() != count) {
        throw Error(ErrorKind::Parse, "embedding header declares " + std::to_string(count) + " words, found " +
                                          std::to_string(emb.vectors.size()));
    }
    return emb;
}

Embeddings load_embeddings(const std::string& path) {
    auto in = open(path, "embedding file");
    return read_embeddings(in);
}

LexResources load_resources(const ResourcePaths& paths, LogBase base) {
    LexResources r;
    if (!paths.word_freq.empty()) r.word_log_freq = load_log_frequencies(paths.word_freq, base);
    if (!paths.formality.empty()) r.formality = std::make_shared<LexiconScorer>(load_lexicon(paths.formality));
    if (!paths.sentiment.empty()) r.sentiment = std::make_shared<LexiconScorer>(load_lexicon(paths.sentiment));
    if (!paths.subjectivity.empty()) {
        r.subjectivity = std::make_shared<LexiconScorer>(load_lexicon(paths.subjectivity));
    }
    if (!paths.hedges.empty()) r.hedges = load_word_set(paths.hedges);
    if (!paths.contractions.empty()) r.contractions = load_word_set(paths.contractions);
    if (!paths.pronouns_1st.empty()) r.pronouns_1st = load_word_set(paths.pronouns_1st);
    if (!paths.pronouns_3rd.empty()) r.pronouns_3rd = load_word_set(paths.pronouns_3rd);
    if (!paths.irregular_participles.empty()) r.irregular_participles = load_word_set(paths.irregular_participles);
    if (!paths.embeddings.empty()) r.embeddings = load_embeddings(paths.embeddings);
    if (!paths.syllable_exceptions.empty()) {
        for (const auto& [word, n] : load_lexicon(paths.syllable_exceptions)) {
            r.syllable_exceptions[word] = static_cast<int>(n);
        }
    }
    r.validate();
    return r;
}

std::vector<std::string> text_tokens(const Post& p) {
    std::vector<std::string> out;
    out.reserve(p.words.size() + p.hashtags.size() + p.emojis.size());
    out.insert(out.end(), p.words.begin(), p.words.end());
    out.insert(out.end(), p.hashtags.begin(), p.hashtags.end());
    out.insert(out.end(), p.emojis.begin(), p.emojis.end());
    return out;
}

std::vector<double> lexical_features(const Post& p, const LexResources& r) {
    const auto tokens = text_tokens(p);
    std::vector<double> out(kLexicalDim, 0.0);
    if (!tokens.empty()) {
        double chars = 0.0;
        for (const auto& t : tokens) chars += static_cast<double>(utf8::length(t));
        out[0] = chars / static_cast<double>(tokens.size());
    }
    double freq_sum = 0.0;
    std::size_t freq_covered = 0;
    for (const auto& t : tokens) {
        if (auto it = r.word_log_freq.find(normalize(t)); it != r.word_log_freq.end()) {
            freq_sum += it->second;
            ++freq_covered;
        }
    }
    out[1] = freq_covered ? freq_sum / static_cast<double>(freq_covered) : 0.0;
    out[2] = static_cast<double>(count_in(tokens, r.contractions));
    out[3] = mean_score(tokens, r.formality.get());
    return out;
}

std::size_t count_passives(std::span<const std::string> words, const LexResources& r) {
    std::size_t passives = 0;
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (!kBeForms.contains(normalize(words[i]))) continue;
        for (std::size_t k = i + 1; k <= i + 2 && k < words.size(); ++k) {
            const std::string w = normalize(words[k]);
            if ((w.size() > 2 && w.ends_with("ed")) || r.irregular_participles.contains(w)) {
                ++passives;
                break;
            }
        }
    }
    return passives;
}

std::vector<double> subjectivity_features(const Post& p, const LexResources& r) {
    const auto tokens = text_tokens(p);
    return {mean_score(tokens, r.subjectivity.get()),
            mean_score(tokens, r.sentiment.get()),
            static_cast<double>(count_passives(p.words, r)),
            static_cast<double>(count_in(tokens, r.hedges)),
            static_cast<double>(count_in(tokens, r.pronouns_1st)),
            static_cast<double>(count_in(tokens, r.pronouns_3rd))};
}

std::vector<std::string> ngram_tokens(const Post& p) {
    std::vector<std::string> out;
    out.reserve(p.words.size() + p.hashtags.size() + p.emojis.size());
    for (const auto& w : p.words) out.push_back(normalize(w));
    for (const auto& h : p.hashtags) out.push_back("#" + normalize(h));
    for (const auto& e : p.emojis) out.push_back(e);
    return out;
}

namespace {

template <typename Fn>
void for_each_ngram(const std::vector<std::string>& tokens, std::size_t max_order, Fn&& fn) {
    for (std::size_t order = 1; order <= max_order; ++order) {
        for (std::size_t i = 0; i + order <= tokens.size(); ++i) {
            fn(Ngram(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                     tokens.begin() + static_cast<std::ptrdiff_t>(i + order)));
        }
    }
}

}  // namespace

NgramVocab NgramVocab::build(std::span<const Post> train_posts, std::size_t min_count, std::size_t max_order,
                             std::string built_on) {
    if (train_posts.empty()) throw Error(ErrorKind::EmptyCorpus, "n-gram vocabulary needs training posts");
    if (max_order < 1 || max_order > 2) throw Error(ErrorKind::InvalidArgument, "n-gram order must be 1 or 2");
    std::map<Ngram, std::size_t> counts;
    for (const auto& p : train_posts) {
        for_each_ngram(ngram_tokens(p), max_order, [&](Ngram g) { ++counts[std::move(g)]; });
    }
    NgramVocab v;
    v.max_order_ = max_order;
    v.built_on_ = std::move(built_on);
    for (auto& [gram, count] : counts) {
        if (count < min_count) continue;
        v.lookup_.emplace(gram, static_cast<std::uint32_t>(v.entries_.size()));
        v.entries_.push_back(gram);
    }
    return v;
}

std::optional<std::uint32_t> NgramVocab::index(const Ngram& gram) const {
    auto it = lookup_.find(gram);
    if (it == lookup_.end()) return std::nullopt;
    return it->second;
}

void NgramVocab::save(std::ostream& out) const {
    out << "ngram-vocab 1 " << max_order_ << ' ' << entries_.size() << ' '
        << (built_on_.empty() ? "-" : built_on_) << '\n';
    for (const auto& gram : entries_) {
        for (std::size_t k = 0; k < gram.size(); ++k) out << (k ? " " : "") << gram[k];
        out << '\n';
    }
}

NgramVocab NgramVocab::read(std::istream& in) {
    std::string magic;
    int version = 0;
    std::size_t count = 0;
    NgramVocab v;
    if (!(in >> magic >> version >> v.max_order_ >> count >> v.built_on_) || magic != "ngram-vocab" || version != 1) {
        throw Error(ErrorKind::Parse, "not an n-gram vocabulary file");
    }
    std::string line;
    std::getline(in, line);
    for (std::size_t i = 0; i < count; ++i) {
        if (!std::getline(in, line)) throw Error(ErrorKind::Parse, "truncated n-gram vocabulary");
        std::istringstream fields(line);
        Ngram gram;
        for (std::string tok; fields >> tok;) gram.push_back(tok);
        if (gram.empty() || gram.size() > v.max_order_) throw Error(ErrorKind::Parse, "bad n-gram entry");
        if (!v.entries_.empty() && !(v.entries_.back() < gram)) {
            throw Error(ErrorKind::Parse, "n-gram vocabulary is not in lexicographic order");
        }
        v.lookup_.emplace(gram, static_cast<std::uint32_t>(v.entries_.size()));
        v.entries_.push_back(std::move(gram));
    }
    return v;
}

std::vector<std::uint32_t> ngram_features(const Post& p, const NgramVocab& v) {
    std::vector<std::uint32_t> out;
    for_each_ngram(ngram_tokens(p), v.max_order(), [&](const Ngram& g) {
        if (auto idx = v.index(g)) out.push_back(*idx);
    });
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<double> embedding_feature(const Post& p, const LexResources& r) {
    const std::size_t d = r.embeddings.dim;
    std::vector<double> sum(d, 0.0);
    std::size_t covered = 0;
    for (const auto& t : text_tokens(p)) {
        if (const auto* vec = r.embeddings.find(t)) {
            for (std::size_t k = 0; k < d; ++k) sum[k] += (*vec)[k];
            ++covered;
        }
    }
    if (covered) {
        for (auto& x : sum) x /= static_cast<double>(covered);
    }
    return sum;
}

int count_syllables(std::string_view word, const std::unordered_map<std::string, int>& exceptions) {
    const std::string w = normalize(word);
    if (auto it = exceptions.find(w); it != exceptions.end()) return it->second;
    int groups = 0;
    bool in_group = false;
    for (char c : w) {
        const bool vowel = is_vowel(c);
        if (vowel && !in_group) ++groups;
        in_group = vowel;
    }
    // Silent final 'e': a lone trailing 'e' after a consonant, except "-le".
    const std::size_t n = w.size();
    if (n >= 2 && w[n - 1] == 'e' && !is_vowel(w[n - 2]) && !(n >= 3 && w[n - 2] == 'l' && !is_vowel(w[n - 3]))) {
        --groups;
    }
    return std::max(groups, 1);
}

std::size_t count_sentences(std::string_view text) {
    std::size_t runs = 0;
    bool in_run = false;
    for (char c : text) {
        const bool terminal = c == '.' || c == '?' || c == '!';
        if (terminal && !in_run) ++runs;
        in_run = terminal;
    }
    return std::max<std::size_t>(runs, 1);
}

std::vector<double> readability_features(const Post& p, const LexResources& r) {
    const double words = static_cast<double>(p.words.size());
    const double chars = static_cast<double>(utf8::length(p.raw_text));
    if (p.words.empty()) return {0.0, chars, 0.0};
    double syllables = 0.0;
    for (const auto& w : p.words) syllables += count_syllables(w, r.syllable_exceptions);
    const double sentences = static_cast<double>(count_sentences(p.raw_text));
    const double grade = 0.39 * (words / sentences) + 11.8 * (syllables / words) - 15.59;
    return {words, chars, grade};
}

FeatureVector combination_features(const Post& p, const NgramVocab& v, const LexResources& r) {
    FeatureVector fv;
    fv.add_sparse("ngrams", v.size(), ngram_features(p, v));
    fv.add_dense("word2vec", embedding_feature(p, r));
    fv.add_dense("readability", readability_features(p, r));
    return fv;
}

}  // namespace mmsarc::textfeat
