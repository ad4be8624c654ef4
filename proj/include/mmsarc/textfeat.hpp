#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "mmsarc/corpus.hpp"
#include "mmsarc/feature_vector.hpp"

namespace mmsarc::textfeat {

using corpus::Post;

// Per-word score source. Formality, subjectivity and sentiment are all
// looked up through this interface so a model-backed scorer can replace the
// shipped lexicon lookups.
class WordScorer {
public:
    virtual ~WordScorer() = default;
    // nullopt when the word is not covered.
    virtual std::optional<double> score(std::string_view lowered_word) const = 0;
};

class LexiconScorer final : public WordScorer {
public:
    LexiconScorer() = default;
    explicit LexiconScorer(std::unordered_map<std::string, double> table);

    std::optional<double> score(std::string_view lowered_word) const override;
    std::size_t size() const { return table_.size(); }

private:
    std::unordered_map<std::string, double> table_;
};

struct Embeddings {
    std::size_t dim = 0;
    std::unordered_map<std::string, std::vector<double>> vectors;

    const std::vector<double>* find(std::string_view word) const;
};

enum class LogBase { Natural, Ten };

// Lexicon keys are stored lowercased; lookups lowercase the token first.
struct LexResources {
    std::unordered_map<std::string, double> word_log_freq;
    std::shared_ptr<const WordScorer> formality = std::make_shared<LexiconScorer>();
    std::shared_ptr<const WordScorer> sentiment = std::make_shared<LexiconScorer>();
    std::shared_ptr<const WordScorer> subjectivity = std::make_shared<LexiconScorer>();
    std::unordered_set<std::string> hedges;
    std::unordered_set<std::string> contractions;
    std::unordered_set<std::string> pronouns_1st;
    std::unordered_set<std::string> pronouns_3rd;
    std::unordered_set<std::string> irregular_participles = default_irregular_participles();
    Embeddings embeddings;
    std::unordered_map<std::string, int> syllable_exceptions;

    void validate() const;

    static std::unordered_set<std::string> default_irregular_participles();
};

// Files backing LexResources. Empty paths leave the resource empty.
struct ResourcePaths {
    std::string word_freq;      // "word count" lines; converted to log counts
    std::string formality;      // "word score"
    std::string sentiment;      // "word score" in [-1, 1]
    std::string subjectivity;   // "word score" in [0, 1]
    std::string hedges;         // one word per line
    std::string contractions;
    std::string pronouns_1st;
    std::string pronouns_3rd;
    std::string irregular_participles;
    std::string embeddings;     // header "count dim", then "word v1 .. vd"
    std::string syllable_exceptions;  // "word syllables"
};

LexResources load_resources(const ResourcePaths& paths, LogBase base = LogBase::Natural);

std::unordered_map<std::string, double> load_lexicon(const std::string& path);
std::unordered_set<std::string> load_word_set(const std::string& path);
std::unordered_map<std::string, double> load_log_frequencies(const std::string& path, LogBase base);
Embeddings read_embeddings(std::istream& in);
Embeddings load_embeddings(const std::string& path);

// Words, then hashtags, then emojis: the text the features are derived from.
std::vector<std::string> text_tokens(const Post& p);

inline constexpr std::size_t kLexicalDim = 4;
inline constexpr std::size_t kSubjectivityDim = 6;
inline constexpr std::size_t kReadabilityDim = 3;

// [avg token length, avg log frequency, contraction count, avg formality]
std::vector<double> lexical_features(const Post& p, const LexResources& r);

// [avg subjectivity, avg sentiment, passives, hedges, 1st-person, 3rd-person]
std::vector<double> subjectivity_features(const Post& p, const LexResources& r);

// "be" form followed within two tokens by an -ed word or irregular participle.
std::size_t count_passives(std::span<const std::string> words, const LexResources& r);

using Ngram = std::vector<std::string>;

// Unigram and bigram index over a training split. Indices follow the
// lexicographic order of the token sequences.
class NgramVocab {
public:
    NgramVocab() = default;

    static NgramVocab build(std::span<const Post> train_posts, std::size_t min_count,
                            std::size_t max_order = 2, std::string built_on = "train");

    std::optional<std::uint32_t> index(const Ngram& gram) const;
    std::size_t size() const { return entries_.size(); }
    std::size_t max_order() const { return max_order_; }
    const std::vector<Ngram>& entries() const { return entries_; }
    const std::string& built_on() const { return built_on_; }

    void save(std::ostream& out) const;
    static NgramVocab read(std::istream& in);

private:
    std::vector<Ngram> entries_;
    std::map<Ngram, std::uint32_t> lookup_;
    std::size_t max_order_ = 2;
    std::string built_on_;
};

// Token sequence used for n-grams: lowercased words, '#'-prefixed lowercased
// hashtags, emojis.
std::vector<std::string> ngram_tokens(const Post& p);

std::vector<std::uint32_t> ngram_features(const Post& p, const NgramVocab& v);

std::vector<double> embedding_feature(const Post& p, const LexResources& r);

int count_syllables(std::string_view word, const std::unordered_map<std::string, int>& exceptions = {});
std::size_t count_sentences(std::string_view text);

// [word count, character count, Flesch-Kincaid grade]
std::vector<double> readability_features(const Post& p, const LexResources& r);

// Blocks "ngrams" (sparse), "word2vec" (dense d), "readability" (dense 3).
FeatureVector combination_features(const Post& p, const NgramVocab& v, const LexResources& r);

}  // namespace mmsarc::textfeat
