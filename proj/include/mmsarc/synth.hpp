#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mmsarc/annotate.hpp"
#include "mmsarc/corpus.hpp"
#include "mmsarc/eval.hpp"
#include "mmsarc/textfeat.hpp"
#include "mmsarc/visfeat.hpp"

namespace mmsarc::synth {

// Posts pair a sentiment phrase with one scene concept. Positive phrases
// ("lovely weather") only meet weather scenes and negative phrases ("awful
// dinner") only meet food scenes; the post is sarcastic when the scene
// contradicts the phrase (lovely + rain, awful + cake). A fraction q of the
// posts mention the scene only through the image, so their text carries no
// label information. The rest also name the scene in the text.
struct Params {
    std::size_t n = 2000;
    double q = 0.5;
    std::uint64_t seed = 7;
    std::vector<corpus::Platform> platforms{corpus::Platform::IG};
    std::size_t n_concepts = visfeat::kConceptCount;
    std::size_t avr_dim = visfeat::kAvrDim;
    std::size_t distractors = 3;      // unrelated concepts per image
    std::size_t prototype_dims = 16;  // nonzero AVR dimensions per concept
    double avr_noise = 0.2;
    std::size_t embedding_dim = 16;
    double judged_fraction = 0.25;    // share of sarcastic posts sent to raters
    std::size_t raters = 5;
    double vote_accuracy = 0.85;
    double dont_know_rate = 0.05;

    void validate() const;
};

struct Lexicons {
    std::map<std::string, double> word_counts;
    std::map<std::string, double> formality;
    std::map<std::string, double> sentiment;
    std::map<std::string, double> subjectivity;
    std::vector<std::string> hedges;
    std::vector<std::string> contractions;
    std::vector<std::string> pronouns_1st;
    std::vector<std::string> pronouns_3rd;
    std::map<std::string, std::vector<double>> embeddings;
};

struct Corpus {
    Params params;
    std::vector<corpus::Post> posts;
    // Per post: true when the scene is named only by the image.
    std::vector<bool> image_only_cue;
    visfeat::ConceptVocab concepts;
    visfeat::FeatureStore images;
    std::vector<annotate::JudgmentSet> judgments;
    Lexicons lexicons;

    textfeat::LexResources resources() const;
    eval::Dataset dataset() const;
};

Corpus generate(const Params& params);

// The scene concepts and sentiment words the generator draws from.
const std::vector<std::string>& scene_concepts();
const std::vector<std::string>& positive_words();
const std::vector<std::string>& negative_words();
// Word the text uses for a scene concept ("blue_sky" -> "sky").
std::string scene_word(const std::string& scene);
// Whether the scene contradicts a phrase of the given polarity.
bool contradicts(bool positive_phrase, const std::string& scene);

// Writes corpus.jsonl, concept_vocab.txt, concepts.txt, avr.txt,
// judgments.jsonl, lexicon files, embeddings.txt and a config.json that the
// command-line tool accepts. Returns the config path.
std::string write(const Corpus& c, const std::string& dir);

}  // namespace mmsarc::synth
