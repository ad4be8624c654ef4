#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mmsarc/corpus.hpp"
#include "mmsarc/eval.hpp"
#include "mmsarc/synth.hpp"
#include "mmsarc/textfeat.hpp"

namespace mmsarc::config {

// Declarative run description read from a JSON file. Relative paths are
// resolved against the directory holding the file. Unknown keys are errors.
struct RunConfig {
    std::string source;       // path of the config file, empty when built in memory
    std::string text;         // raw bytes, hashed into the manifest
    std::uint64_t seed = 42;

    std::string corpus;
    std::string concept_vocab;
    std::string concepts;
    std::string avr;
    std::size_t avr_dim = 4096;
    std::string judgments;
    std::string emoji_ranges;

    textfeat::ResourcePaths resources;
    textfeat::LogBase log_base = textfeat::LogBase::Natural;
    corpus::FilterConfig filter;
    eval::ExperimentConfig experiment;
    bool feature_sets_given = false;
    synth::Params synth;

    // Every configured input file, in a fixed order.
    std::vector<std::string> input_files() const;
};

std::vector<eval::FeatureSet> default_feature_sets(eval::Method m);

RunConfig parse(const std::string& json_text, const std::string& base_dir);
RunConfig load(const std::string& path);

corpus::EmojiTable emoji_table(const RunConfig& cfg);

// Loads whatever the config names: posts, resources, concept vocabulary,
// image features and judgments.
eval::Dataset load_dataset(const RunConfig& cfg);

}  // namespace mmsarc::config
