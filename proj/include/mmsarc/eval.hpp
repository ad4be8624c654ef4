#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mmsarc/annotate.hpp"
#include "mmsarc/corpus.hpp"
#include "mmsarc/fusionnet.hpp"
#include "mmsarc/svm.hpp"
#include "mmsarc/textfeat.hpp"
#include "mmsarc/visfeat.hpp"

namespace mmsarc::eval {

using corpus::Platform;
using corpus::Post;

enum class Method { SvmFusion, DeepFusion };
enum class Regime { Silver, GoldD50, GoldD80, GoldD100 };

enum class FeatureSet {
    // linear SVM
    Lexical,
    Subjectivity,
    Ngrams,
    Word2vec,
    Combination,
    VsfOnly,
    NgramsVsf,
    CombinationVsf,
    // fusion network
    Unigram,
    AvrOnly,
    UnigramAvr,
};

std::string_view to_string(Method m);
std::string_view to_string(Regime r);
std::string_view to_string(FeatureSet f);
Method parse_method(std::string_view s);
Regime parse_regime(std::string_view s);
FeatureSet parse_feature_set(std::string_view s);

Method method_of(FeatureSet f);
bool uses_text(FeatureSet f);
bool uses_image(FeatureSet f);
fusionnet::Mode net_mode(FeatureSet f);
double gold_threshold(Regime r);  // 0 for Silver

struct ExperimentConfig {
    Method method = Method::SvmFusion;
    std::vector<FeatureSet> feature_sets;
    double split_ratio = 0.5;
    std::uint64_t seed = 42;
    Regime regime = Regime::Silver;
    std::vector<Platform> platforms;  // empty: every platform in the corpus
    std::size_t min_count = 1;
    visfeat::MultiImagePolicy image_policy = visfeat::MultiImagePolicy::UnionMean;
    double concept_threshold = 0.0;
    svm::TrainConfig svm;
    fusionnet::NetTrainConfig net;
    std::size_t hidden = 512;
    std::size_t threads = 1;

    void validate() const;
};

// Everything an experiment reads. Immutable once assembled.
struct Dataset {
    std::vector<Post> posts;
    textfeat::LexResources resources;
    visfeat::ConceptVocab concepts;
    visfeat::FeatureStore images;
    std::vector<annotate::JudgmentSet> judgments;
};

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

// Stratified per class: each class is shuffled with the seed and the first
// floor(ratio * n_class) items go to training, the rest to test. Unlabeled
// posts are left out of both sides.
SplitIndices balanced_split_indices(std::span<const Post> posts, double ratio, std::uint64_t seed);
std::pair<std::vector<Post>, std::vector<Post>> balanced_split(std::span<const Post> posts, double ratio,
                                                               std::uint64_t seed);

double accuracy(std::span<const int> preds, std::span<const int> labels);

// +1 sarcastic, -1 non-sarcastic.
int signed_label(const Post& p);

// Everything fitted on a training split that feature extraction needs.
struct FeatureContext {
    const textfeat::LexResources* resources = nullptr;
    const visfeat::ConceptVocab* concepts = nullptr;
    const visfeat::FeatureStore* images = nullptr;
    const textfeat::NgramVocab* vocab = nullptr;
    visfeat::MultiImagePolicy image_policy = visfeat::MultiImagePolicy::UnionMean;
    double concept_threshold = 0.0;
};

// Blocks for one SVM feature set, in the fixed order text blocks then "vsf".
FeatureVector svm_features(FeatureSet f, const Post& p, const FeatureContext& ctx);

// Post indices into Dataset::posts for one platform. In the gold regimes the
// test side is the gold set and test_labels come from it.
struct CellSplit {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
    std::vector<int> test_labels;
};

CellSplit make_cell_split(const ExperimentConfig& cfg, const Dataset& data, Platform platform);

std::uint64_t cell_seed(const ExperimentConfig& cfg, FeatureSet f, Platform platform);

// A model fitted for one grid cell together with the vocabulary it was
// trained against. Exactly one of svm / net is set.
struct TrainedCell {
    FeatureSet feature_set = FeatureSet::Ngrams;
    Platform platform = Platform::IG;
    textfeat::NgramVocab vocab;
    std::optional<svm::SvmModel> svm;
    std::optional<fusionnet::Checkpoint> net;
};

TrainedCell train_cell(const ExperimentConfig& cfg, const Dataset& data, FeatureSet f, Platform platform,
                       const CellSplit& split);

struct PostPrediction {
    int label = 1;       // +1 sarcastic, -1 not
    double score = 0.0;  // SVM margin, or the network's sarcastic probability
};

std::vector<PostPrediction> predict_posts(const TrainedCell& model, const ExperimentConfig& cfg,
                                          const Dataset& data, std::span<const std::size_t> post_indices);

// "<feature set>.<platform>.model" and ".vocab" inside dir.
std::string cell_file_stem(FeatureSet f, Platform platform);
void save_cell(const std::string& dir, const TrainedCell& cell);
TrainedCell load_cell(const std::string& dir, FeatureSet f, Platform platform);

struct Cell {
    FeatureSet feature_set;
    Platform platform;
    Regime regime;
    double accuracy = 0.0;
    std::size_t n_train = 0;
    std::size_t n_test = 0;
    double seconds = 0.0;  // excluded from the reproducible report files
};

struct Report {
    Method method = Method::SvmFusion;
    Regime regime = Regime::Silver;
    std::uint64_t seed = 0;
    std::vector<FeatureSet> feature_sets;
    std::vector<Platform> platforms;
    std::vector<Cell> cells;  // feature-set major, platform minor

    const Cell* find(FeatureSet f, Platform p) const;
};

// Orders cells arriving in any order and checks the grid is complete.
Report assemble_report(Method method, Regime regime, std::uint64_t seed, std::vector<FeatureSet> feature_sets,
                       std::vector<Platform> platforms, std::vector<Cell> cells);

// Supplies the model of a cell; the default trains it on the cell's split.
using ModelSource = std::function<TrainedCell(FeatureSet, Platform, const CellSplit&)>;

// Platforms actually evaluated: cfg.platforms, or every labeled platform.
std::vector<Platform> experiment_platforms(const ExperimentConfig& cfg, const Dataset& data);

Report run_experiment(const ExperimentConfig& cfg, const Dataset& data, const ModelSource& source = {});

// Aligned table: feature sets as rows, platforms as columns, accuracy in %.
std::string format_table(const Report& r);
// "key = value" lines with exact (round-trip) accuracies.
std::string format_kv(const Report& r);
std::string format_timings(const Report& r);

}  // namespace mmsarc::eval
