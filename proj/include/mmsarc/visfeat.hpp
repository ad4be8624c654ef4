#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mmsarc/corpus.hpp"

namespace mmsarc::visfeat {

inline constexpr std::size_t kConceptCount = 1570;
inline constexpr std::size_t kAvrDim = 4096;

class ConceptVocab {
public:
    ConceptVocab() = default;
    explicit ConceptVocab(std::vector<std::string> names);

    // One concept name per line.
    static ConceptVocab read(std::istream& in);
    static ConceptVocab load(const std::string& path);
    void save(std::ostream& out) const;

    std::optional<std::uint32_t> index(const std::string& name) const;
    std::size_t size() const { return names_.size(); }
    const std::vector<std::string>& names() const { return names_; }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, std::uint32_t> lookup_;
};

struct Detection {
    std::string name;
    std::optional<double> confidence;
};

struct ImageFeatures {
    std::string image_id;
    std::vector<Detection> detections;
    std::vector<double> avr;  // empty when no adapted representation is stored
};

// Precomputed per-image features keyed by image id. Immutable after load.
class FeatureStore {
public:
    explicit FeatureStore(std::size_t avr_dim = kAvrDim) : avr_dim_(avr_dim) {}

    std::size_t avr_dim() const { return avr_dim_; }
    const ImageFeatures* find(const std::string& image_id) const;
    bool contains(const std::string& image_id) const { return find(image_id) != nullptr; }
    std::size_t size() const { return images_.size(); }
    std::vector<std::string> image_ids() const;

    void add_detections(const std::string& image_id, std::vector<Detection> detections);
    // Rejects vectors whose length differs from avr_dim().
    void add_avr(const std::string& image_id, std::vector<double> avr);

    // Lines "image_id concept[:confidence] ...".
    void read_concepts(std::istream& in);
    void load_concepts(const std::string& path);
    // Header "count dim", then lines "image_id v1 ... vdim". The declared dim
    // must equal avr_dim().
    void read_avr(std::istream& in);
    void load_avr(const std::string& path);

    void write_concepts(std::ostream& out) const;
    void write_avr(std::ostream& out) const;

private:
    ImageFeatures& slot(const std::string& image_id);

    std::size_t avr_dim_;
    std::unordered_map<std::string, ImageFeatures> images_;
};

// Index set of detected concepts. Confidences never change the output at the
// default threshold of 0; a positive threshold drops detections whose stated
// confidence is below it.
std::vector<std::uint32_t> vsf_onehot(const ImageFeatures& f, const ConceptVocab& v, double threshold = 0.0);

enum class MultiImagePolicy { UnionMean, FirstImage };

struct ImageBlocks {
    std::vector<std::uint32_t> vsf;
    std::vector<double> avr;  // empty when the images carry no AVR
};

ImageBlocks post_image_block(const corpus::Post& p, const FeatureStore& store, const ConceptVocab& v,
                             MultiImagePolicy policy = MultiImagePolicy::UnionMean, double threshold = 0.0);

}  // namespace mmsarc::visfeat
