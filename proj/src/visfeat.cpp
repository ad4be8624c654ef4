#include "mmsarc/visfeat.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mmsarc/error.hpp"
#include "mmsarc/format.hpp"

namespace mmsarc::visfeat {

ConceptVocab::ConceptVocab(std::vector<std::string> names) : names_(std::move(names)) {
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (!lookup_.emplace(names_[i], static_cast<std::uint32_t>(i)).second) {
            throw Error(ErrorKind::InvalidArgument, "duplicate concept '" + names_[i] + "'");
        }
    }
}

ConceptVocab ConceptVocab::read(std::istream& in) {
    std::vector<std::string> names;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream fields(line);
        std::string name;
        if (fields >> name && name.front() != '#') names.push_back(name);
    }
    return ConceptVocab(std::move(names));
}

ConceptVocab ConceptVocab::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open concept vocabulary '" + path + "'");
    return read(in);
}

void ConceptVocab::save(std::ostream& out) const {
    for (const auto& n : names_) out << n << '\n';
}

std::optional<std::uint32_t> ConceptVocab::index(const std::string& name) const {
    auto it = lookup_.find(name);
    if (it == lookup_.end()) return std::nullopt;
    return it->second;
}

const ImageFeatures* FeatureStore::find(const std::string& image_id) const {
    auto it = images_.find(image_id);
    return it == images_.end() ? nullptr : &it->second;
}

std::vector<std::string> FeatureStore::image_ids() const {
    std::vector<std::string> ids;
    ids.reserve(images_.size());
    for (const auto& [id, _] : images_) ids.push_back(id);
    std::sort(ids.begin(), ids.end());
    return ids;
}

ImageFeatures& FeatureStore::slot(const std::string& image_id) {
    auto& f = images_[image_id];
    f.image_id = image_id;
    return f;
}

void FeatureStore::add_detections(const std::string& image_id, std::vector<Detection> detections) {
    auto& f = slot(image_id);
    for (auto& d : detections) f.detections.push_back(std::move(d));
}

void FeatureStore::add_avr(const std::string& image_id, std::vector<double> avr) {
    if (avr.size() != avr_dim_) {
        throw Error(ErrorKind::DimensionMismatch, "AVR for image '" + image_id + "' has " +
                                                      std::to_string(avr.size()) + " values, expected " +
                                                      std::to_string(avr_dim_));
    }
    slot(image_id).avr = std::move(avr);
}

void FeatureStore::read_concepts(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream fields(line);
        std::string image_id;
        if (!(fields >> image_id) || image_id.front() == '#') continue;
        std::vector<Detection> dets;
        for (std::string item; fields >> item;) {
            Detection d;
            const auto colon = item.rfind(':');
            if (colon == std::string::npos) {
                d.name = item;
            } else {
                d.name = item.substr(0, colon);
                try {
                    std::size_t used = 0;
                    const std::string conf = item.substr(colon + 1);
                    d.confidence = std::stod(conf, &used);
                    if (used != conf.size()) throw std::invalid_argument(conf);
                } catch (const std::exception&) {
                    throw Error(ErrorKind::Parse, "concept file line " + std::to_string(lineno) +
                                                      ": bad confidence in '" + item + "'");
                }
            }
            dets.push_back(std::move(d));
        }
        add_detections(image_id, std::move(dets));
    }
}

void FeatureStore::load_concepts(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open concept file '" + path + "'");
    read_concepts(in);
}

void FeatureStore::read_avr(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorKind::Parse, "AVR file is empty");
    std::size_t count = 0, dim = 0;
    {
        std::istringstream header(line);
        if (!(header >> count >> dim)) throw Error(ErrorKind::Parse, "AVR header must be 'count dim'");
    }
    if (dim != avr_dim_) {
        throw Error(ErrorKind::DimensionMismatch,
                    "AVR file declares dim " + std::to_string(dim) + ", expected " + std::to_string(avr_dim_));
    }
    std::size_t seen = 0;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const char* cur = line.c_str();
        while (*cur == ' ' || *cur == '\t') ++cur;
        const char* id_end = cur;
        while (*id_end && *id_end != ' ' && *id_end != '\t') ++id_end;
        std::string image_id(cur, id_end);
        std::vector<double> values;
        values.reserve(dim);
        cur = id_end;
        for (;;) {
            char* next = nullptr;
            const double v = std::strtod(cur, &next);
            if (next == cur) break;
            values.push_back(v);
            cur = next;
        }
        while (*cur == ' ' || *cur == '\t' || *cur == '\r') ++cur;
        if (*cur) throw Error(ErrorKind::Parse, "AVR line for '" + image_id + "' has a non-numeric value");
        add_avr(image_id, std::move(values));
        ++seen;
    }
    if (seen != count) {
        throw Error(ErrorKind::Parse, "AVR header declares " + std::to_string(count) + " images, found " +
                                          std::to_string(seen));
    }
}

void FeatureStore::load_avr(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open AVR file '" + path + "'");
    read_avr(in);
}

void FeatureStore::write_concepts(std::ostream& out) const {
    for (const auto& id : image_ids()) {
        const auto& f = *find(id);
        out << id;
        for (const auto& d : f.detections) {
            out << ' ' << d.name;
            if (d.confidence) out << ':' << shortest(*d.confidence);
        }
        out << '\n';
    }
}

void FeatureStore::write_avr(std::ostream& out) const {
    std::vector<std::string> ids;
    for (const auto& id : image_ids()) {
        if (!find(id)->avr.empty()) ids.push_back(id);
    }
    out << ids.size() << ' ' << avr_dim_ << '\n';
    for (const auto& id : ids) {
        out << id;
        for (double v : find(id)->avr) out << ' ' << shortest(v);
        out << '\n';
    }
}

std::vector<std::uint32_t> vsf_onehot(const ImageFeatures& f, const ConceptVocab& v, double threshold) {
    std::vector<std::uint32_t> out;
    out.reserve(f.detections.size());
    for (const auto& d : f.detections) {
        const auto idx = v.index(d.name);
        if (!idx) throw Error(ErrorKind::UnknownConcept, "unknown concept '" + d.name + "'");
        if (threshold > 0.0 && d.confidence && *d.confidence < threshold) continue;
        out.push_back(*idx);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

ImageBlocks post_image_block(const corpus::Post& p, const FeatureStore& store, const ConceptVocab& v,
                             MultiImagePolicy policy, double threshold) {
    std::vector<const ImageFeatures*> images;
    for (const auto& id : p.image_ids) {
        const auto* f = store.find(id);
        if (!f) throw Error(ErrorKind::MissingImage, "post '" + p.id + "' references unknown image '" + id + "'");
        images.push_back(f);
        if (policy == MultiImagePolicy::FirstImage) break;
    }
    ImageBlocks out;
    if (images.empty()) return out;
    // Canonical summation order keeps the mean bit-identical under image
    // permutations.
    std::sort(images.begin(), images.end(),
              [](const ImageFeatures* a, const ImageFeatures* b) { return a->image_id < b->image_id; });

    for (const auto* f : images) {
        auto idx = vsf_onehot(*f, v, threshold);
        out.vsf.insert(out.vsf.end(), idx.begin(), idx.end());
    }
    std::sort(out.vsf.begin(), out.vsf.end());
    out.vsf.erase(std::unique(out.vsf.begin(), out.vsf.end()), out.vsf.end());

    const auto with_avr = std::count_if(images.begin(), images.end(), [](const auto* f) { return !f->avr.empty(); });
    if (with_avr == 0) return out;
    if (static_cast<std::size_t>(with_avr) != images.size()) {
        throw Error(ErrorKind::MissingImage, "post '" + p.id + "' has images without an adapted representation");
    }
    out.avr.assign(store.avr_dim(), 0.0);
    for (const auto* f : images) {
        for (std::size_t k = 0; k < out.avr.size(); ++k) out.avr[k] += f->avr[k];
    }
    for (auto& x : out.avr) x /= static_cast<double>(images.size());
    return out;
}

}  // namespace mmsarc::visfeat
