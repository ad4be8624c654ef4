#include "mmsarc/feature_vector.hpp"

#include <algorithm>

#include "mmsarc/error.hpp"

namespace mmsarc {

std::size_t Block::dim() const {
    if (const auto* s = std::get_if<SparseBlock>(&data)) return s->dim;
    return std::get<DenseBlock>(data).values.size();
}

void FeatureVector::add(Block block) {
    if (find(block.name)) throw Error(ErrorKind::DuplicateBlock, "duplicate feature block '" + block.name + "'");
    if (auto* s = std::get_if<SparseBlock>(&block.data)) {
        std::sort(s->indices.begin(), s->indices.end());
        s->indices.erase(std::unique(s->indices.begin(), s->indices.end()), s->indices.end());
        if (!s->indices.empty() && s->indices.back() >= s->dim) {
            throw Error(ErrorKind::DimensionMismatch,
                        "sparse index out of range in block '" + block.name + "'");
        }
    }
    total_dim_ += block.dim();
    blocks_.push_back(std::move(block));
}

void FeatureVector::add_dense(std::string name, std::vector<double> values) {
    add(Block{std::move(name), DenseBlock{std::move(values)}});
}

void FeatureVector::add_sparse(std::string name, std::size_t dim, std::vector<std::uint32_t> indices) {
    add(Block{std::move(name), SparseBlock{dim, std::move(indices)}});
}

const Block* FeatureVector::find(const std::string& name) const {
    for (const auto& b : blocks_) {
        if (b.name == name) return &b;
    }
    return nullptr;
}

std::vector<BlockLayout> FeatureVector::layout() const {
    std::vector<BlockLayout> out;
    std::size_t offset = 0;
    for (const auto& b : blocks_) {
        out.push_back({b.name, offset, b.dim(), b.is_sparse()});
        offset += b.dim();
    }
    return out;
}

std::vector<std::pair<std::uint32_t, double>> FeatureVector::nonzeros() const {
    std::vector<std::pair<std::uint32_t, double>> out;
    std::size_t offset = 0;
    for (const auto& b : blocks_) {
        if (b.is_sparse()) {
            for (auto idx : b.sparse().indices) out.emplace_back(static_cast<std::uint32_t>(offset + idx), 1.0);
        } else {
            const auto& v = b.dense().values;
            for (std::size_t k = 0; k < v.size(); ++k) {
                if (v[k] != 0.0) out.emplace_back(static_cast<std::uint32_t>(offset + k), v[k]);
            }
        }
        offset += b.dim();
    }
    return out;
}

std::vector<double> FeatureVector::to_dense() const {
    std::vector<double> out(total_dim_, 0.0);
    for (const auto& [idx, v] : nonzeros()) out[idx] = v;
    return out;
}

}  // namespace mmsarc
