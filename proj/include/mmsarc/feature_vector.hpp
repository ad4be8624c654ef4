#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace mmsarc {

struct DenseBlock {
    std::vector<double> values;
};

// Binary presence indicators over a vocabulary of size dim. Indices are
// sorted and unique.
struct SparseBlock {
    std::size_t dim = 0;
    std::vector<std::uint32_t> indices;
};

struct Block {
    std::string name;
    std::variant<DenseBlock, SparseBlock> data;

    std::size_t dim() const;
    bool is_sparse() const { return std::holds_alternative<SparseBlock>(data); }
    const DenseBlock& dense() const { return std::get<DenseBlock>(data); }
    const SparseBlock& sparse() const { return std::get<SparseBlock>(data); }
};

struct BlockLayout {
    std::string name;
    std::size_t offset = 0;
    std::size_t dim = 0;
    bool sparse = false;

    bool operator==(const BlockLayout&) const = default;
};

// Ordered named blocks. Block names are unique within a vector.
class FeatureVector {
public:
    FeatureVector() = default;

    void add(Block block);
    void add_dense(std::string name, std::vector<double> values);
    // Sorts and deduplicates; every index must be < dim.
    void add_sparse(std::string name, std::size_t dim, std::vector<std::uint32_t> indices);

    const std::vector<Block>& blocks() const { return blocks_; }
    std::size_t total_dim() const { return total_dim_; }
    const Block* find(const std::string& name) const;

    std::vector<BlockLayout> layout() const;

    // Flattened (index, value) pairs in global coordinates, zeros omitted.
    std::vector<std::pair<std::uint32_t, double>> nonzeros() const;
    std::vector<double> to_dense() const;

private:
    std::vector<Block> blocks_;
    std::size_t total_dim_ = 0;
};

}  // namespace mmsarc
