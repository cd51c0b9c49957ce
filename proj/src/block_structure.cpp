#include "subdiag/block_structure.hpp"

#include <numeric>
#include <stdexcept>

namespace subdiag {

BlockStructure::BlockStructure(std::vector<int> sizes) : sizes_(std::move(sizes)) {
    if (sizes_.empty()) throw std::invalid_argument("BlockStructure: empty block list");
    offsets_.reserve(sizes_.size());
    int off = 0;
    for (int s : sizes_) {
        if (s < 1) throw std::invalid_argument("BlockStructure: block sizes must be positive");
        offsets_.push_back(off);
        off += s;
    }
    n_ = off;
}

BlockStructure BlockStructure::scalar(int n) { return BlockStructure(std::vector<int>(n, 1)); }

BlockStructure BlockStructure::full(int n) { return BlockStructure({n}); }

int BlockStructure::block_of(int i) const {
    if (i < 0 || i >= n_) throw std::out_of_range("BlockStructure::block_of");
    int k = 0;
    while (k + 1 < block_count() && i >= offsets_[k + 1]) ++k;
    return k;
}

}  // namespace subdiag
