#pragma once

#include <vector>

#include "subdiag/matrix.hpp"

namespace subdiag {

/// Partition of {0..n-1} into consecutive blocks. Defines the diagonal
/// algebra D (block-diagonal matrices), the subalgebra A (block upper
/// triangular) and its ideal A0 = A with vanishing block diagonal.
class BlockStructure {
public:
    explicit BlockStructure(std::vector<int> sizes);

    /// n blocks of size 1: A is the scalar upper triangular algebra.
    static BlockStructure scalar(int n);
    /// one block of size n: A = D = M.
    static BlockStructure full(int n);

    int dim() const { return n_; }
    int block_count() const { return static_cast<int>(sizes_.size()); }
    int block_size(int k) const { return sizes_[k]; }
    int block_offset(int k) const { return offsets_[k]; }
    const std::vector<int>& sizes() const { return sizes_; }

    /// Block index containing coordinate i.
    int block_of(int i) const;

    bool operator==(const BlockStructure& o) const { return sizes_ == o.sizes_; }

private:
    std::vector<int> sizes_;
    std::vector<int> offsets_;
    int n_ = 0;
};

}  // namespace subdiag
