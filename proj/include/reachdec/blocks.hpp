#pragma once

#include <Eigen/Core>

#include <vector>

namespace reachdec {

/// Consecutive index range [start, start + size) of one block.
struct BlockRange {
  int start;
  int size;
};

/// Partition of {0..n-1} into consecutive blocks of size 2; when n is odd the
/// last block is a single coordinate.
class BlockStructure {
 public:
  explicit BlockStructure(int n);

  int dim() const { return n_; }
  int count() const { return static_cast<int>(blocks_.size()); }
  const BlockRange& operator[](int i) const { return blocks_[static_cast<std::size_t>(i)]; }
  const std::vector<BlockRange>& ranges() const { return blocks_; }

  /// Block containing coordinate `var` (0-based).
  int block_of(int var) const { return var / 2; }

  /// Projection matrix pi_i (size_i x n).
  Eigen::MatrixXd projection(int i) const;

  std::vector<int> all_blocks() const;

 private:
  int n_;
  std::vector<BlockRange> blocks_;
};

}  // namespace reachdec
