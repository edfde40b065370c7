#pragma once

// Canonical set partitions of [n] stored as restricted growth strings (RGS).
// Equality of Partition objects is equality of equivalence classes.

#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bsf {

class Partition {
 public:
  /// Canonicalizes arbitrary integer labels (any label bijection maps to the same RGS).
  static Partition from_labels(std::span<const int> raw_labels);
  static Partition one_block(int n);
  static Partition singletons(int n);
  /// Parses "0,0,1" (labels need not be canonical).
  static Partition parse(std::string_view text);

  int size() const { return static_cast<int>(labels_.size()); }
  int num_blocks() const { return static_cast<int>(sizes_.size()); }
  std::span<const int> labels() const { return labels_; }
  int label(int i) const { return labels_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& sizes() const { return sizes_; }
  std::vector<std::vector<int>> blocks() const;
  std::string to_string() const;

  friend bool operator==(const Partition&, const Partition&) = default;
  friend auto operator<=>(const Partition& a, const Partition& b) { return a.labels_ <=> b.labels_; }

 private:
  explicit Partition(std::vector<int> rgs);

  std::vector<int> labels_;
  std::vector<int> sizes_;
};

Partition canonicalize(std::span<const int> raw_labels);

/// One partition visited during enumeration. block_masks[k] holds bit i iff point i is in block k.
struct PartitionView {
  std::span<const int> labels;
  int num_blocks = 0;
  std::span<const std::uint32_t> block_masks;
};

struct BlockBounds {
  int min_blocks = 1;
  int max_blocks = std::numeric_limits<int>::max();
};

inline constexpr int kPartitionEnumerationCap = 13;

/// Visits every equivalence class of partitions of [n] with block count in bounds, once each,
/// in RGS lexicographic order. Returns the number visited. Throws CapExceeded for n > 13.
std::uint64_t for_each_partition(int n, BlockBounds bounds,
                                 const std::function<void(const PartitionView&)>& visit);

std::vector<Partition> enumerate_partitions(int n, BlockBounds bounds = {});

/// W_ij = block_i(first) ∩ block_j(second).
struct RefinementCells {
  int rows = 0;
  int cols = 0;
  std::vector<std::vector<int>> cells;  // row-major rows x cols
  int nonempty_count = 0;

  const std::vector<int>& cell(int i, int j) const {
    return cells[static_cast<std::size_t>(i * cols + j)];
  }
  /// Every block of the first partition lies inside one block of the second.
  bool first_refines_second() const { return nonempty_count == rows; }
};

RefinementCells refinement_cells(const Partition& first, const Partition& second);
bool is_refinement(const Partition& finer, const Partition& coarser);

/// Permutation-invariant Hamming distance; unequal block counts are padded with empty blocks.
int hamming_distance(const Partition& a, const Partition& b);

/// Maximum total weight of a one-to-one row->column assignment on a square matrix.
long long max_weight_assignment(const std::vector<std::vector<long long>>& weight);

}  // namespace bsf
