#include "bsf/partitions.hpp"

#include <algorithm>
#include <charconv>
#include <unordered_map>

#include "bsf/common.hpp"

namespace bsf {

Partition::Partition(std::vector<int> rgs) : labels_(std::move(rgs)) {
  int next = 0;
  for (int l : labels_) {
    if (l < 0 || l > next) throw InvalidArgument("labels are not a restricted growth string");
    if (l == next) {
      sizes_.push_back(0);
      ++next;
    }
    ++sizes_[l];
  }
}

Partition Partition::from_labels(std::span<const int> raw_labels) {
  if (raw_labels.empty()) throw InvalidArgument("partition of an empty set");
  std::unordered_map<int, int> relabel;
  std::vector<int> rgs;
  rgs.reserve(raw_labels.size());
  for (int raw : raw_labels) {
    auto [it, inserted] = relabel.try_emplace(raw, static_cast<int>(relabel.size()));
    rgs.push_back(it->second);
  }
  return Partition(std::move(rgs));
}

Partition Partition::one_block(int n) {
  if (n < 1) throw InvalidArgument("partition size must be positive");
  return Partition(std::vector<int>(n, 0));
}

Partition Partition::singletons(int n) {
  if (n < 1) throw InvalidArgument("partition size must be positive");
  std::vector<int> rgs(n);
  for (int i = 0; i < n; ++i) rgs[i] = i;
  return Partition(std::move(rgs));
}

Partition Partition::parse(std::string_view text) {
  std::vector<int> raw;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view token = text.substr(pos, end - pos);
    while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
    while (!token.empty() && (token.back() == ' ' || token.back() == '\r')) token.remove_suffix(1);
    int value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size()) {
      throw InvalidArgument("malformed partition label '" + std::string(token) + "'");
    }
    raw.push_back(value);
    pos = end + 1;
  }
  return from_labels(raw);
}

std::vector<std::vector<int>> Partition::blocks() const {
  std::vector<std::vector<int>> out(sizes_.size());
  for (std::size_t k = 0; k < sizes_.size(); ++k) out[k].reserve(sizes_[k]);
  for (int i = 0; i < size(); ++i) out[labels_[i]].push_back(i);
  return out;
}

std::string Partition::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (i) out.push_back(',');
    out += std::to_string(labels_[i]);
  }
  return out;
}

Partition canonicalize(std::span<const int> raw_labels) { return Partition::from_labels(raw_labels); }

namespace {

struct Enumerator {
  int n;
  BlockBounds bounds;
  const std::function<void(const PartitionView&)>& visit;
  std::vector<int> labels;
  std::vector<std::uint32_t> masks;
  std::uint64_t count = 0;

  void run(int i, int k) {
    if (i == n) {
      if (k >= bounds.min_blocks) {
        ++count;
        visit(PartitionView{labels, k, std::span<const std::uint32_t>(masks.data(), k)});
      }
      return;
    }
    const int remaining_after = n - i - 1;
    const std::uint32_t bit = 1u << i;
    if (k + remaining_after >= bounds.min_blocks) {
      for (int b = 0; b < k; ++b) {
        labels[i] = b;
        masks[b] |= bit;
        run(i + 1, k);
        masks[b] &= ~bit;
      }
    }
    if (k < bounds.max_blocks && k + 1 + remaining_after >= bounds.min_blocks) {
      labels[i] = k;
      masks[k] = bit;
      run(i + 1, k + 1);
      masks[k] = 0;
    }
  }
};

}  // namespace

std::uint64_t for_each_partition(int n, BlockBounds bounds,
                                 const std::function<void(const PartitionView&)>& visit) {
  if (n < 1) throw InvalidArgument("partition size must be positive");
  if (n > kPartitionEnumerationCap) {
    throw CapExceeded("enumeration of partitions is capped at n = " +
                      std::to_string(kPartitionEnumerationCap) + " (got " + std::to_string(n) + ")");
  }
  if (bounds.min_blocks < 1) bounds.min_blocks = 1;
  if (bounds.max_blocks < bounds.min_blocks) return 0;
  Enumerator e{n, bounds, visit, std::vector<int>(n, 0),
               std::vector<std::uint32_t>(n, 0u)};
  e.run(0, 0);
  return e.count;
}

std::vector<Partition> enumerate_partitions(int n, BlockBounds bounds) {
  std::vector<Partition> out;
  for_each_partition(n, bounds, [&](const PartitionView& v) { out.push_back(Partition::from_labels(v.labels)); });
  return out;
}

RefinementCells refinement_cells(const Partition& first, const Partition& second) {
  if (first.size() != second.size()) throw InvalidArgument("partitions have different sizes");
  RefinementCells rc;
  rc.rows = first.num_blocks();
  rc.cols = second.num_blocks();
  rc.cells.assign(rc.rows * rc.cols, {});
  for (int i = 0; i < first.size(); ++i) {
    rc.cells[first.label(i) * rc.cols + second.label(i)].push_back(i);
  }
  rc.nonempty_count = static_cast<int>(
      std::count_if(rc.cells.begin(), rc.cells.end(), [](const auto& c) { return !c.empty(); }));
  return rc;
}

bool is_refinement(const Partition& finer, const Partition& coarser) {
  return refinement_cells(finer, coarser).first_refines_second();
}

long long max_weight_assignment(const std::vector<std::vector<long long>>& weight) {
  // Hungarian algorithm (potentials form) minimizing the negated weights.
  const int n = static_cast<int>(weight.size());
  if (n == 0) return 0;
  constexpr long long kInf = std::numeric_limits<long long>::max() / 4;
  std::vector<long long> u(n + 1, 0), v(n + 1, 0);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  auto cost = [&](int i, int j) { return -weight[i - 1][j - 1]; };
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<long long> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = match[j0];
      long long delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const long long cur = cost(i0, j) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0);
  }
  long long total = 0;
  for (int j = 1; j <= n; ++j) {
    total += weight[match[j] - 1][j - 1];
  }
  return total;
}

int hamming_distance(const Partition& a, const Partition& b) {
  if (a.size() != b.size()) throw InvalidArgument("partitions have different sizes");
  const int k = std::max(a.num_blocks(), b.num_blocks());
  std::vector<std::vector<long long>> confusion(k, std::vector<long long>(k, 0));
  for (int i = 0; i < a.size(); ++i) {
    ++confusion[a.label(i)][b.label(i)];
  }
  return a.size() - static_cast<int>(max_weight_assignment(confusion));
}

}  // namespace bsf
