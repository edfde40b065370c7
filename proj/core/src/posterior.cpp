#include "bsf/posterior.hpp"

#include <algorithm>

namespace bsf {

void BsfConfig::validate() const {
  if (!std::isfinite(log_delta) || !std::isfinite(log_lambda)) {
    throw InvalidArgument("log delta and log lambda must be finite");
  }
  kernel.validate();
  if (enum_cap < 1 || enum_cap > kPartitionEnumerationCap) {
    throw InvalidArgument("enum_cap must lie in [1, " + std::to_string(kPartitionEnumerationCap) + "]");
  }
  for (double r : log_root) {
    if (!std::isfinite(r)) throw InvalidArgument("root log values must be finite");
  }
}

BsfModel::BsfModel(const Dataset& data, BsfConfig cfg)
    : BsfModel(WeightMatrix::from_dataset(data, cfg.kernel), std::move(cfg)) {}

BsfModel::BsfModel(WeightMatrix weights, BsfConfig cfg)
    : weights_(std::move(weights)), cfg_(std::move(cfg)) {
  cfg_.validate();
  if (!cfg_.log_root.empty() && static_cast<int>(cfg_.log_root.size()) != weights_.size()) {
    throw InvalidArgument("root values must be given for every point");
  }
}

double BsfModel::log_det_block(std::span<const int> block) const {
  const double m = static_cast<double>(block.size());
  if (block.size() == 1) return 0.0;
  return std::log(m) + log_tree_weight(weights_.log_weights(), block);
}

double BsfModel::block_log_term(std::span<const int> block) const {
  if (block.empty()) throw InvalidArgument("empty block");
  if (cfg_.log_root.empty()) return cfg_.log_delta_lambda() + log_det_block(block);
  LogSumAccumulator roots;
  for (int i : block) roots.add(cfg_.log_root[i]);
  const double tree = block.size() == 1 ? 0.0 : log_tree_weight(weights_.log_weights(), block);
  return cfg_.log_lambda + tree + roots.value();
}

double BsfModel::log_labeled_weight(const Partition& p) const {
  if (p.size() != size()) throw InvalidArgument("partition size does not match data");
  double total = 0.0;
  for (const auto& block : p.blocks()) total += block_log_term(block);
  return total;
}

double BsfModel::log_class_weight(const Partition& p) const {
  return log_factorial(p.num_blocks()) + log_labeled_weight(p);
}

double BsfModel::log_posterior_ratio(const Partition& p1, const Partition& p2) const {
  return log_class_weight(p1) - log_class_weight(p2);
}

double BsfModel::log_ratio_via_refinement(const Partition& p1, const Partition& p2) const {
  if (!cfg_.log_root.empty()) {
    throw InvalidArgument("refinement decomposition is defined for the flat root");
  }
  const RefinementCells rc = refinement_cells(p1, p2);
  const auto b1 = p1.blocks();
  const auto b2 = p2.blocks();
  auto cell_det = [&](int i, int j) {
    const auto& c = rc.cell(i, j);
    return c.empty() ? 0.0 : log_det_block(c);
  };
  double first = 0.0;
  for (int i = 0; i < rc.rows; ++i) {
    first += log_det_block(b1[i]);
    for (int j = 0; j < rc.cols; ++j) first -= cell_det(i, j);
  }
  double second = 0.0;
  for (int j = 0; j < rc.cols; ++j) {
    for (int i = 0; i < rc.rows; ++i) second += cell_det(i, j);
    second -= log_det_block(b2[j]);
  }
  const double labeled = (rc.rows - rc.cols) * cfg_.log_delta_lambda() + first + second;
  return labeled + log_factorial(rc.rows) - log_factorial(rc.cols);
}

namespace {

int hamming_to(std::span<const int> labels, int k, const Partition& truth) {
  const int kk = std::max(k, truth.num_blocks());
  std::vector<std::vector<long long>> confusion(kk, std::vector<long long>(kk, 0));
  for (std::size_t i = 0; i < labels.size(); ++i) ++confusion[labels[i]][truth.label(static_cast<int>(i))];
  return static_cast<int>(labels.size()) - static_cast<int>(max_weight_assignment(confusion));
}

}  // namespace

PosteriorTable exact_posterior(const BsfModel& model, const PosteriorOptions& options) {
  const int n = model.size();
  const BsfConfig& cfg = model.config();
  if (n > cfg.enum_cap) {
    throw CapExceeded("exact posterior is capped at n = " + std::to_string(cfg.enum_cap) +
                      " (got " + std::to_string(n) + ")");
  }
  if (options.truth && options.truth->size() != n) {
    throw InvalidArgument("truth partition size does not match data");
  }
  if (options.expected_hamming && !options.truth) {
    throw InvalidArgument("expected Hamming distance needs a truth partition");
  }

  // Block terms for every non-empty subset, indexed by bitmask.
  const std::uint32_t full = (1u << n) - 1u;
  std::vector<double> block_term(std::size_t{full} + 1, kNegInf);
  std::vector<int> members;
  for (std::uint32_t mask = 1; mask <= full; ++mask) {
    members.clear();
    for (int i = 0; i < n; ++i)
      if (mask >> i & 1u) members.push_back(i);
    block_term[mask] = model.block_log_term(members);
  }

  const int k_hi = std::min(n, options.bounds.max_blocks);
  std::vector<double> log_fact(n + 1);
  for (int k = 0; k <= n; ++k) log_fact[k] = log_factorial(k);

  PosteriorTable table;
  table.n = n;
  std::vector<LogSumAccumulator> per_k(n + 1);
  std::vector<LogSumAccumulator> per_distance(options.expected_hamming ? n + 1 : 0);
  std::vector<int> map_labels;
  double best = kNegInf;

  table.class_count = for_each_partition(n, options.bounds, [&](const PartitionView& v) {
    double lw = log_fact[v.num_blocks];
    for (std::uint32_t m : v.block_masks) lw += block_term[m];
    per_k[v.num_blocks].add(lw);
    if (lw > best) {
      best = lw;
      map_labels.assign(v.labels.begin(), v.labels.end());
    }
    if (options.retain_entries) {
      table.entries.push_back({Partition::from_labels(v.labels), v.num_blocks, lw, 0.0});
    }
    if (options.expected_hamming) {
      per_distance[hamming_to(v.labels, v.num_blocks, *options.truth)].add(lw);
    }
  });
  if (table.class_count == 0) throw InvalidArgument("block bounds admit no partition");

  LogSumAccumulator total;
  for (const auto& acc : per_k) total.merge(acc);
  table.log_normalizer = total.value();
  if (!std::isfinite(table.log_normalizer)) throw NumericalError("posterior normalizer is not finite");

  table.k_marginal.assign(k_hi + 1, 0.0);
  for (int k = 1; k <= k_hi; ++k) table.k_marginal[k] = std::exp(per_k[k].value() - table.log_normalizer);
  for (auto& e : table.entries) e.probability = std::exp(e.log_weight - table.log_normalizer);

  table.map = Partition::from_labels(map_labels);
  table.map_log_weight = best;
  table.map_probability = std::exp(best - table.log_normalizer);

  if (options.truth) {
    const int kt = options.truth->num_blocks();
    const bool admitted = kt >= options.bounds.min_blocks && kt <= options.bounds.max_blocks;
    table.truth_probability =
        admitted ? std::exp(model.log_class_weight(*options.truth) - table.log_normalizer) : 0.0;
  }
  if (options.expected_hamming) {
    double e = 0.0;
    for (int d = 1; d <= n; ++d) e += d * std::exp(per_distance[d].value() - table.log_normalizer);
    table.expected_hamming = e;
  }
  return table;
}

PosteriorTable exact_posterior(const Dataset& data, const BsfConfig& cfg, std::optional<int> max_k) {
  PosteriorOptions opts;
  if (max_k) {
    if (*max_k < 1) throw InvalidArgument("max_k must be positive");
    opts.bounds.max_blocks = *max_k;
  }
  return exact_posterior(BsfModel(data, cfg), opts);
}

Partition map_partition(const PosteriorTable& table) {
  if (table.class_count == 0) throw InvalidArgument("empty posterior table");
  return table.map;
}

double log_labeled_weight(const Partition& p, const Dataset& data, const BsfConfig& cfg) {
  return BsfModel(data, cfg).log_labeled_weight(p);
}

double log_class_weight(const Partition& p, const Dataset& data, const BsfConfig& cfg) {
  return BsfModel(data, cfg).log_class_weight(p);
}

double log_posterior_ratio(const Partition& p1, const Partition& p2, const Dataset& data,
                           const BsfConfig& cfg) {
  return BsfModel(data, cfg).log_posterior_ratio(p1, p2);
}

}  // namespace bsf
