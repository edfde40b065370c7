#pragma once

// Integrated BSF posterior over partition equivalence classes.
//
// Labeled weight of (V_1..V_K):  sum_k [ log lambda + log|L_{V_k}[1]| + log sum_{i in V_k} r(y_i) ]
// which for a flat root r = delta is K log(delta lambda) + sum_k log|L_{V_k} + J/n_k|.
// The class weight adds log K! for the K! labelings of one equivalence class.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "bsf/common.hpp"
#include "bsf/dataset.hpp"
#include "bsf/forest_linalg.hpp"
#include "bsf/kernels.hpp"
#include "bsf/partitions.hpp"

namespace bsf {

struct BsfConfig {
  double log_delta = 0.0;
  double log_lambda = 0.0;
  KernelSpec kernel;
  int enum_cap = 12;
  /// Per-point log r(y_i) for a non-flat root; empty means the flat root delta.
  std::vector<double> log_root;

  double log_delta_lambda() const { return log_delta + log_lambda; }
  void validate() const;
};

class BsfModel {
 public:
  BsfModel(const Dataset& data, BsfConfig cfg);
  BsfModel(WeightMatrix weights, BsfConfig cfg);

  int size() const { return weights_.size(); }
  const BsfConfig& config() const { return cfg_; }
  const WeightMatrix& weights() const { return weights_; }

  /// Contribution of one block to the labeled log weight.
  double block_log_term(std::span<const int> block) const;
  double log_labeled_weight(const Partition& p) const;
  double log_class_weight(const Partition& p) const;
  double log_posterior_ratio(const Partition& p1, const Partition& p2) const;
  /// Class log ratio assembled from the refinement cells W_ij = V_i(p1) ∩ V_j(p2):
  /// (delta lambda)^{K1-K2} * prod_i |L_{V_i}|/prod_j |L_{W_ij}| * prod_j prod_i |L_{W_ij}|/|L_{V^2_j}|.
  double log_ratio_via_refinement(const Partition& p1, const Partition& p2) const;

 private:
  double log_det_block(std::span<const int> block) const;

  WeightMatrix weights_;
  BsfConfig cfg_;
};

struct PosteriorOptions {
  BlockBounds bounds;
  std::optional<Partition> truth;
  /// Keep every (partition, weight, probability) row.
  bool retain_entries = true;
  /// E[d_H(V, truth) | y]; needs truth and costs one assignment per class.
  bool expected_hamming = false;
};

struct PosteriorEntry {
  Partition partition;
  int num_blocks = 0;
  double log_weight = 0.0;
  double probability = 0.0;
};

struct PosteriorTable {
  int n = 0;
  std::uint64_t class_count = 0;
  std::vector<PosteriorEntry> entries;
  double log_normalizer = kNegInf;
  /// k_marginal[k] = posterior probability of exactly k blocks (index 0 unused).
  std::vector<double> k_marginal;
  Partition map = Partition::one_block(1);
  double map_log_weight = kNegInf;
  double map_probability = 0.0;
  std::optional<double> truth_probability;
  std::optional<double> expected_hamming;
};

PosteriorTable exact_posterior(const BsfModel& model, const PosteriorOptions& options = {});
PosteriorTable exact_posterior(const Dataset& data, const BsfConfig& cfg,
                               std::optional<int> max_k = std::nullopt);

Partition map_partition(const PosteriorTable& table);

double log_labeled_weight(const Partition& p, const Dataset& data, const BsfConfig& cfg);
double log_class_weight(const Partition& p, const Dataset& data, const BsfConfig& cfg);
double log_posterior_ratio(const Partition& p1, const Partition& p2, const Dataset& data,
                           const BsfConfig& cfg);

}  // namespace bsf
