#pragma once

// MCMC over partition classes: random-scan Gibbs sweeps plus split-merge Metropolis-Hastings.

#include <cstdint>
#include <unordered_map>
#include <utility>
#include <vector>

#include "bsf/common.hpp"
#include "bsf/posterior.hpp"

namespace bsf {

struct ChainSchedule {
  long long iters = 1000;
  long long burnin = 0;
  long long thin = 1;
  /// Cache self-audit period in iterations; 0 disables.
  long long audit_every = 1000;

  void validate() const;
};

struct MoveStats {
  std::uint64_t proposed = 0;
  std::uint64_t accepted = 0;
  double rate() const { return proposed ? static_cast<double>(accepted) / proposed : 0.0; }
};

class ChainState {
 public:
  ChainState(const BsfModel& model, const Partition& initial, std::uint64_t seed);

  Partition partition() const;
  int size() const { return static_cast<int>(label_.size()); }
  int num_blocks() const { return static_cast<int>(blocks_.size()); }
  double log_class_weight() const;
  int block_of(int i) const { return label_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& block(int b) const { return blocks_[static_cast<std::size_t>(b)]; }
  std::uint64_t step_count() const { return steps_; }
  Rng& rng() { return rng_; }

  /// Largest |cached - recomputed| block term (relative to max(1, |term|)).
  double audit(const BsfModel& model) const;

  MoveStats gibbs_stats;
  MoveStats split_stats;
  MoveStats merge_stats;

 private:
  friend struct ChainOps;

  double term(const BsfModel& model, const std::vector<int>& members);
  void remove_block(int b);

  std::vector<int> label_;
  std::vector<std::vector<int>> blocks_;
  std::vector<double> terms_;
  std::unordered_map<std::uint64_t, double> memo_;
  Rng rng_;
  std::uint64_t steps_ = 0;
};

void gibbs_sweep(ChainState& state, const BsfModel& model);
/// Returns true when the proposal was accepted.
bool split_merge_move(ChainState& state, const BsfModel& model);

class ChainSummary {
 public:
  explicit ChainSummary(int n = 0);

  void record(const Partition& p);
  /// Associative reduction of two summaries of the same n.
  void merge(const ChainSummary& other);

  int n() const { return n_; }
  std::uint64_t retained() const { return retained_; }
  /// k_histogram()[k] = number of retained samples with k blocks.
  const std::vector<std::uint64_t>& k_histogram() const { return k_hist_; }
  Eigen::MatrixXd coclustering() const;
  const std::vector<Partition>& samples() const { return samples_; }

  MoveStats gibbs;
  MoveStats split;
  MoveStats merge_moves;

 private:
  int n_;
  std::uint64_t retained_ = 0;
  std::vector<std::uint64_t> k_hist_;
  std::vector<std::uint64_t> co_counts_;
  std::vector<Partition> samples_;
};

ChainSummary run_chain(const BsfModel& model, const ChainSchedule& schedule, std::uint64_t seed);
ChainSummary run_chain(const BsfModel& model, const ChainSchedule& schedule, std::uint64_t seed,
                       const Partition& initial);

using TransitionRow = std::vector<std::pair<Partition, double>>;

/// Exact law of one Gibbs update of point i from `from` (same code path as the sampler).
TransitionRow gibbs_site_transition(const BsfModel& model, const Partition& from, int i);
/// Exact law of one split-merge step from `from`, averaged over pairs and split patterns.
TransitionRow split_merge_transition(const BsfModel& model, const Partition& from);

}  // namespace bsf
