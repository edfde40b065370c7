#include "bsf/sampler.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace bsf {

void ChainSchedule::validate() const {
  if (burnin < 0) throw InvalidArgument("burnin must be non-negative");
  if (iters <= burnin) throw InvalidArgument("iters must exceed burnin");
  if (thin < 1) throw InvalidArgument("thin must be at least 1");
  if (audit_every < 0) throw InvalidArgument("audit period must be non-negative");
}

ChainState::ChainState(const BsfModel& model, const Partition& initial, std::uint64_t seed)
    : label_(initial.labels().begin(), initial.labels().end()), rng_(seed) {
  if (initial.size() != model.size()) throw InvalidArgument("initial partition size does not match data");
  blocks_ = initial.blocks();
  terms_.reserve(blocks_.size());
  for (const auto& b : blocks_) terms_.push_back(term(model, b));
}

Partition ChainState::partition() const { return Partition::from_labels(label_); }

double ChainState::log_class_weight() const {
  return log_factorial(num_blocks()) + std::accumulate(terms_.begin(), terms_.end(), 0.0);
}

double ChainState::term(const BsfModel& model, const std::vector<int>& members) {
  if (size() > 64) return model.block_log_term(members);
  std::uint64_t key = 0;
  for (int i : members) key |= std::uint64_t{1} << i;
  auto it = memo_.find(key);
  if (it != memo_.end()) return it->second;
  if (memo_.size() > (1u << 20)) memo_.clear();
  const double t = model.block_log_term(members);
  memo_.emplace(key, t);
  return t;
}

void ChainState::remove_block(int b) {
  const int last = num_blocks() - 1;
  if (b != last) {
    blocks_[b] = std::move(blocks_[last]);
    terms_[b] = terms_[last];
    for (int i : blocks_[b]) label_[i] = b;
  }
  blocks_.pop_back();
  terms_.pop_back();
}

double ChainState::audit(const BsfModel& model) const {
  double worst = 0.0;
  for (int b = 0; b < num_blocks(); ++b) {
    for (int i : blocks_[b]) {
      if (label_[i] != b) throw NumericalError("chain state labels disagree with blocks");
    }
    const double fresh = model.block_log_term(blocks_[b]);
    worst = std::max(worst, std::abs(fresh - terms_[b]) / std::max(1.0, std::abs(fresh)));
  }
  return worst;
}

struct ChainOps {
  static void tick(ChainState& s) { ++s.steps_; }

  // Removes i from its block; returns the block's new index, or -1 if the block vanished.
  static int detach(ChainState& s, const BsfModel& model, int i) {
    int b = s.label_[i];
    auto& members = s.blocks_[b];
    if (members.size() == 1) {
      s.remove_block(b);
      s.label_[i] = -1;
      return -1;
    }
    members.erase(std::find(members.begin(), members.end(), i));
    s.terms_[b] = s.term(model, members);
    s.label_[i] = -1;
    return b;
  }

  // Log weights (up to a common constant) of joining each block, then of a new singleton.
  static std::vector<double> candidates(ChainState& s, const BsfModel& model, int i) {
    const int k = s.num_blocks();
    std::vector<double> lw(k + 1);
    std::vector<int> joined;
    for (int c = 0; c < k; ++c) {
      joined = s.blocks_[c];
      joined.insert(std::upper_bound(joined.begin(), joined.end(), i), i);
      lw[c] = s.term(model, joined) - s.terms_[c];
    }
    lw[k] = std::log(k + 1.0) + s.term(model, {i});
    return lw;
  }

  static void attach(ChainState& s, const BsfModel& model, int i, int c) {
    if (c == s.num_blocks()) {
      s.blocks_.push_back({i});
      s.terms_.push_back(s.term(model, s.blocks_.back()));
    } else {
      auto& members = s.blocks_[c];
      members.insert(std::upper_bound(members.begin(), members.end(), i), i);
      s.terms_[c] = s.term(model, members);
    }
    s.label_[i] = c;
  }

  static std::vector<double> normalize(const std::vector<double>& lw) {
    const double z = log_sum_exp(lw);
    std::vector<double> p(lw.size());
    for (std::size_t c = 0; c < lw.size(); ++c) p[c] = std::exp(lw[c] - z);
    return p;
  }

  struct Split {
    std::vector<int> with_i;
    std::vector<int> with_j;
  };

  // Split of block `members` separating i and j; bit r of `pattern` sends the r-th other member
  // to j's side.
  static Split make_split(const std::vector<int>& members, int i, int j, std::uint64_t pattern) {
    Split sp;
    int r = 0;
    for (int k : members) {
      if (k == i) {
        sp.with_i.push_back(k);
      } else if (k == j) {
        sp.with_j.push_back(k);
      } else {
        (pattern >> r & 1u ? sp.with_j : sp.with_i).push_back(k);
        ++r;
      }
    }
    return sp;
  }

  static double log_accept_split(ChainState& s, const BsfModel& model, int b, const Split& sp) {
    const double m = static_cast<double>(s.blocks_[b].size());
    return std::log(s.num_blocks() + 1.0) + s.term(model, sp.with_i) + s.term(model, sp.with_j) -
           s.terms_[b] + (m - 2.0) * std::log(2.0);
  }

  static void apply_split(ChainState& s, const BsfModel& model, int b, Split sp) {
    const int nb = s.num_blocks();
    for (int k : sp.with_j) s.label_[k] = nb;
    s.terms_[b] = s.term(model, sp.with_i);
    s.blocks_[b] = std::move(sp.with_i);
    s.terms_.push_back(s.term(model, sp.with_j));
    s.blocks_.push_back(std::move(sp.with_j));
  }

  static std::vector<int> merged(const ChainState& s, int bi, int bj) {
    std::vector<int> out;
    std::merge(s.blocks_[bi].begin(), s.blocks_[bi].end(), s.blocks_[bj].begin(),
               s.blocks_[bj].end(), std::back_inserter(out));
    return out;
  }

  static double log_accept_merge(ChainState& s, const BsfModel& model, int bi, int bj,
                                 const std::vector<int>& both) {
    const double m = static_cast<double>(both.size());
    return -std::log(static_cast<double>(s.num_blocks())) + s.term(model, both) - s.terms_[bi] -
           s.terms_[bj] - (m - 2.0) * std::log(2.0);
  }

  static void apply_merge(ChainState& s, const BsfModel& model, int bi, int bj,
                          std::vector<int> both) {
    for (int k : s.blocks_[bj]) s.label_[k] = bi;
    s.terms_[bi] = s.term(model, both);
    s.blocks_[bi] = std::move(both);
    s.remove_block(bj);
  }
};

namespace {

double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

int sample_index(const std::vector<double>& probs, Rng& rng) {
  double u = uniform01(rng);
  for (std::size_t c = 0; c + 1 < probs.size(); ++c) {
    if (u < probs[c]) return static_cast<int>(c);
    u -= probs[c];
  }
  return static_cast<int>(probs.size()) - 1;
}

}  // namespace

void gibbs_sweep(ChainState& state, const BsfModel& model) {
  std::vector<int> order(state.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), state.rng());
  for (int i : order) {
    const int home = ChainOps::detach(state, model, i);
    const auto probs = ChainOps::normalize(ChainOps::candidates(state, model, i));
    const int c = sample_index(probs, state.rng());
    const int stay = home < 0 ? state.num_blocks() : home;
    ChainOps::attach(state, model, i, c);
    ++state.gibbs_stats.proposed;
    if (c != stay) ++state.gibbs_stats.accepted;
  }
}

bool split_merge_move(ChainState& state, const BsfModel& model) {
  const int n = state.size();
  if (n < 2) throw InvalidArgument("split-merge needs at least two points");
  Rng& rng = state.rng();
  const int i = std::uniform_int_distribution<int>(0, n - 1)(rng);
  int j = std::uniform_int_distribution<int>(0, n - 2)(rng);
  if (j >= i) ++j;
  const int bi = state.block_of(i);
  const int bj = state.block_of(j);
  if (bi == bj) {
    std::uint64_t pattern = 0;
    const int others = static_cast<int>(state.block(bi).size()) - 2;
    for (int r = 0; r < others; ++r) pattern |= (rng() >> 63) << r;
    auto sp = ChainOps::make_split(state.block(bi), i, j, pattern);
    const double la = ChainOps::log_accept_split(state, model, bi, sp);
    ++state.split_stats.proposed;
    if (la >= 0.0 || uniform01(rng) < std::exp(la)) {
      ChainOps::apply_split(state, model, bi, std::move(sp));
      ++state.split_stats.accepted;
      return true;
    }
    return false;
  }
  auto both = ChainOps::merged(state, bi, bj);
  const double la = ChainOps::log_accept_merge(state, model, bi, bj, both);
  ++state.merge_stats.proposed;
  if (la >= 0.0 || uniform01(rng) < std::exp(la)) {
    ChainOps::apply_merge(state, model, bi, bj, std::move(both));
    ++state.merge_stats.accepted;
    return true;
  }
  return false;
}

ChainSummary::ChainSummary(int n)
    : n_(n), k_hist_(static_cast<std::size_t>(n) + 1, 0),
      co_counts_(static_cast<std::size_t>(n) * n, 0) {}

void ChainSummary::record(const Partition& p) {
  if (p.size() != n_) throw InvalidArgument("sample size does not match summary");
  ++retained_;
  ++k_hist_[p.num_blocks()];
  for (int a = 0; a < n_; ++a)
    for (int b = 0; b < n_; ++b)
      if (p.label(a) == p.label(b)) ++co_counts_[static_cast<std::size_t>(a) * n_ + b];
  samples_.push_back(p);
}

void ChainSummary::merge(const ChainSummary& other) {
  if (other.n_ != n_) throw InvalidArgument("cannot merge summaries of different sizes");
  retained_ += other.retained_;
  for (std::size_t k = 0; k < k_hist_.size(); ++k) k_hist_[k] += other.k_hist_[k];
  for (std::size_t c = 0; c < co_counts_.size(); ++c) co_counts_[c] += other.co_counts_[c];
  samples_.insert(samples_.end(), other.samples_.begin(), other.samples_.end());
  for (auto [mine, theirs] : {std::pair{&gibbs, &other.gibbs}, std::pair{&split, &other.split},
                              std::pair{&merge_moves, &other.merge_moves}}) {
    mine->proposed += theirs->proposed;
    mine->accepted += theirs->accepted;
  }
}

Eigen::MatrixXd ChainSummary::coclustering() const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n_, n_);
  if (retained_ == 0) return out;
  for (int a = 0; a < n_; ++a)
    for (int b = 0; b < n_; ++b)
      out(a, b) = static_cast<double>(co_counts_[static_cast<std::size_t>(a) * n_ + b]) / retained_;
  return out;
}

ChainSummary run_chain(const BsfModel& model, const ChainSchedule& schedule, std::uint64_t seed) {
  return run_chain(model, schedule, seed, Partition::one_block(model.size()));
}

ChainSummary run_chain(const BsfModel& model, const ChainSchedule& schedule, std::uint64_t seed,
                       const Partition& initial) {
  schedule.validate();
  ChainState state(model, initial, seed);
  ChainSummary summary(model.size());
  for (long long t = 0; t < schedule.iters; ++t) {
    gibbs_sweep(state, model);
    if (state.size() >= 2) split_merge_move(state, model);
    ChainOps::tick(state);
    if (schedule.audit_every > 0 && (t + 1) % schedule.audit_every == 0) {
      const double dev = state.audit(model);
      if (dev > 1e-9) {
        throw NumericalError("cached block terms drifted by " + format_double(dev) +
                             " at iteration " + std::to_string(t + 1));
      }
    }
    if (t >= schedule.burnin && (t - schedule.burnin) % schedule.thin == 0) {
      summary.record(state.partition());
    }
  }
  summary.gibbs = state.gibbs_stats;
  summary.split = state.split_stats;
  summary.merge_moves = state.merge_stats;
  return summary;
}

namespace {

TransitionRow flatten(const std::map<Partition, double>& acc) {
  return TransitionRow(acc.begin(), acc.end());
}

}  // namespace

TransitionRow gibbs_site_transition(const BsfModel& model, const Partition& from, int i) {
  if (i < 0 || i >= from.size()) throw InvalidArgument("site index out of range");
  ChainState base(model, from, 0);
  ChainOps::detach(base, model, i);
  const auto probs = ChainOps::normalize(ChainOps::candidates(base, model, i));
  std::map<Partition, double> acc;
  for (std::size_t c = 0; c < probs.size(); ++c) {
    ChainState next = base;
    ChainOps::attach(next, model, i, static_cast<int>(c));
    acc[next.partition()] += probs[c];
  }
  return flatten(acc);
}

TransitionRow split_merge_transition(const BsfModel& model, const Partition& from) {
  const int n = from.size();
  if (n < 2) throw InvalidArgument("split-merge needs at least two points");
  ChainState base(model, from, 0);
  std::map<Partition, double> acc;
  const double pair_prob = 1.0 / (static_cast<double>(n) * (n - 1));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const int bi = base.block_of(i);
      const int bj = base.block_of(j);
      if (bi == bj) {
        const int others = static_cast<int>(base.block(bi).size()) - 2;
        const double q = pair_prob * std::ldexp(1.0, -others);
        for (std::uint64_t pattern = 0; pattern < (std::uint64_t{1} << others); ++pattern) {
          ChainState next = base;
          auto sp = ChainOps::make_split(next.block(bi), i, j, pattern);
          const double a = std::min(1.0, std::exp(ChainOps::log_accept_split(next, model, bi, sp)));
          ChainOps::apply_split(next, model, bi, std::move(sp));
          acc[next.partition()] += q * a;
          acc[from] += q * (1.0 - a);
        }
      } else {
        ChainState next = base;
        auto both = ChainOps::merged(next, bi, bj);
        const double a = std::min(1.0, std::exp(ChainOps::log_accept_merge(next, model, bi, bj, both)));
        ChainOps::apply_merge(next, model, bi, bj, std::move(both));
        acc[next.partition()] += pair_prob * a;
        acc[from] += pair_prob * (1.0 - a);
      }
    }
  }
  return flatten(acc);
}

}  // namespace bsf
