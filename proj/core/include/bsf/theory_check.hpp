#pragma once

// Randomized checks of the determinant identities and inequalities the posterior bounds rest on.
// Each check draws `trials` instances from per-trial seeds derive_seed(seed, t) and reports the
// worst signed violation; a report passes when that violation is within its tolerance.

#include <cstdint>
#include <string>
#include <vector>

namespace bsf {

struct LemmaReport {
  std::string id;
  int trials = 0;
  double max_violation = 0.0;
  bool pass = true;
  std::uint64_t worst_seed = 0;
  double tolerance = 1e-9;
};

inline constexpr double kLemmaTolerance = 1e-9;

/// Spectrum of L + aI + bJ against the shifted Laplacian spectrum, relative to max(1, |lambda|).
LemmaReport verify_eigen_shift(int trials, std::uint64_t seed);
/// log|L+J/n| by dense Cholesky, log n + log|L[i]| for every i, and brute-force tree sums.
LemmaReport verify_det_identity(int trials, std::uint64_t seed);
/// |M + a b'| = |M| (1 + b' M^-1 a) on well-conditioned M.
LemmaReport verify_matrix_det_lemma(int trials, std::uint64_t seed);
/// Product of block determinants over the full determinant, all weights >= gamma.
LemmaReport verify_ratio_bound_coarse(int trials, std::uint64_t seed);
/// Full determinant over block determinants, cross weights <= eps <= within weights.
LemmaReport verify_ratio_bound_fine(int trials, std::uint64_t seed);
/// |L[1]| >= |T_K[1]| prod |L_Vi[1]|, plus the concatenated-forest identity on n <= 6.
LemmaReport verify_forest_factorization(int trials, std::uint64_t seed);

std::vector<LemmaReport> verify_all(int trials, std::uint64_t seed);

}  // namespace bsf
