#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ludo/types.hpp"

namespace ludo {

// Closed-form outcome kernels for the latent-performance skill models. All
// functions are pure; skills are in performance-SD units.

// Logistic paired-comparison win probability 1/(1 + exp(-(s1 - s2))).
double bt_win_prob(double s1, double s2);

// Gaussian-performance win probability Phi((s1 - s2)/sqrt(2)).
double probit_win_prob(double s1, double s2);

// Three-way outcome probabilities with tie threshold t >= 0.
OutcomeDistribution probit_tie_outcome_probs(double s1, double s2, double t);

// P("player j wins") = prod_{k != j} Phi((s_j - s_k)/sqrt(2)), as defined by
// the multinomial latent-performance model. For n >= 3 the latent comparison
// events are dependent, so these values do not sum to 1 over j; see
// mc_multi_winner_freqs in synth.hpp for a simulation-based distribution.
double multi_win_prob(const std::vector<double>& skills, int j);

// Outcome distribution for the pair (i, j) under the state's model.
OutcomeDistribution pairwise_outcome_dist(const SkillState& skills, int i, int j);

struct MarginalOptions {
  // Opponent sets are enumerated exactly up to this population size.
  int exact_threshold = 20000;
  // Subsampled path: opponents drawn per player, with replacement.
  int subsample_size = 2048;
  std::uint64_t seed = 1;
};

struct MarginalResult {
  OutcomeDistribution dist;
  bool exact = true;
  // Largest per-category Monte Carlo standard error (subsampled path only).
  std::optional<double> mc_stderr;
};

// Marginal outcome distribution of player a against an opponent drawn by the
// matchmaker (self-play excluded). Exact enumeration below the threshold,
// seeded uniform subsampling above it.
MarginalResult marginal_outcome_dist(int a, const SkillState& skills, const Population& pop,
                                     const Matchmaker& mm, const MarginalOptions& opts = {});

}  // namespace ludo
