#pragma once

#include <optional>
#include <vector>

#include "ludo/model.hpp"
#include "ludo/types.hpp"

namespace ludo {

// Information-theoretic returns-to-skill S and luck L = 1 - S, computed from
// per-player marginal outcome distributions under the uniform matchmaker.
struct LuckReport {
  double S = 0.0;                 // returns to skill, in [0, 1]
  double L = 1.0;                 // luck, 1 - S
  double H_marginal = 0.0;        // entropy of the pooled outcome, nats
  double I_player_outcome = 0.0;  // mutual information player <-> outcome, nats
  bool degenerate = false;        // H(O) == 0: outcome carries no information
  bool exact = true;
  std::optional<double> mc_stderr;  // std. error of L on the subsampled path
};

struct EllSquaredReport {
  enum class Source { kFromSkills, kFromSigma };
  double value = 1.0;  // in (0, 1]
  Source source = Source::kFromSkills;
};

// S and L from explicit per-player marginals (each a valid distribution).
LuckReport luck_from_marginals(const std::vector<OutcomeDistribution>& per_player);

struct LuckFromFitOptions {
  MarginalOptions marginal;
  // Replicated subsample estimates used to attach a standard error to L.
  int replicates = 8;
};

// Builds each player's marginal under the uniform matchmaker from a fitted
// skill state, then reduces via luck_from_marginals. Exact enumeration below
// the population threshold, replicated subsampling above it.
LuckReport luck_from_fit(const SkillState& skills, const Population& pop,
                         const LuckFromFitOptions& opts = {});

// 1 / (1 + mean(s^2)).
EllSquaredReport ell2_from_skills(const std::vector<double>& s);

// 1 / (1 + sigma_sq).
EllSquaredReport ell2_from_sigma(double sigma_sq);

}  // namespace ludo
