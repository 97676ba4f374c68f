#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ludo/luck.hpp"
#include "ludo/types.hpp"

namespace ludo {

enum class ScheduleKind { kRoundRobin, kUniformRandom, kSkillAdjacent };

struct SynthSpec {
  int players = 2;
  double sigma_sq = 1.0;
  std::optional<std::vector<double>> explicit_skills;
  double tie_p = 0.0;  // marginal tie probability; defines t via the
                       // sqrt(2(1+sigma^2)) * Phi^{-1}((1+p)/2) map
  ScheduleKind schedule = ScheduleKind::kRoundRobin;
  // Round-robin: each unordered pair meets this many times.
  int rounds = 1;
  // Uniform-random / skill-adjacent: total number of matches.
  std::int64_t n_matches = 0;
  // Skill-adjacent: opponents drawn within this rank window.
  int window = 4;
  std::uint64_t seed = 1;
};

struct SynthData {
  Population pop;
  SkillState truth;
  double sigma_sq = 0.0;  // variance used for the t map
  double tie_p = 0.0;
  std::vector<MatchRecord> matches;
};

// Draws skills from N(0, sigma_sq) (or uses the explicit vector), builds the
// schedule, draws latent performance differences N(d, 2) and codes outcomes
// by the tie threshold. Bit-reproducible from the seed.
SynthData generate(const SynthSpec& spec);

// Full pairwise outcome table: probs[i][j] is the outcome distribution of
// player i against player j (probs[j][i] must be the mirrored distribution).
using PairwiseTable = std::vector<std::vector<OutcomeDistribution>>;

PairwiseTable table_from_win_probs(const std::vector<std::vector<double>>& win);
PairwiseTable table_from_skills(const SkillState& skills);

// Enumerates the joint distribution over (player, opponent, outcome) under
// uniform matchmaking and computes I(O;A)/H(O) directly from the joint --
// independent of the luck_from_marginals code path. Exhaustive regime only.
LuckReport brute_force_luck(const PairwiseTable& pairwise, int max_players = 12);

struct QuadratureMoments {
  double mean_sigma_sq = 0.0;
  double mean_skill_diff = 0.0;  // E[s_1 - s_2] (dense indices 0 and 1)
  double sd_sigma_sq = 0.0;
  double sd_skill_diff = 0.0;
  int grid = 0;  // per-dimension resolution that met the tolerance
};

// Deterministic tensor-grid quadrature over (skill difference, sigma^2, p)
// for the two-player hierarchical model. Grid is refined until both means
// stabilize to 1e-4. Requires exactly 2 players and at most 10 matches.
QuadratureMoments posterior_quadrature_oracle(const std::vector<MatchRecord>& matches,
                                              double a_sigma, double b_sigma, double a_p,
                                              double b_p);

struct McKernelEstimate {
  OutcomeDistribution dist;
  double se_win = 0.0;
  double se_tie = 0.0;
  double se_lose = 0.0;
};

// Monte Carlo outcome frequencies from the latent performance model
// Y_k ~ N(s_k, 1), outcome by threshold on Y_1 - Y_2.
McKernelEstimate mc_kernel_check(double s1, double s2, double t, std::int64_t draws,
                                 std::uint64_t seed);

// Simulation-based winner distribution for an n-player game (the product
// formula in multi_win_prob is not a distribution for n >= 3).
std::vector<double> mc_multi_winner_freqs(const std::vector<double>& skills, std::int64_t draws,
                                          std::uint64_t seed);

}  // namespace ludo
