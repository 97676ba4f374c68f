#include "ludo/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ludo/normal.hpp"
#include "ludo/rng.hpp"

namespace ludo {

namespace {
constexpr double kInvSqrt2 = 0.7071067811865475244008443621048490;

void check_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw std::domain_error(std::string("non-finite ") + what);
}
}  // namespace

double bt_win_prob(double s1, double s2) {
  check_finite(s1, "skill");
  check_finite(s2, "skill");
  const double d = s1 - s2;
  // Evaluate through the negative-exponent branch so neither side overflows.
  if (d >= 0.0) return 1.0 / (1.0 + std::exp(-d));
  const double e = std::exp(d);
  return e / (1.0 + e);
}

double probit_win_prob(double s1, double s2) {
  check_finite(s1, "skill");
  check_finite(s2, "skill");
  return norm_cdf((s1 - s2) * kInvSqrt2);
}

OutcomeDistribution probit_tie_outcome_probs(double s1, double s2, double t) {
  check_finite(s1, "skill");
  check_finite(s2, "skill");
  if (!(t >= 0.0)) throw std::domain_error("tie threshold must be >= 0");
  const double d = s1 - s2;
  const double eta1 = (t - d) * kInvSqrt2;
  const double eta2 = (-t - d) * kInvSqrt2;
  OutcomeDistribution out;
  out.win = norm_cdf(-eta1);                      // Phi((d - t)/sqrt2)
  out.lose = norm_cdf(eta2);                      // Phi((-t - d)/sqrt2)
  out.tie = norm_interval_prob(eta2, eta1);       // Phi(eta1) - Phi(eta2)
  return out;
}

double multi_win_prob(const std::vector<double>& skills, int j) {
  const int n = static_cast<int>(skills.size());
  if (n < 2) throw std::domain_error("multi_win_prob: need at least 2 players");
  if (j < 0 || j >= n) throw std::domain_error("multi_win_prob: winner index out of range");
  double p = 1.0;
  for (int k = 0; k < n; ++k) {
    if (k == j) continue;
    p *= norm_cdf((skills[static_cast<std::size_t>(j)] - skills[static_cast<std::size_t>(k)]) *
                  kInvSqrt2);
  }
  return p;
}

OutcomeDistribution pairwise_outcome_dist(const SkillState& skills, int i, int j) {
  const double si = skills.s.at(static_cast<std::size_t>(i));
  const double sj = skills.s.at(static_cast<std::size_t>(j));
  switch (skills.model) {
    case SkillModel::kBradleyTerry: {
      const double w = bt_win_prob(si, sj);
      return OutcomeDistribution{w, 0.0, 1.0 - w};
    }
    case SkillModel::kProbit: {
      const double w = probit_win_prob(si, sj);
      return OutcomeDistribution{w, 0.0, 1.0 - w};
    }
    case SkillModel::kProbitTies:
      return probit_tie_outcome_probs(si, sj, skills.t);
  }
  throw std::logic_error("unreachable");
}

Matchmaker Matchmaker::empirical(const std::vector<MatchRecord>& matches, int population_size) {
  Matchmaker mm;
  mm.kind_ = Kind::kEmpirical;
  std::vector<std::unordered_map<int, std::int64_t>> counts(
      static_cast<std::size_t>(population_size));
  for (const auto& m : matches) {
    counts[static_cast<std::size_t>(m.first)][m.second]++;
    counts[static_cast<std::size_t>(m.second)][m.first]++;
  }
  mm.pair_weights_.resize(static_cast<std::size_t>(population_size));
  for (int a = 0; a < population_size; ++a) {
    std::int64_t total = 0;
    for (const auto& [b, c] : counts[static_cast<std::size_t>(a)]) total += c;
    auto& row = mm.pair_weights_[static_cast<std::size_t>(a)];
    row.reserve(counts[static_cast<std::size_t>(a)].size());
    for (const auto& [b, c] : counts[static_cast<std::size_t>(a)]) {
      row.emplace_back(b, static_cast<double>(c) / static_cast<double>(total));
    }
    // Deterministic order regardless of hash-map iteration.
    std::sort(row.begin(), row.end());
  }
  return mm;
}

MarginalResult marginal_outcome_dist(int a, const SkillState& skills, const Population& pop,
                                     const Matchmaker& mm, const MarginalOptions& opts) {
  const int A = pop.size();
  if (A < 2) throw std::domain_error("marginal_outcome_dist: population size < 2");
  if (a < 0 || a >= A) throw std::domain_error("marginal_outcome_dist: player not in population");

  MarginalResult res;
  if (!mm.is_uniform()) {
    const auto& row = mm.opponents(a);
    if (row.empty()) throw std::domain_error("empirical matchmaker: player has no opponents");
    for (const auto& [b, w] : row) {
      const OutcomeDistribution d = pairwise_outcome_dist(skills, a, b);
      res.dist.win += w * d.win;
      res.dist.tie += w * d.tie;
      res.dist.lose += w * d.lose;
    }
    return res;
  }

  if (A <= opts.exact_threshold) {
    const double w = 1.0 / static_cast<double>(A - 1);
    for (int b = 0; b < A; ++b) {
      if (b == a) continue;
      const OutcomeDistribution d = pairwise_outcome_dist(skills, a, b);
      res.dist.win += w * d.win;
      res.dist.tie += w * d.tie;
      res.dist.lose += w * d.lose;
    }
    return res;
  }

  // Subsampled opponents, with replacement; per-player substream keeps the
  // result independent of evaluation order.
  res.exact = false;
  Rng rng(opts.seed, static_cast<std::uint64_t>(a));
  const int K = opts.subsample_size;
  double sw = 0, st = 0, sl = 0, sw2 = 0, st2 = 0, sl2 = 0;
  for (int k = 0; k < K; ++k) {
    int b = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(A - 1)));
    if (b >= a) ++b;
    const OutcomeDistribution d = pairwise_outcome_dist(skills, a, b);
    sw += d.win;
    st += d.tie;
    sl += d.lose;
    sw2 += d.win * d.win;
    st2 += d.tie * d.tie;
    sl2 += d.lose * d.lose;
  }
  const double n = static_cast<double>(K);
  res.dist = OutcomeDistribution{sw / n, st / n, sl / n};
  auto se = [n](double s, double s2) {
    const double var = std::max(0.0, s2 / n - (s / n) * (s / n));
    return std::sqrt(var / n);
  };
  res.mc_stderr = std::max({se(sw, sw2), se(st, st2), se(sl, sl2)});
  return res;
}

}  // namespace ludo
