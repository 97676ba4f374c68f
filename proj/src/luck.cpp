#include "ludo/luck.hpp"

#include <cmath>
#include <stdexcept>

#include "ludo/rng.hpp"

namespace ludo {

namespace {

double xlogx(double p) { return p > 0.0 ? p * std::log(p) : 0.0; }

void validate_dist(const OutcomeDistribution& d) {
  if (d.win < -1e-12 || d.tie < -1e-12 || d.lose < -1e-12 ||
      std::abs(d.sum() - 1.0) > 1e-9) {
    throw std::domain_error("invalid outcome distribution");
  }
}

}  // namespace

LuckReport luck_from_marginals(const std::vector<OutcomeDistribution>& per_player) {
  const std::size_t A = per_player.size();
  if (A < 2) throw std::domain_error("luck_from_marginals: need at least 2 players");

  OutcomeDistribution pooled;
  double mean_conditional = 0.0;  // (1/A) sum_a sum_o P_a(o) log P_a(o)
  for (const auto& d : per_player) {
    validate_dist(d);
    pooled.win += d.win;
    pooled.tie += d.tie;
    pooled.lose += d.lose;
    mean_conditional += xlogx(d.win) + xlogx(d.tie) + xlogx(d.lose);
  }
  const double invA = 1.0 / static_cast<double>(A);
  pooled.win *= invA;
  pooled.tie *= invA;
  pooled.lose *= invA;
  mean_conditional *= invA;

  const double pooled_plogp = xlogx(pooled.win) + xlogx(pooled.tie) + xlogx(pooled.lose);

  LuckReport rep;
  rep.H_marginal = -pooled_plogp;
  rep.I_player_outcome = pooled_plogp - mean_conditional;
  // Floating noise can leave I a hair below zero; the quantity is >= 0.
  if (rep.I_player_outcome < 0.0 && rep.I_player_outcome > -1e-12) rep.I_player_outcome = 0.0;

  if (rep.H_marginal <= 0.0) {
    // Constant outcome: no information to attribute to skill.
    rep.degenerate = true;
    rep.S = 0.0;
    rep.L = 1.0;
    return rep;
  }
  rep.S = rep.I_player_outcome / rep.H_marginal;
  if (rep.S < 0.0) rep.S = 0.0;
  if (rep.S > 1.0) rep.S = 1.0;
  rep.L = 1.0 - rep.S;
  return rep;
}

LuckReport luck_from_fit(const SkillState& skills, const Population& pop,
                         const LuckFromFitOptions& opts) {
  const int A = pop.size();
  if (A < 2) throw std::domain_error("luck_from_fit: population size < 2");
  const Matchmaker mm = Matchmaker::uniform();

  if (A <= opts.marginal.exact_threshold) {
    std::vector<OutcomeDistribution> marginals;
    marginals.reserve(static_cast<std::size_t>(A));
    for (int a = 0; a < A; ++a) {
      marginals.push_back(marginal_outcome_dist(a, skills, pop, mm, opts.marginal).dist);
    }
    return luck_from_marginals(marginals);
  }

  // Subsampled path: estimate L on independent replicate opponent samples
  // and report the spread as a Monte Carlo standard error.
  const int R = std::max(2, opts.replicates);
  std::vector<double> Ls;
  Ls.reserve(static_cast<std::size_t>(R));
  LuckReport last;
  for (int r = 0; r < R; ++r) {
    MarginalOptions mo = opts.marginal;
    mo.seed = opts.marginal.seed + static_cast<std::uint64_t>(r) * 0x51ed2701ULL;
    std::vector<OutcomeDistribution> marginals;
    marginals.reserve(static_cast<std::size_t>(A));
    for (int a = 0; a < A; ++a) {
      marginals.push_back(marginal_outcome_dist(a, skills, pop, mm, mo).dist);
    }
    last = luck_from_marginals(marginals);
    Ls.push_back(last.L);
  }
  double mean = 0.0;
  for (double v : Ls) mean += v;
  mean /= static_cast<double>(R);
  double var = 0.0;
  for (double v : Ls) var += (v - mean) * (v - mean);
  var /= static_cast<double>(R - 1);

  LuckReport rep = last;
  rep.L = mean;
  rep.S = 1.0 - mean;
  rep.exact = false;
  rep.mc_stderr = std::sqrt(var / static_cast<double>(R));
  return rep;
}

EllSquaredReport ell2_from_skills(const std::vector<double>& s) {
  if (s.empty()) throw std::domain_error("ell2_from_skills: empty skill vector");
  double ms = 0.0;
  for (double v : s) {
    if (!std::isfinite(v)) throw std::domain_error("ell2_from_skills: non-finite skill");
    ms += v * v;
  }
  ms /= static_cast<double>(s.size());
  return EllSquaredReport{1.0 / (1.0 + ms), EllSquaredReport::Source::kFromSkills};
}

EllSquaredReport ell2_from_sigma(double sigma_sq) {
  if (!(sigma_sq >= 0.0)) throw std::domain_error("ell2_from_sigma: sigma_sq must be >= 0");
  return EllSquaredReport{1.0 / (1.0 + sigma_sq), EllSquaredReport::Source::kFromSigma};
}

}  // namespace ludo
