#include "ludo/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ludo/model.hpp"
#include "ludo/normal.hpp"
#include "ludo/rng.hpp"

namespace ludo {

namespace {

double xlogx(double p) { return p > 0.0 ? p * std::log(p) : 0.0; }

std::vector<std::pair<int, int>> build_schedule(const SynthSpec& spec,
                                                const std::vector<double>& skills, Rng& rng) {
  const int A = spec.players;
  std::vector<std::pair<int, int>> pairs;
  switch (spec.schedule) {
    case ScheduleKind::kRoundRobin: {
      if (spec.rounds < 1) throw std::invalid_argument("synth: rounds must be >= 1");
      for (int r = 0; r < spec.rounds; ++r) {
        for (int i = 0; i < A; ++i) {
          for (int j = i + 1; j < A; ++j) {
            // Alternate seats across repeats.
            if (r % 2 == 0) {
              pairs.emplace_back(i, j);
            } else {
              pairs.emplace_back(j, i);
            }
          }
        }
      }
      break;
    }
    case ScheduleKind::kUniformRandom: {
      if (spec.n_matches < 1) throw std::invalid_argument("synth: n_matches must be >= 1");
      for (std::int64_t m = 0; m < spec.n_matches; ++m) {
        const int i = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(A)));
        int j = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(A - 1)));
        if (j >= i) ++j;
        pairs.emplace_back(i, j);
      }
      break;
    }
    case ScheduleKind::kSkillAdjacent: {
      if (spec.n_matches < 1) throw std::invalid_argument("synth: n_matches must be >= 1");
      if (spec.window < 1) throw std::invalid_argument("synth: window must be >= 1");
      // Rank players by skill; draw opponents within the rank window.
      std::vector<int> order(static_cast<std::size_t>(A));
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        return skills[static_cast<std::size_t>(a)] < skills[static_cast<std::size_t>(b)];
      });
      std::vector<int> rank(static_cast<std::size_t>(A));
      for (int r = 0; r < A; ++r) rank[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])] = r;
      for (std::int64_t m = 0; m < spec.n_matches; ++m) {
        const int i = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(A)));
        const int ri = rank[static_cast<std::size_t>(i)];
        const int lo = std::max(0, ri - spec.window);
        const int hi = std::min(A - 1, ri + spec.window);
        int rj;
        do {
          rj = lo + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(hi - lo + 1)));
        } while (rj == ri);
        pairs.emplace_back(i, order[static_cast<std::size_t>(rj)]);
      }
      break;
    }
  }
  return pairs;
}

}  // namespace

SynthData generate(const SynthSpec& spec) {
  if (spec.players < 2) throw std::invalid_argument("synth: need at least 2 players");
  if (!(spec.tie_p >= 0.0 && spec.tie_p < 1.0)) {
    throw std::invalid_argument("synth: tie_p must be in [0, 1)");
  }
  if (!spec.explicit_skills && !(spec.sigma_sq >= 0.0)) {
    throw std::invalid_argument("synth: sigma_sq must be >= 0");
  }

  SynthData out;
  for (int a = 0; a < spec.players; ++a) out.pop.add("p" + std::to_string(a));

  Rng rng(spec.seed, 0);
  std::vector<double> s(static_cast<std::size_t>(spec.players), 0.0);
  if (spec.explicit_skills) {
    if (static_cast<int>(spec.explicit_skills->size()) != spec.players) {
      throw std::invalid_argument("synth: explicit skill vector length != players");
    }
    s = *spec.explicit_skills;
    double ms = 0.0;
    for (double v : s) ms += v * v;
    out.sigma_sq = ms / static_cast<double>(spec.players);  // plug-in for the t map
  } else {
    const double sd = std::sqrt(spec.sigma_sq);
    for (auto& v : s) v = sd * rng.normal();
    out.sigma_sq = spec.sigma_sq;
  }

  const double t =
      spec.tie_p > 0.0
          ? std::sqrt(2.0 * (1.0 + out.sigma_sq)) * norm_quantile(0.5 * (1.0 + spec.tie_p))
          : 0.0;
  out.tie_p = spec.tie_p;
  out.truth.model = SkillModel::kProbitTies;
  out.truth.s = s;
  out.truth.t = t;

  const auto pairs = build_schedule(spec, s, rng);
  out.matches.reserve(pairs.size());
  std::int64_t order = 0;
  for (const auto& [i, j] : pairs) {
    const double d = s[static_cast<std::size_t>(i)] - s[static_cast<std::size_t>(j)];
    const double y = d + std::sqrt(2.0) * rng.normal();
    Outcome o;
    if (y > t) {
      o = Outcome::kFirstWin;
    } else if (y >= -t) {
      o = Outcome::kTie;
    } else {
      o = Outcome::kSecondWin;
    }
    out.matches.push_back(MatchRecord{static_cast<std::int32_t>(i), static_cast<std::int32_t>(j),
                                      o, order++});
    out.pop.bump_match_count(i);
    out.pop.bump_match_count(j);
  }
  return out;
}

PairwiseTable table_from_win_probs(const std::vector<std::vector<double>>& win) {
  const std::size_t A = win.size();
  PairwiseTable table(A, std::vector<OutcomeDistribution>(A));
  for (std::size_t i = 0; i < A; ++i) {
    if (win[i].size() != A) throw std::invalid_argument("win table must be square");
    for (std::size_t j = 0; j < A; ++j) {
      if (i == j) continue;
      table[i][j] = OutcomeDistribution{win[i][j], 0.0, 1.0 - win[i][j]};
    }
  }
  return table;
}

PairwiseTable table_from_skills(const SkillState& skills) {
  const std::size_t A = skills.s.size();
  PairwiseTable table(A, std::vector<OutcomeDistribution>(A));
  for (std::size_t i = 0; i < A; ++i) {
    for (std::size_t j = 0; j < A; ++j) {
      if (i == j) continue;
      table[i][j] = pairwise_outcome_dist(skills, static_cast<int>(i), static_cast<int>(j));
    }
  }
  return table;
}

LuckReport brute_force_luck(const PairwiseTable& pairwise, int max_players) {
  const int A = static_cast<int>(pairwise.size());
  if (A < 2) throw std::domain_error("brute_force_luck: need at least 2 players");
  if (A > max_players) {
    throw std::domain_error("brute_force_luck: population too large for exhaustive enumeration");
  }

  // Joint q(a, o) over (first player, first player's outcome); opponents and
  // their outcomes are summed out. Uniform matchmaking: P(a) = 1/A,
  // P(b | a) = 1/(A-1).
  const double pa = 1.0 / static_cast<double>(A);
  const double pb = 1.0 / static_cast<double>(A - 1);
  std::vector<std::array<double, 3>> joint(static_cast<std::size_t>(A), {0.0, 0.0, 0.0});
  for (int a = 0; a < A; ++a) {
    for (int b = 0; b < A; ++b) {
      if (b == a) continue;
      const auto& d = pairwise[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
      if (d.win < -1e-12 || d.tie < -1e-12 || d.lose < -1e-12 ||
          std::abs(d.sum() - 1.0) > 1e-9) {
        throw std::domain_error("brute_force_luck: invalid table row");
      }
      joint[static_cast<std::size_t>(a)][0] += pa * pb * d.win;
      joint[static_cast<std::size_t>(a)][1] += pa * pb * d.tie;
      joint[static_cast<std::size_t>(a)][2] += pa * pb * d.lose;
    }
  }

  std::array<double, 3> marg_o = {0.0, 0.0, 0.0};
  std::vector<double> marg_a(static_cast<std::size_t>(A), 0.0);
  for (int a = 0; a < A; ++a) {
    for (int o = 0; o < 3; ++o) {
      marg_o[static_cast<std::size_t>(o)] += joint[static_cast<std::size_t>(a)][static_cast<std::size_t>(o)];
      marg_a[static_cast<std::size_t>(a)] += joint[static_cast<std::size_t>(a)][static_cast<std::size_t>(o)];
    }
  }

  double H = 0.0;
  for (double q : marg_o) H -= xlogx(q);
  double I = 0.0;
  for (int a = 0; a < A; ++a) {
    for (int o = 0; o < 3; ++o) {
      const double q = joint[static_cast<std::size_t>(a)][static_cast<std::size_t>(o)];
      if (q > 0.0) {
        I += q * std::log(q / (marg_a[static_cast<std::size_t>(a)] *
                               marg_o[static_cast<std::size_t>(o)]));
      }
    }
  }
  if (I < 0.0 && I > -1e-12) I = 0.0;

  LuckReport rep;
  rep.H_marginal = H;
  rep.I_player_outcome = I;
  if (H <= 0.0) {
    rep.degenerate = true;
    rep.S = 0.0;
    rep.L = 1.0;
    return rep;
  }
  rep.S = std::clamp(I / H, 0.0, 1.0);
  rep.L = 1.0 - rep.S;
  return rep;
}

QuadratureMoments posterior_quadrature_oracle(const std::vector<MatchRecord>& matches,
                                              double a_sigma, double b_sigma, double a_p,
                                              double b_p) {
  if (matches.size() > 10) throw std::domain_error("quadrature oracle: at most 10 matches");
  for (const auto& m : matches) {
    if (m.first > 1 || m.second > 1) {
      throw std::domain_error("quadrature oracle: requires exactly 2 players");
    }
  }

  // Outcome counts by orientation. delta = s_0 - s_1.
  int win_fwd = 0, lose_fwd = 0, tie_n = 0;
  for (const auto& m : matches) {
    const bool fwd = m.first == 0;
    switch (m.outcome) {
      case Outcome::kFirstWin:
        (fwd ? win_fwd : lose_fwd)++;
        break;
      case Outcome::kSecondWin:
        (fwd ? lose_fwd : win_fwd)++;
        break;
      case Outcome::kTie:
        tie_n++;
        break;
    }
  }

  // Integrate over (z, g, p): delta = sqrt(2 sigma^2) z with z ~ N(0,1),
  // sigma^2 = exp(g) with the inverse-gamma density (Jacobian sigma^2), and
  // p with its beta density. Trapezoid rule on all three axes; refine until
  // the target means move by less than 1e-4.
  auto run_grid = [&](int n) -> QuadratureMoments {
    const double z_lim = 8.0;
    const double g_lo = -10.0, g_hi = 6.0;
    const double p_eps = 1e-6;

    double total = 0.0, acc_sig = 0.0, acc_sig2 = 0.0, acc_d = 0.0, acc_d2 = 0.0;
    for (int ig = 0; ig <= n; ++ig) {
      const double g = g_lo + (g_hi - g_lo) * ig / n;
      const double wg = (ig == 0 || ig == n) ? 0.5 : 1.0;
      const double sig = std::exp(g);
      // Inverse-gamma density times the Jacobian d(sigma^2) = sig dg.
      const double log_prior_sig = a_sigma * std::log(b_sigma) - std::lgamma(a_sigma) -
                                   (a_sigma + 1.0) * std::log(sig) - b_sigma / sig +
                                   std::log(sig);
      const double sqrt2sig = std::sqrt(2.0 * sig);
      for (int ip = 0; ip <= n; ++ip) {
        const double p = p_eps + (1.0 - 2.0 * p_eps) * ip / n;
        const double wp = (ip == 0 || ip == n) ? 0.5 : 1.0;
        const double log_prior_p = (a_p - 1.0) * std::log(p) + (b_p - 1.0) * std::log1p(-p);
        const double t = std::sqrt(2.0 * (1.0 + sig)) * norm_quantile(0.5 * (1.0 + p));
        for (int iz = 0; iz <= n; ++iz) {
          const double z = -z_lim + 2.0 * z_lim * iz / n;
          const double wz = (iz == 0 || iz == n) ? 0.5 : 1.0;
          const double delta = sqrt2sig * z;
          const double log_z = -0.5 * z * z;

          const OutcomeDistribution fwd = probit_tie_outcome_probs(delta, 0.0, t);
          double log_lik = 0.0;
          if (win_fwd > 0) log_lik += win_fwd * std::log(clamp_prob(fwd.win));
          if (lose_fwd > 0) log_lik += lose_fwd * std::log(clamp_prob(fwd.lose));
          if (tie_n > 0) log_lik += tie_n * std::log(clamp_prob(fwd.tie));

          const double w = wg * wp * wz * std::exp(log_prior_sig + log_prior_p + log_z + log_lik);
          total += w;
          acc_sig += w * sig;
          acc_sig2 += w * sig * sig;
          acc_d += w * delta;
          acc_d2 += w * delta * delta;
        }
      }
    }
    QuadratureMoments m;
    m.mean_sigma_sq = acc_sig / total;
    m.mean_skill_diff = acc_d / total;
    m.sd_sigma_sq = std::sqrt(std::max(0.0, acc_sig2 / total - m.mean_sigma_sq * m.mean_sigma_sq));
    m.sd_skill_diff =
        std::sqrt(std::max(0.0, acc_d2 / total - m.mean_skill_diff * m.mean_skill_diff));
    m.grid = n;
    return m;
  };

  QuadratureMoments prev = run_grid(64);
  for (int n = 128; n <= 1024; n *= 2) {
    QuadratureMoments cur = run_grid(n);
    if (std::abs(cur.mean_sigma_sq - prev.mean_sigma_sq) < 1e-4 &&
        std::abs(cur.mean_skill_diff - prev.mean_skill_diff) < 1e-4) {
      return cur;
    }
    prev = cur;
  }
  throw std::runtime_error("quadrature oracle: moments did not stabilize at grid 1024");
}

McKernelEstimate mc_kernel_check(double s1, double s2, double t, std::int64_t draws,
                                 std::uint64_t seed) {
  if (draws < 10000) throw std::invalid_argument("mc_kernel_check: need at least 1e4 draws");
  Rng rng(seed, 0);
  std::int64_t nw = 0, nt = 0, nl = 0;
  for (std::int64_t k = 0; k < draws; ++k) {
    const double y1 = s1 + rng.normal();
    const double y2 = s2 + rng.normal();
    const double d = y1 - y2;
    if (d > t) {
      ++nw;
    } else if (d >= -t) {
      ++nt;
    } else {
      ++nl;
    }
  }
  const double n = static_cast<double>(draws);
  McKernelEstimate est;
  est.dist = OutcomeDistribution{nw / n, nt / n, nl / n};
  auto se = [n](double p) { return std::sqrt(p * (1.0 - p) / n); };
  est.se_win = se(est.dist.win);
  est.se_tie = se(est.dist.tie);
  est.se_lose = se(est.dist.lose);
  return est;
}

std::vector<double> mc_multi_winner_freqs(const std::vector<double>& skills, std::int64_t draws,
                                          std::uint64_t seed) {
  const std::size_t n = skills.size();
  if (n < 2) throw std::domain_error("mc_multi_winner_freqs: need at least 2 players");
  Rng rng(seed, 0);
  std::vector<std::int64_t> wins(n, 0);
  std::vector<double> y(n);
  for (std::int64_t k = 0; k < draws; ++k) {
    std::size_t best = 0;
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = skills[i] + rng.normal();
      if (y[i] > y[best]) best = i;
    }
    wins[best]++;
  }
  std::vector<double> freq(n);
  for (std::size_t i = 0; i < n; ++i) freq[i] = static_cast<double>(wins[i]) / static_cast<double>(draws);
  return freq;
}

}  // namespace ludo
