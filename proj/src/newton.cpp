#include "ludo/newton.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "ludo/normal.hpp"
#include "ludo/rng.hpp"

namespace ludo {

namespace {

constexpr double kInvSqrt2 = 0.7071067811865475244008443621048490;

double effective_lambda(double lambda, bool half_penalty) {
  return half_penalty ? 0.5 * lambda : lambda;
}

// Per-observation pieces shared by the objective, gradient and Hessian.
// eta1 = (t - d)/sqrt2, eta2 = (-t - d)/sqrt2 with d = s_first - s_second.
struct ObsTerms {
  double grad_d = 0.0;   // dl/dd
  double grad_t = 0.0;   // dl/dt
  double c_dd = 0.0;     // -d2l/dd2   (>= 0 by concavity)
  double c_dt = 0.0;     // -d2l/dd dt
  double c_tt = 0.0;     // -d2l/dt2
};

ObsTerms obs_terms(double d, double t, Outcome o) {
  const double eta1 = (t - d) * kInvSqrt2;
  const double eta2 = (-t - d) * kInvSqrt2;
  ObsTerms r;
  switch (o) {
    case Outcome::kFirstWin: {
      const double s1 = norm_hazard(eta1);  // phi / (1 - Phi)
      r.grad_d = kInvSqrt2 * s1;
      r.grad_t = -kInvSqrt2 * s1;
      const double c = 0.5 * s1 * (s1 - eta1);
      r.c_dd = c;
      r.c_dt = -c;
      r.c_tt = c;
      break;
    }
    case Outcome::kSecondWin: {
      const double s2 = norm_reverse_hazard(eta2);  // phi / Phi
      r.grad_d = -kInvSqrt2 * s2;
      r.grad_t = -kInvSqrt2 * s2;
      const double c = 0.5 * s2 * (s2 + eta2);
      r.c_dd = c;
      r.c_dt = c;
      r.c_tt = c;
      break;
    }
    case Outcome::kTie: {
      const double D = std::max(norm_interval_prob(eta2, eta1), 1e-300);
      const double p1 = norm_pdf(eta1);
      const double p2 = norm_pdf(eta2);
      const double F = (p1 - p2) / D;
      const double G = (p1 + p2) / D;
      const double P1 = (eta1 * p1 - eta2 * p2) / D;
      const double P2 = (eta1 * p1 + eta2 * p2) / D;
      r.grad_d = -kInvSqrt2 * F;
      r.grad_t = kInvSqrt2 * G;
      r.c_dd = 0.5 * (P1 + F * F);
      r.c_dt = 0.5 * (P2 + F * G);
      r.c_tt = 0.5 * (P1 + G * G);
      break;
    }
  }
  return r;
}

double loglik_term(double d, double t, Outcome o) {
  const double eta1 = (t - d) * kInvSqrt2;
  const double eta2 = (-t - d) * kInvSqrt2;
  switch (o) {
    case Outcome::kFirstWin:
      return log_norm_cdf(-eta1);
    case Outcome::kSecondWin:
      return log_norm_cdf(eta2);
    case Outcome::kTie:
      return std::log(std::max(norm_interval_prob(eta2, eta1), 1e-300));
  }
  return 0.0;
}

std::int64_t count_ties(const std::vector<MatchRecord>& matches) {
  std::int64_t n = 0;
  for (const auto& m : matches) {
    if (m.outcome == Outcome::kTie) ++n;
  }
  return n;
}

}  // namespace

double penalized_loglik(const std::vector<double>& s, double t,
                        const std::vector<MatchRecord>& matches, double lambda,
                        bool half_penalty) {
  if (!(t >= 0.0)) throw std::domain_error("penalized_loglik: t must be >= 0");
  if (lambda < 0.0) throw std::domain_error("penalized_loglik: lambda must be >= 0");
  double ll = 0.0;
  for (const auto& m : matches) {
    const double d = s[static_cast<std::size_t>(m.first)] - s[static_cast<std::size_t>(m.second)];
    ll += loglik_term(d, t, m.outcome);
  }
  const double lam = effective_lambda(lambda, half_penalty);
  double ss = 0.0;
  for (double v : s) ss += v * v;
  return ll - lam * ss;
}

Eigen::VectorXd penalized_gradient(const std::vector<double>& s, double t,
                                   const std::vector<MatchRecord>& matches, double lambda,
                                   bool half_penalty) {
  const int A = static_cast<int>(s.size());
  Eigen::VectorXd g = Eigen::VectorXd::Zero(A + 1);
  for (const auto& m : matches) {
    const double d = s[static_cast<std::size_t>(m.first)] - s[static_cast<std::size_t>(m.second)];
    const ObsTerms ot = obs_terms(d, t, m.outcome);
    g[m.first] += ot.grad_d;
    g[m.second] -= ot.grad_d;
    g[A] += ot.grad_t;
  }
  const double lam = effective_lambda(lambda, half_penalty);
  for (int a = 0; a < A; ++a) g[a] -= 2.0 * lam * s[static_cast<std::size_t>(a)];
  return g;
}

Eigen::MatrixXd penalized_hessian(const std::vector<double>& s, double t,
                                  const std::vector<MatchRecord>& matches, double lambda,
                                  bool half_penalty) {
  const int A = static_cast<int>(s.size());
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(A + 1, A + 1);
  for (const auto& m : matches) {
    const double d = s[static_cast<std::size_t>(m.first)] - s[static_cast<std::size_t>(m.second)];
    const ObsTerms ot = obs_terms(d, t, m.outcome);
    const int i = m.first, j = m.second;
    H(i, i) -= ot.c_dd;
    H(j, j) -= ot.c_dd;
    H(i, j) += ot.c_dd;
    H(j, i) += ot.c_dd;
    H(i, A) -= ot.c_dt;
    H(A, i) -= ot.c_dt;
    H(j, A) += ot.c_dt;
    H(A, j) += ot.c_dt;
    H(A, A) -= ot.c_tt;
  }
  const double lam = effective_lambda(lambda, half_penalty);
  for (int a = 0; a < A; ++a) H(a, a) -= 2.0 * lam;
  return H;
}

namespace {

// Negative Hessian assembled sparse: positive (semi)definite for the concave
// objective. dim = A (+1 when t is free).
Eigen::SparseMatrix<double> assemble_neg_hessian(const std::vector<double>& s, double t,
                                                 const std::vector<MatchRecord>& matches,
                                                 double lam2, bool with_t) {
  const int A = static_cast<int>(s.size());
  const int dim = with_t ? A + 1 : A;
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(matches.size() * 7 + static_cast<std::size_t>(dim));
  for (const auto& m : matches) {
    const double d = s[static_cast<std::size_t>(m.first)] - s[static_cast<std::size_t>(m.second)];
    const ObsTerms ot = obs_terms(d, t, m.outcome);
    const int i = m.first, j = m.second;
    trips.emplace_back(i, i, ot.c_dd);
    trips.emplace_back(j, j, ot.c_dd);
    trips.emplace_back(i, j, -ot.c_dd);
    trips.emplace_back(j, i, -ot.c_dd);
    if (with_t) {
      trips.emplace_back(i, A, ot.c_dt);
      trips.emplace_back(A, i, ot.c_dt);
      trips.emplace_back(j, A, -ot.c_dt);
      trips.emplace_back(A, j, -ot.c_dt);
      trips.emplace_back(A, A, ot.c_tt);
    }
  }
  for (int a = 0; a < A; ++a) trips.emplace_back(a, a, lam2);
  Eigen::SparseMatrix<double> nH(dim, dim);
  nH.setFromTriplets(trips.begin(), trips.end());
  return nH;
}

Eigen::VectorXd gradient_vec(const std::vector<double>& s, double t,
                             const std::vector<MatchRecord>& matches, double lam2, bool with_t) {
  const int A = static_cast<int>(s.size());
  Eigen::VectorXd g = Eigen::VectorXd::Zero(with_t ? A + 1 : A);
  for (const auto& m : matches) {
    const double d = s[static_cast<std::size_t>(m.first)] - s[static_cast<std::size_t>(m.second)];
    const ObsTerms ot = obs_terms(d, t, m.outcome);
    g[m.first] += ot.grad_d;
    g[m.second] -= ot.grad_d;
    if (with_t) g[A] += ot.grad_t;
  }
  for (int a = 0; a < A; ++a) g[a] -= lam2 * s[static_cast<std::size_t>(a)];
  return g;
}

void center_components(std::vector<double>& s, const ConnectivityReport& conn) {
  std::vector<double> sum(static_cast<std::size_t>(conn.K), 0.0);
  std::vector<int> count(static_cast<std::size_t>(conn.K), 0);
  for (std::size_t a = 0; a < s.size(); ++a) {
    sum[static_cast<std::size_t>(conn.component[a])] += s[a];
    count[static_cast<std::size_t>(conn.component[a])]++;
  }
  for (std::size_t a = 0; a < s.size(); ++a) {
    const auto c = static_cast<std::size_t>(conn.component[a]);
    s[a] -= sum[c] / static_cast<double>(count[c]);
  }
}

}  // namespace

NewtonFitResult newton_fit(const std::vector<MatchRecord>& matches, const Population& pop,
                           const NewtonOptions& opts) {
  if (matches.empty()) throw FitError("newton_fit: no matches");
  if (opts.lambda < 0.0) throw FitError("newton_fit: lambda must be >= 0");
  const int A = pop.size();
  if (A < 2) throw FitError("newton_fit: population size < 2");

  NewtonFitResult res;
  res.lambda = opts.lambda;
  res.separation = detect_separation(matches, pop);
  const ConnectivityReport conn = connectivity(matches, pop);

  if (opts.lambda == 0.0) {
    if (!res.separation.empty()) {
      std::ostringstream msg;
      msg << "newton_fit: perfect data separation with lambda = 0; the maximum likelihood "
             "estimate does not exist. Flagged players:";
      for (const auto& f : res.separation) {
        msg << ' ' << f.player.label
            << (f.kind == SeparationKind::kAllWins ? "(all-wins)" : "(all-losses)");
      }
      msg << ". Use a positive ridge penalty.";
      throw SeparationError(msg.str());
    }
    if (conn.K > 1) {
      std::ostringstream msg;
      msg << "newton_fit: design is rank-deficient with lambda = 0: " << conn.K
          << " disconnected player groups (rank A - K = " << A - conn.K
          << "). Use a positive ridge penalty or fit groups separately.";
      throw FitError(msg.str());
    }
  }

  const std::int64_t n_ties = count_ties(matches);
  const bool with_t = n_ties > 0;
  res.tie_free = !with_t;

  std::vector<double> s(static_cast<std::size_t>(A), 0.0);
  double t = 0.0;
  if (opts.init.has_value()) {
    s = opts.init->s;
    t = std::max(0.0, opts.init->t);
    if (static_cast<int>(s.size()) != A) throw FitError("newton_fit: init size mismatch");
  } else if (with_t) {
    // Calibrate t to the empirical tie rate at s = 0.
    const double rate = std::min(
        static_cast<double>(n_ties) / static_cast<double>(matches.size()), 1.0 - 1e-9);
    t = std::sqrt(2.0) * norm_quantile(0.5 * (1.0 + rate));
  }
  if (!with_t) t = 0.0;

  const double lam2 = 2.0 * effective_lambda(opts.lambda, opts.half_penalty);
  const int dim = with_t ? A + 1 : A;

  double obj = penalized_loglik(s, t, matches, opts.lambda, opts.half_penalty);
  if (!std::isfinite(obj)) throw FitError("newton_fit: objective not finite at initialization");

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
  bool pattern_analyzed = false;

  for (int iter = 0; iter < opts.max_iter; ++iter) {
    Eigen::VectorXd g = gradient_vec(s, t, matches, lam2, with_t);
    res.grad_norm = g.lpNorm<Eigen::Infinity>();
    res.iterations = iter;
    if (res.grad_norm <= opts.tol) {
      res.converged = true;
      break;
    }

    Eigen::SparseMatrix<double> nH = assemble_neg_hessian(s, t, matches, lam2, with_t);
    Eigen::VectorXd step(dim);
    bool solved = false;
    if (opts.lambda > 0.0) {
      if (!pattern_analyzed) {
        solver.analyzePattern(nH);
        pattern_analyzed = true;
      }
      solver.factorize(nH);
      if (solver.info() == Eigen::Success) {
        step = solver.solve(g);
        solved = std::isfinite(step.lpNorm<Eigen::Infinity>());
      }
    }
    if (!solved) {
      // Rank-deficient (lambda = 0) or failed factorization: pseudo-inverse
      // step on the dense negative Hessian.
      Eigen::MatrixXd dense = Eigen::MatrixXd(nH);
      step = dense.completeOrthogonalDecomposition().solve(g);
      if (!std::isfinite(step.lpNorm<Eigen::Infinity>())) {
        throw FitError("newton_fit: Newton step is not finite (singular Hessian; " +
                       std::to_string(conn.K) + " player groups)");
      }
    }

    // Step-halving line search on the ascent direction.
    double scale = 1.0;
    bool accepted = false;
    std::vector<double> s_try = s;
    double t_try = t;
    for (int half = 0; half < 50; ++half) {
      for (int a = 0; a < A; ++a) {
        s_try[static_cast<std::size_t>(a)] = s[static_cast<std::size_t>(a)] + scale * step[a];
      }
      if (with_t) {
        t_try = t + scale * step[A];
        if (t_try < 0.0) t_try = -t_try;  // reflect at the boundary
      }
      const double obj_try = penalized_loglik(s_try, t_try, matches, opts.lambda, opts.half_penalty);
      if (std::isfinite(obj_try) && obj_try >= obj - 1e-12 * (1.0 + std::abs(obj))) {
        if (opts.lambda == 0.0) center_components(s_try, conn);
        obj = penalized_loglik(s_try, t_try, matches, opts.lambda, opts.half_penalty);
        s = s_try;
        t = t_try;
        accepted = true;
        break;
      }
      scale *= 0.5;
    }
    if (!accepted) {
      // No ascent available at machine precision; report where we stopped.
      res.iterations = iter + 1;
      break;
    }
    if (!std::isfinite(obj)) {
      throw FitError("newton_fit: objective diverged (NaN) at iteration " + std::to_string(iter));
    }
  }

  if (!res.converged) {
    Eigen::VectorXd g = gradient_vec(s, t, matches, lam2, with_t);
    res.grad_norm = g.lpNorm<Eigen::Infinity>();
    res.converged = res.grad_norm <= opts.tol;
  }

  res.skills.model = SkillModel::kProbitTies;
  res.skills.s = std::move(s);
  res.skills.t = t;
  res.log_likelihood = obj;
  return res;
}

LambdaSweepResult lambda_sweep(const std::vector<MatchRecord>& matches, const Population& pop,
                               std::vector<double> lambda_grid, const NewtonOptions& base) {
  if (lambda_grid.empty()) throw FitError("lambda_sweep: empty grid");
  for (double l : lambda_grid) {
    if (!(l > 0.0)) throw FitError("lambda_sweep: grid values must be positive");
  }
  std::sort(lambda_grid.begin(), lambda_grid.end());
  lambda_grid.erase(std::unique(lambda_grid.begin(), lambda_grid.end()), lambda_grid.end());

  LambdaSweepResult out;
  std::optional<SkillState> warm;
  for (double lam : lambda_grid) {
    LambdaSweepRow row;
    row.lambda = lam;
    NewtonOptions o = base;
    o.lambda = lam;
    o.init = warm;
    try {
      row.fit = newton_fit(matches, pop, o);
      warm = row.fit.skills;
      row.ell2 = ell2_from_skills(row.fit.skills.s).value;
      row.luck = luck_from_fit(row.fit.skills, pop).L;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

CvResult cv_lambda(const std::vector<MatchRecord>& matches, const Population& pop,
                   std::vector<double> lambda_grid, int folds, std::uint64_t seed,
                   const NewtonOptions& base) {
  if (folds < 2) throw FitError("cv_lambda: need at least 2 folds");
  if (lambda_grid.empty()) throw FitError("cv_lambda: empty grid");
  std::sort(lambda_grid.begin(), lambda_grid.end());
  lambda_grid.erase(std::unique(lambda_grid.begin(), lambda_grid.end()), lambda_grid.end());

  const std::size_t n = matches.size();
  std::vector<int> fold_of(n);
  {
    // Seeded Fisher-Yates over match indices, then round-robin assignment.
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(seed, 0xCF01);
    for (std::size_t i = n; i > 1; --i) {
      const std::size_t j = rng.uniform_below(i);
      std::swap(perm[i - 1], perm[j]);
    }
    for (std::size_t k = 0; k < n; ++k) {
      fold_of[perm[k]] = static_cast<int>(k % static_cast<std::size_t>(folds));
    }
  }
  for (int f = 0; f < folds; ++f) {
    if (std::count(fold_of.begin(), fold_of.end(), f) == 0) {
      throw FitError("cv_lambda: fold " + std::to_string(f) + " has no matches");
    }
  }

  CvResult res;
  res.lambda_grid = lambda_grid;
  res.mean_heldout_loglik.assign(lambda_grid.size(), 0.0);

  for (int f = 0; f < folds; ++f) {
    std::vector<MatchRecord> train, test;
    for (std::size_t i = 0; i < n; ++i) {
      (fold_of[i] == f ? test : train).push_back(matches[i]);
    }
    std::vector<bool> seen(static_cast<std::size_t>(pop.size()), false);
    for (const auto& m : train) {
      seen[static_cast<std::size_t>(m.first)] = true;
      seen[static_cast<std::size_t>(m.second)] = true;
    }
    std::optional<SkillState> warm;
    for (std::size_t gi = 0; gi < lambda_grid.size(); ++gi) {
      NewtonOptions o = base;
      o.lambda = lambda_grid[gi];
      o.init = warm;
      NewtonFitResult fit = newton_fit(train, pop, o);
      warm = fit.skills;
      std::vector<double> s = fit.skills.s;
      for (std::size_t a = 0; a < s.size(); ++a) {
        if (!seen[a]) s[a] = 0.0;  // unseen players score at the prior center
      }
      res.mean_heldout_loglik[gi] += penalized_loglik(s, fit.skills.t, test, 0.0) /
                                     static_cast<double>(folds);
    }
  }

  std::size_t best = 0;
  for (std::size_t gi = 1; gi < lambda_grid.size(); ++gi) {
    if (res.mean_heldout_loglik[gi] > res.mean_heldout_loglik[best]) best = gi;
  }
  res.lambda_best = lambda_grid[best];
  return res;
}

}  // namespace ludo
