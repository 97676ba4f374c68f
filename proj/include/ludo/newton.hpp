#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ludo/design.hpp"
#include "ludo/luck.hpp"
#include "ludo/types.hpp"

#include <Eigen/Core>

namespace ludo {

// Errors thrown by the maximum-likelihood path.
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SeparationError : public FitError {
 public:
  using FitError::FitError;
};

struct NewtonOptions {
  double lambda = 0.3;
  double tol = 1e-8;        // gradient max-norm
  int max_iter = 100;
  // Treat the penalty as (lambda/2) * ||s||^2 instead of lambda * ||s||^2.
  // Retained as an alternate convention for comparison runs.
  bool half_penalty = false;
  std::optional<SkillState> init;
};

struct NewtonFitResult {
  SkillState skills;
  double lambda = 0.0;
  bool converged = false;
  bool tie_free = false;  // no ties observed; t pinned at 0
  int iterations = 0;
  double grad_norm = 0.0;      // final gradient max-norm
  double log_likelihood = 0.0; // penalized objective at the solution
  std::vector<SeparationFlag> separation;
};

// Penalized log-likelihood sum_i log P(O_i = o_i | s, t) - lambda * ||s||^2,
// evaluated with log-CDF-stable terms.
double penalized_loglik(const std::vector<double>& s, double t,
                        const std::vector<MatchRecord>& matches, double lambda,
                        bool half_penalty = false);

// Analytic gradient of the penalized objective with respect to [s; t].
// Exposed for verification against finite differences.
Eigen::VectorXd penalized_gradient(const std::vector<double>& s, double t,
                                   const std::vector<MatchRecord>& matches, double lambda,
                                   bool half_penalty = false);

// Analytic Hessian (dense, for verification and small problems).
Eigen::MatrixXd penalized_hessian(const std::vector<double>& s, double t,
                                  const std::vector<MatchRecord>& matches, double lambda,
                                  bool half_penalty = false);

// Penalized maximum likelihood for the two-player Gaussian-performance model
// with tie threshold, via Newton-Raphson with step-halving. When the data
// contain no ties, t is pinned at 0 and only the skills are estimated.
NewtonFitResult newton_fit(const std::vector<MatchRecord>& matches, const Population& pop,
                           const NewtonOptions& opts = {});

struct LambdaSweepRow {
  double lambda = 0.0;
  NewtonFitResult fit;
  double ell2 = 1.0;
  double luck = 1.0;
  std::string error;  // non-empty when this grid point failed
};

struct LambdaSweepResult {
  std::vector<LambdaSweepRow> rows;
};

// Warm-started fits across an increasing lambda grid.
LambdaSweepResult lambda_sweep(const std::vector<MatchRecord>& matches, const Population& pop,
                               std::vector<double> lambda_grid, const NewtonOptions& base = {});

struct CvResult {
  double lambda_best = 0.0;
  std::vector<double> lambda_grid;
  std::vector<double> mean_heldout_loglik;  // per grid point
};

// Match-level k-fold cross-validation over a lambda grid. Players absent
// from a training fold score with skill 0.
CvResult cv_lambda(const std::vector<MatchRecord>& matches, const Population& pop,
                   std::vector<double> lambda_grid, int folds, std::uint64_t seed,
                   const NewtonOptions& base = {});

}  // namespace ludo
