#pragma once

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "ludo/rng.hpp"
#include "ludo/types.hpp"

namespace ludo {

struct GibbsConfig {
  double a_sigma = 2.0;  // inverse-gamma shape on sigma_s^2
  double b_sigma = 1.0;  // inverse-gamma scale
  double a_p = 2.0;      // beta prior on the marginal tie probability
  double b_p = 5.0;
  int burn_in = 100;
  int samples = 250;
  int thin = 1;
  std::uint64_t seed = 1;
  bool keep_skills = false;  // retain kept-iteration skill vectors
  // The joint skill draw switches to per-player scalar updates above this
  // population size (single-site Gibbs; same stationary distribution).
  int direct_solve_threshold = 50000;
  // Alternate precision convention for the skill draw (x^T x + sqrt(2)/sigma^2
  // instead of x^T x / 2 + 1/sigma^2), retained for comparison runs only.
  bool alt_skill_precision = false;

  void validate() const;
};

struct GibbsTrace {
  std::vector<double> sigma_sq;
  std::vector<double> p;
  std::vector<double> t;
  std::vector<double> ell2;
  std::vector<std::vector<double>> skills;  // present only when keep_skills
};

struct SummaryStat {
  double mean = 0.0;
  double sd = 0.0;
  double q025 = 0.0;
  double q50 = 0.0;
  double q975 = 0.0;
  double ess = 0.0;
};

struct PosteriorSummary {
  SummaryStat ell2;
  SummaryStat t;
};

// Exact draw from N(mean, sd^2) truncated to [lo, hi] (either bound may be
// infinite). Robust for intervals far out in the tail.
double sample_truncnorm(double mean, double sd, double lo, double hi, Rng& rng);

// Mutable sampler state for one chain.
struct GibbsState {
  std::vector<double> s;
  std::vector<double> y;
  double sigma_sq = 1.0;
  double p = 0.0;
  double t = 0.0;
};

// Precomputed structures shared by all sweeps of a chain. One full sweep
// draws, in order: p | o, sigma^2 | s, t = f(sigma^2, p), y | s,t,o, s | y.
class GibbsWorkspace {
 public:
  GibbsWorkspace(const std::vector<MatchRecord>& matches, int population_size,
                 const GibbsConfig& config);
  ~GibbsWorkspace();
  GibbsWorkspace(GibbsWorkspace&&) noexcept;
  GibbsWorkspace& operator=(GibbsWorkspace&&) noexcept;

  void sweep(GibbsState& state, Rng& rng);
  GibbsState initial_state() const;
  int population_size() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Runs one chain: burn_in discarded sweeps, then `samples` kept states
// (thinned). Fully reproducible from config.seed.
std::pair<GibbsTrace, PosteriorSummary> run_chain(const std::vector<MatchRecord>& matches,
                                                  const Population& pop,
                                                  const GibbsConfig& config);

PosteriorSummary summarize_trace(const GibbsTrace& trace);

struct ChainDiagnostics {
  double rhat_sigma_sq = 1.0;
  double rhat_t = 1.0;
  double ess_sigma_sq = 0.0;
  double ess_t = 0.0;
  bool warn = false;  // any split-Rhat above 1.05
};

// Rank-normalized split Rhat and pooled ESS across >= 2 equal-length chains.
ChainDiagnostics multi_chain_diagnostics(const std::vector<GibbsTrace>& traces);

// Scalar helpers, exposed for tests.
double split_rhat(const std::vector<std::vector<double>>& chains);
double ess_autocorr(const std::vector<double>& x);

}  // namespace ludo
