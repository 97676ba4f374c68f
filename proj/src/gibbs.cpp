#include "ludo/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "ludo/normal.hpp"

namespace ludo {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// Standardized truncated-normal draw on [lo, hi], lo < hi. Based on Botev's
// accept-reject scheme: Rayleigh proposal in the tail, plain rejection for
// wide central intervals, inverse CDF for narrow ones.
double truncnorm_std(double lo, double hi, Rng& rng) {
  constexpr double kTailCut = 0.4;
  constexpr double kWidthCut = 2.05;

  if (lo == -kInf && hi == kInf) return rng.normal();

  if (lo > kTailCut) {
    // Rayleigh rejection on the right tail.
    const double c = 0.5 * lo * lo;
    const double f = (hi == kInf) ? -1.0 : std::expm1(c - 0.5 * hi * hi);
    double x;
    do {
      x = c - std::log1p(f * rng.uniform());
      const double u = rng.uniform();
      if (x * u * u <= c) return std::sqrt(2.0 * x);
    } while (true);
  }
  if (hi < -kTailCut) return -truncnorm_std(-hi, -lo, rng);

  if (hi - lo > kWidthCut) {
    // Central interval wide enough for plain rejection.
    double x;
    do {
      x = rng.normal();
    } while (x < lo || x > hi);
    return x;
  }
  // Narrow central interval: inverse CDF.
  const double plo = norm_cdf(lo);
  const double phi_hi = norm_cdf(hi);
  const double u = plo + (phi_hi - plo) * rng.uniform();
  double x = norm_quantile(std::min(std::max(u, 1e-300), 1.0 - 1e-16));
  // Guard against quantile round-off at the interval edges.
  if (x < lo) x = lo;
  if (x > hi) x = hi;
  return x;
}

double tie_threshold(double sigma_sq, double p) {
  return std::sqrt(2.0 * (1.0 + sigma_sq)) * norm_quantile(0.5 * (1.0 + p));
}

}  // namespace

double sample_truncnorm(double mean, double sd, double lo, double hi, Rng& rng) {
  if (!(sd > 0.0)) throw std::domain_error("sample_truncnorm: sd must be > 0");
  if (!(lo < hi)) throw std::domain_error("sample_truncnorm: empty interval");
  const double a = (lo == -kInf) ? -kInf : (lo - mean) / sd;
  const double b = (hi == kInf) ? kInf : (hi - mean) / sd;
  return mean + sd * truncnorm_std(a, b, rng);
}

void GibbsConfig::validate() const {
  if (!(a_sigma > 0.0 && b_sigma > 0.0 && a_p > 0.0 && b_p > 0.0)) {
    throw std::invalid_argument("gibbs config: hyperparameters must be > 0");
  }
  if (samples < 1) throw std::invalid_argument("gibbs config: samples must be >= 1");
  if (burn_in < 0) throw std::invalid_argument("gibbs config: burn_in must be >= 0");
  if (thin < 1) throw std::invalid_argument("gibbs config: thin must be >= 1");
}

struct GibbsWorkspace::Impl {
  int A = 0;
  GibbsConfig cfg;
  std::vector<std::pair<std::int32_t, std::int32_t>> pairs;
  std::vector<Outcome> outcomes;
  std::int64_t n = 0;
  std::int64_t n_ties = 0;

  // x^T x scaled by the likelihood precision (1/2, or 1 for the alternate
  // convention); the diagonal prior term is added per sweep.
  Eigen::SparseMatrix<double> xtx_scaled;
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt;
  bool pattern_ready = false;
  bool use_joint = true;

  // CSR adjacency for the single-site path: per player, (match row, sign).
  std::vector<std::int64_t> adj_offset;
  std::vector<std::pair<std::int32_t, std::int8_t>> adj;

  double like_prec() const { return cfg.alt_skill_precision ? 1.0 : 0.5; }
  double prior_prec(double sigma_sq) const {
    return cfg.alt_skill_precision ? std::sqrt(2.0) / sigma_sq : 1.0 / sigma_sq;
  }
};

GibbsWorkspace::GibbsWorkspace(const std::vector<MatchRecord>& matches, int population_size,
                               const GibbsConfig& config)
    : impl_(std::make_unique<Impl>()) {
  config.validate();
  impl_->A = population_size;
  impl_->cfg = config;
  impl_->n = static_cast<std::int64_t>(matches.size());
  impl_->pairs.reserve(matches.size());
  impl_->outcomes.reserve(matches.size());
  for (const auto& m : matches) {
    impl_->pairs.emplace_back(m.first, m.second);
    impl_->outcomes.push_back(m.outcome);
    if (m.outcome == Outcome::kTie) impl_->n_ties++;
  }

  impl_->use_joint = population_size <= config.direct_solve_threshold;
  if (impl_->use_joint) {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(matches.size() * 4 + static_cast<std::size_t>(population_size));
    const double w = impl_->like_prec();
    // Explicit diagonal keeps the sparsity pattern fixed across sweeps.
    for (int a = 0; a < population_size; ++a) trips.emplace_back(a, a, 0.0);
    for (const auto& [i, j] : impl_->pairs) {
      trips.emplace_back(i, i, w);
      trips.emplace_back(j, j, w);
      trips.emplace_back(i, j, -w);
      trips.emplace_back(j, i, -w);
    }
    impl_->xtx_scaled.resize(population_size, population_size);
    impl_->xtx_scaled.setFromTriplets(trips.begin(), trips.end());
  } else {
    std::vector<std::int64_t> counts(static_cast<std::size_t>(population_size), 0);
    for (const auto& [i, j] : impl_->pairs) {
      counts[static_cast<std::size_t>(i)]++;
      counts[static_cast<std::size_t>(j)]++;
    }
    impl_->adj_offset.assign(static_cast<std::size_t>(population_size) + 1, 0);
    for (int a = 0; a < population_size; ++a) {
      impl_->adj_offset[static_cast<std::size_t>(a) + 1] =
          impl_->adj_offset[static_cast<std::size_t>(a)] + counts[static_cast<std::size_t>(a)];
    }
    impl_->adj.resize(static_cast<std::size_t>(impl_->adj_offset.back()));
    std::vector<std::int64_t> cursor(impl_->adj_offset.begin(), impl_->adj_offset.end() - 1);
    for (std::int32_t r = 0; r < static_cast<std::int32_t>(impl_->pairs.size()); ++r) {
      const auto& [i, j] = impl_->pairs[static_cast<std::size_t>(r)];
      impl_->adj[static_cast<std::size_t>(cursor[static_cast<std::size_t>(i)]++)] = {r, +1};
      impl_->adj[static_cast<std::size_t>(cursor[static_cast<std::size_t>(j)]++)] = {r, -1};
    }
  }
}

GibbsWorkspace::~GibbsWorkspace() = default;
GibbsWorkspace::GibbsWorkspace(GibbsWorkspace&&) noexcept = default;
GibbsWorkspace& GibbsWorkspace::operator=(GibbsWorkspace&&) noexcept = default;

int GibbsWorkspace::population_size() const { return impl_->A; }

GibbsState GibbsWorkspace::initial_state() const {
  const auto& cfg = impl_->cfg;
  GibbsState st;
  st.s.assign(static_cast<std::size_t>(impl_->A), 0.0);
  st.y.assign(static_cast<std::size_t>(impl_->n), 0.0);
  st.sigma_sq = cfg.a_sigma > 1.0 ? cfg.b_sigma / (cfg.a_sigma - 1.0) : cfg.b_sigma;
  st.p = cfg.a_p / (cfg.a_p + cfg.b_p);
  st.t = tie_threshold(st.sigma_sq, st.p);
  return st;
}

void GibbsWorkspace::draw_skills_joint(GibbsState& state, Rng& rng) {
  auto& im = *impl_;
  const int A = im.A;
  Eigen::SparseMatrix<double> prec = im.xtx_scaled;
  const double dp = im.prior_prec(state.sigma_sq);
  for (int a = 0; a < A; ++a) prec.coeffRef(a, a) += dp;

  if (!im.pattern_ready) {
    im.llt.analyzePattern(prec);
    im.pattern_ready = true;
  }
  im.llt.factorize(prec);
  if (im.llt.info() != Eigen::Success) {
    throw std::runtime_error("gibbs: skill-draw factorization failed (sigma_sq = " +
                             std::to_string(state.sigma_sq) + ")");
  }

  // b = likelihood precision * x^T y.
  Eigen::VectorXd b = Eigen::VectorXd::Zero(A);
  const double w = im.like_prec();
  for (std::size_t r = 0; r < im.pairs.size(); ++r) {
    const auto& [i, j] = im.pairs[r];
    b[i] += w * state.y[r];
    b[j] -= w * state.y[r];
  }
  const Eigen::VectorXd mu = im.llt.solve(b);

  // s = mu + Pinv * (U^{-1} z): covariance equals the precision inverse.
  Eigen::VectorXd z(A);
  for (int a = 0; a < A; ++a) z[a] = rng.normal();
  Eigen::VectorXd v = im.llt.matrixU().solve(z);
  Eigen::VectorXd draw = im.llt.permutationPinv() * v;
  for (int a = 0; a < A; ++a) state.s[static_cast<std::size_t>(a)] = mu[a] + draw[a];
}

void GibbsWorkspace::draw_skills_single_site(GibbsState& state, Rng& rng) {
  auto& im = *impl_;
  const double w = im.like_prec();
  const double dp = im.prior_prec(state.sigma_sq);
  for (int a = 0; a < im.A; ++a) {
    double num = 0.0;
    double prec = dp;
    for (std::int64_t k = im.adj_offset[static_cast<std::size_t>(a)];
         k < im.adj_offset[static_cast<std::size_t>(a) + 1]; ++k) {
      const auto& [r, sign] = im.adj[static_cast<std::size_t>(k)];
      const auto& [i, j] = im.pairs[static_cast<std::size_t>(r)];
      // Residual target for player a in row r: y_r = s_i - s_j + noise.
      if (sign > 0) {
        num += w * (state.y[static_cast<std::size_t>(r)] + state.s[static_cast<std::size_t>(j)]);
      } else {
        num += w * (state.s[static_cast<std::size_t>(i)] - state.y[static_cast<std::size_t>(r)]);
      }
      prec += w;
    }
    state.s[static_cast<std::size_t>(a)] = num / prec + rng.normal() / std::sqrt(prec);
  }
}

void GibbsWorkspace::sweep(GibbsState& state, Rng& rng) {
  auto& im = *impl_;
  const auto& cfg = im.cfg;

  // (i) p | o: collapsed draw; the conditional depends on the data only.
  state.p = rng.beta(cfg.a_p + static_cast<double>(im.n_ties),
                     cfg.b_p + static_cast<double>(im.n - im.n_ties));

  // (ii) sigma^2 | s.
  double ss = 0.0;
  for (double v : state.s) ss += v * v;
  const double shape = cfg.a_sigma + 0.5 * static_cast<double>(im.A);
  const double scale = cfg.b_sigma + 0.5 * ss;
  state.sigma_sq = scale / rng.gamma(shape);

  // (iii) t is deterministic given (sigma^2, p).
  state.t = tie_threshold(state.sigma_sq, state.p);

  // (iv) y_i | s, t, o_i: truncated to the outcome's interval.
  const double sd = std::sqrt(2.0);
  for (std::size_t r = 0; r < im.pairs.size(); ++r) {
    const auto& [i, j] = im.pairs[r];
    const double d = state.s[static_cast<std::size_t>(i)] - state.s[static_cast<std::size_t>(j)];
    switch (im.outcomes[r]) {
      case Outcome::kFirstWin:
        state.y[r] = sample_truncnorm(d, sd, state.t, kInf, rng);
        break;
      case Outcome::kTie:
        state.y[r] = sample_truncnorm(d, sd, -state.t, state.t, rng);
        break;
      case Outcome::kSecondWin:
        state.y[r] = sample_truncnorm(d, sd, -kInf, -state.t, rng);
        break;
    }
  }

  // (v) s | y, sigma^2: joint draw, or scalar scan for very large A.
  if (im.use_joint) {
    draw_skills_joint(state, rng);
  } else {
    draw_skills_single_site(state, rng);
  }
}

std::pair<GibbsTrace, PosteriorSummary> run_chain(const std::vector<MatchRecord>& matches,
                                                  const Population& pop,
                                                  const GibbsConfig& config) {
  config.validate();
  GibbsWorkspace ws(matches, pop.size(), config);
  GibbsState st = ws.initial_state();
  Rng rng(config.seed, 0);

  for (int it = 0; it < config.burn_in; ++it) ws.sweep(st, rng);

  GibbsTrace trace;
  trace.sigma_sq.reserve(static_cast<std::size_t>(config.samples));
  trace.p.reserve(static_cast<std::size_t>(config.samples));
  trace.t.reserve(static_cast<std::size_t>(config.samples));
  trace.ell2.reserve(static_cast<std::size_t>(config.samples));
  for (int k = 0; k < config.samples; ++k) {
    for (int j = 0; j < config.thin; ++j) ws.sweep(st, rng);
    trace.sigma_sq.push_back(st.sigma_sq);
    trace.p.push_back(st.p);
    trace.t.push_back(st.t);
    trace.ell2.push_back(1.0 / (1.0 + st.sigma_sq));
    if (config.keep_skills) trace.skills.push_back(st.s);
  }
  PosteriorSummary summary = summarize_trace(trace);
  return {std::move(trace), summary};
}

namespace {

double quantile_type7(std::vector<double> x, double q) {
  std::sort(x.begin(), x.end());
  const double h = (static_cast<double>(x.size()) - 1.0) * q;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, x.size() - 1);
  return x[lo] + (h - std::floor(h)) * (x[hi] - x[lo]);
}

SummaryStat summarize_scalar(const std::vector<double>& x) {
  SummaryStat s;
  const double n = static_cast<double>(x.size());
  for (double v : x) s.mean += v;
  s.mean /= n;
  double var = 0.0;
  for (double v : x) var += (v - s.mean) * (v - s.mean);
  s.sd = x.size() > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
  s.q025 = quantile_type7(x, 0.025);
  s.q50 = quantile_type7(x, 0.50);
  s.q975 = quantile_type7(x, 0.975);
  s.ess = ess_autocorr(x);
  return s;
}

}  // namespace

PosteriorSummary summarize_trace(const GibbsTrace& trace) {
  if (trace.ell2.empty()) throw std::invalid_argument("summarize_trace: empty trace");
  PosteriorSummary sum;
  sum.ell2 = summarize_scalar(trace.ell2);
  sum.t = summarize_scalar(trace.t);
  return sum;
}

double ess_autocorr(const std::vector<double>& x) {
  const std::size_t n = x.size();
  if (n < 4) return static_cast<double>(n);
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  double c0 = 0.0;
  for (double v : x) c0 += (v - mean) * (v - mean);
  c0 /= static_cast<double>(n);
  if (c0 <= 0.0) return static_cast<double>(n);  // constant sequence

  // Geyer initial positive sequence over paired autocovariances.
  double tau = 1.0;
  double prev_pair = kInf;
  for (std::size_t k = 1; k + 1 < n; k += 2) {
    auto gamma = [&](std::size_t lag) {
      double c = 0.0;
      for (std::size_t i = 0; i + lag < n; ++i) c += (x[i] - mean) * (x[i + lag] - mean);
      return c / static_cast<double>(n);
    };
    double pair = gamma(k) + gamma(k + 1);
    if (pair <= 0.0) break;
    pair = std::min(pair, prev_pair);  // enforce monotone sequence
    prev_pair = pair;
    tau += 2.0 * pair / c0;
    if (k > 2000) break;
  }
  return static_cast<double>(n) / tau;
}

double split_rhat(const std::vector<std::vector<double>>& chains) {
  if (chains.size() < 2) throw std::invalid_argument("split_rhat: need >= 2 chains");
  const std::size_t len = chains.front().size();
  for (const auto& c : chains) {
    if (c.size() != len) throw std::invalid_argument("split_rhat: chain length mismatch");
  }
  if (len < 4) throw std::invalid_argument("split_rhat: chains too short");

  // Pool, rank (ties averaged), map through the normal quantile.
  std::vector<double> pooled;
  pooled.reserve(chains.size() * len);
  for (const auto& c : chains) pooled.insert(pooled.end(), c.begin(), c.end());
  const std::size_t S = pooled.size();
  std::vector<std::size_t> idx(S);
  for (std::size_t i = 0; i < S; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return pooled[a] < pooled[b];
  });
  std::vector<double> rank(S);
  std::size_t i = 0;
  while (i < S) {
    std::size_t j = i;
    while (j + 1 < S && pooled[idx[j + 1]] == pooled[idx[i]]) ++j;
    const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[idx[k]] = avg;
    i = j + 1;
  }
  std::vector<double> z(S);
  bool constant = true;
  for (std::size_t k = 0; k < S; ++k) {
    z[k] = norm_quantile((rank[k] - 0.375) / (static_cast<double>(S) + 0.25));
    if (pooled[k] != pooled[0]) constant = false;
  }
  if (constant) return 1.0;

  // Split each chain in half.
  std::vector<std::vector<double>> halves;
  const std::size_t half = len / 2;
  for (std::size_t c = 0; c < chains.size(); ++c) {
    const double* base = z.data() + c * len;
    halves.emplace_back(base, base + half);
    halves.emplace_back(base + half, base + 2 * half);
  }
  const double m = static_cast<double>(halves.size());
  const double nn = static_cast<double>(half);
  double grand = 0.0;
  std::vector<double> means;
  std::vector<double> vars;
  for (const auto& h : halves) {
    double mu = 0.0;
    for (double v : h) mu += v;
    mu /= nn;
    double vv = 0.0;
    for (double v : h) vv += (v - mu) * (v - mu);
    vv /= (nn - 1.0);
    means.push_back(mu);
    vars.push_back(vv);
    grand += mu / m;
  }
  double B = 0.0;
  for (double mu : means) B += (mu - grand) * (mu - grand);
  B *= nn / (m - 1.0);
  double W = 0.0;
  for (double vv : vars) W += vv / m;
  if (W <= 0.0) return 1.0;
  const double var_plus = (nn - 1.0) / nn * W + B / nn;
  return std::sqrt(var_plus / W);
}

ChainDiagnostics multi_chain_diagnostics(const std::vector<GibbsTrace>& traces) {
  if (traces.size() < 2) throw std::invalid_argument("multi_chain_diagnostics: need >= 2 chains");
  const std::size_t len = traces.front().sigma_sq.size();
  for (const auto& t : traces) {
    if (t.sigma_sq.size() != len || t.t.size() != len) {
      throw std::invalid_argument("multi_chain_diagnostics: trace length mismatch");
    }
  }
  std::vector<std::vector<double>> sig, tt;
  for (const auto& t : traces) {
    sig.push_back(t.sigma_sq);
    tt.push_back(t.t);
  }
  ChainDiagnostics d;
  d.rhat_sigma_sq = split_rhat(sig);
  d.rhat_t = split_rhat(tt);
  double ess_s = 0.0, ess_t = 0.0;
  for (const auto& t : traces) {
    ess_s += ess_autocorr(t.sigma_sq);
    ess_t += ess_autocorr(t.t);
  }
  d.ess_sigma_sq = ess_s;
  d.ess_t = ess_t;
  d.warn = d.rhat_sigma_sq > 1.05 || d.rhat_t > 1.05;
  return d;
}

}  // namespace ludo
