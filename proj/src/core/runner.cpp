#include "bgcwm/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "bgcwm/allocation.hpp"
#include "bgcwm/glasso_gaussian.hpp"

namespace bgcwm {

namespace {

constexpr double kRidge = 1e-6;
constexpr double kDiagonalLoad = 1e-3;
constexpr double kVarianceFloor = 1e-8;

#ifdef NDEBUG
constexpr std::size_t kPdCheckEvery = 100;
#else
constexpr std::size_t kPdCheckEvery = 1;
#endif

struct Moments {
  double alpha;
  arma::vec beta;
  double sigma2;
  arma::vec mu;
  arma::mat omega;
};

Moments fit_moments(const arma::vec& y, const arma::mat& X) {
  const arma::uword n = X.n_rows;
  const arma::uword p = X.n_cols;
  arma::mat design(n, p + 1);
  design.col(0).ones();
  design.cols(1, p) = X;
  arma::mat gram = design.t() * design;
  gram.diag() += kRidge;
  arma::vec coef;
  if (!arma::solve(coef, arma::symmatu(gram), design.t() * y, arma::solve_opts::likely_sympd))
    throw Error(ErrorKind::Numerical, "initialize: least-squares system is singular");
  const arma::vec resid = y - design * coef;
  const double dof = std::max<double>(static_cast<double>(n) - static_cast<double>(p) - 1.0, 1.0);

  Moments m;
  m.alpha = coef[0];
  m.beta = coef.tail(p);
  m.sigma2 = std::max(arma::dot(resid, resid) / dof, kVarianceFloor);
  m.mu = arma::mean(X, 0).t();
  arma::mat cov = n > 1 ? arma::mat(arma::cov(X)) : arma::mat(p, p, arma::fill::zeros);
  cov.diag() += kDiagonalLoad;
  if (!arma::inv_sympd(m.omega, arma::symmatu(cov)))
    throw Error(ErrorKind::Numerical, "initialize: regularized covariance is singular");
  m.omega = 0.5 * (m.omega + m.omega.t());
  return m;
}

ComponentParams component_from(const Moments& m, const Hyperparams& hyper) {
  ComponentParams c = neutral_component(m.beta.n_elem, hyper);
  c.alpha = m.alpha;
  c.beta = m.beta;
  c.sigma2 = m.sigma2;
  c.mu = m.mu;
  c.omega = m.omega;
  return c;
}

arma::mat standardized_rows(const Dataset& data) {
  arma::mat Z = arma::join_rows(data.y, data.X);
  for (arma::uword j = 0; j < Z.n_cols; ++j) {
    Z.col(j) -= arma::mean(Z.col(j));
    const double sd = Z.n_rows > 1 ? arma::stddev(Z.col(j)) : 0.0;
    if (sd > 0.0) Z.col(j) /= sd;
  }
  return Z;
}

void check_positive_definite(const MixtureState& state) {
  for (arma::uword k = 0; k < state.K(); ++k) {
    arma::mat L;
    if (!state.comps[k].omega.is_finite() || !arma::chol(L, arma::symmatu(state.comps[k].omega))) {
      arma::vec ev;
      const bool ok = state.comps[k].omega.is_finite() &&
                      arma::eig_sym(ev, arma::symmatu(state.comps[k].omega));
      throw FactorizationError("component " + std::to_string(k + 1) + " precision lost definiteness",
                               ok ? ev.min() : std::nan(""));
    }
  }
}

}  // namespace

ChainStreams::ChainStreams(const RngStream& chain)
    : init(chain.derive(1)),
      alloc(chain.derive(2)),
      comp(chain.derive(3)),
      weights(chain.derive(4)),
      k(chain.derive(5)),
      gamma(chain.derive(6)),
      spawn(chain.derive(7)) {}

arma::uword fixed_component_count(const RunConfig& config) {
  switch (config.mode) {
    case InferenceMode::FixedK:
      return config.k;
    case InferenceMode::Overfitting:
      return config.k_max;
    case InferenceMode::Telescoping:
      return 0;
  }
  return 0;
}

SweepInfo gibbs_sweep(const Dataset& data, MixtureState& state, const RunConfig& config,
                      ChainStreams& rng, GibbsDiagnostics& diag) {
  SweepInfo info;
  state.z = draw_allocations(allocation_probs(data, state), rng.alloc);
  relabel_nonempty_first(state);

  for (arma::uword k = 0; k < state.K(); ++k)
    update_component(data, state.comps[k], ComponentSuffStats::for_component(state.z, k),
                     config.hyper, rng.comp, diag);

  state.pi = sample_dirichlet(rng.weights, pi_conditional(state, config.mode, config.hyper));

  if (config.mode != InferenceMode::Telescoping) return info;

  const arma::uword K_new = k_conditional_draw(state, config.hyper.bnb, rng.k, &info.k_cap_hit);
  if (K_new != state.K()) {
    spawn_empty_components(data, state, K_new, config.hyper, rng.spawn, config.warm_sweeps, diag);
    info.k_changed = true;
  }
  const GammaMhResult g =
      gamma_mh_update(state, config.hyper.nu_l, config.hyper.nu_r, config.gamma_proposal_scale,
                      rng.gamma, config.hyper.literal_gamma_target);
  state.gamma = g.gamma;
  info.gamma_accepted = g.accepted;
  if (info.k_changed)
    state.pi = sample_dirichlet(rng.weights, pi_conditional(state, config.mode, config.hyper));
  return info;
}

MixtureState state_from_partition(const Dataset& data, const arma::uvec& labels, arma::uword K,
                                  const Hyperparams& hyper, double gamma) {
  if (K == 0) throw_invalid("state_from_partition: K must be positive");
  if (labels.n_elem != data.n()) throw_invalid("state_from_partition: label count differs from n");
  if (labels.n_elem > 0 && labels.max() >= K) throw_invalid("state_from_partition: label out of range");
  const Moments pooled = fit_moments(data.y, data.X);
  const arma::uword p = data.p();

  MixtureState state;
  state.z = labels;
  state.gamma = gamma;
  for (arma::uword k = 0; k < K; ++k) {
    const arma::uvec members = arma::find(labels == k);
    if (members.n_elem >= p + 2) {
      state.comps.push_back(component_from(fit_moments(data.y.elem(members), data.X.rows(members)), hyper));
    } else {
      ComponentParams c = component_from(pooled, hyper);
      if (members.n_elem > 0) c.mu = arma::mean(data.X.rows(members), 0).t();
      state.comps.push_back(std::move(c));
    }
  }
  const arma::vec counts = arma::conv_to<arma::vec>::from(state.counts());
  state.pi = (counts + 1.0) / (static_cast<double>(data.n()) + static_cast<double>(K));
  return state;
}

arma::uvec kmeans(const arma::mat& points, arma::uword K, RngStream& rng, std::size_t max_iter) {
  const arma::uword n = points.n_rows;
  if (K == 0 || K > n) throw_invalid("kmeans: K must lie in 1..n");
  arma::mat centers(K, points.n_cols);
  centers.row(0) = points.row(static_cast<arma::uword>(rng.uniform() * n) % n);
  arma::vec d2(n);
  d2.fill(arma::datum::inf);
  for (arma::uword c = 1; c < K; ++c) {
    for (arma::uword i = 0; i < n; ++i)
      d2[i] = std::min(d2[i], arma::accu(arma::square(points.row(i) - centers.row(c - 1))));
    const double total = arma::accu(d2);
    arma::uword pick = 0;
    if (total > 0.0) {
      pick = sample_multinomial_index(rng, d2 / total);
    } else {
      pick = static_cast<arma::uword>(rng.uniform() * n) % n;
    }
    centers.row(c) = points.row(pick);
  }

  arma::uvec labels(n, arma::fill::zeros);
  for (std::size_t it = 0; it < max_iter; ++it) {
    bool changed = it == 0;
    for (arma::uword i = 0; i < n; ++i) {
      arma::uword best = 0;
      double best_d = arma::datum::inf;
      for (arma::uword c = 0; c < K; ++c) {
        const double d = arma::accu(arma::square(points.row(i) - centers.row(c)));
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (labels[i] != best) {
        labels[i] = best;
        changed = true;
      }
    }
    if (!changed) break;
    for (arma::uword c = 0; c < K; ++c) {
      const arma::uvec members = arma::find(labels == c);
      if (members.n_elem > 0) centers.row(c) = arma::mean(points.rows(members), 0);
    }
  }
  return labels;
}

MixtureState initialize(const Dataset& data, const RunConfig& config, ChainStreams& rng,
                        GibbsDiagnostics& diag) {
  const arma::mat Z = standardized_rows(data);
  const arma::uword held = fixed_component_count(config);
  const std::size_t restarts = std::max<std::size_t>(config.init_restarts, 1);

  MixtureState best;
  double best_score = -arma::datum::inf;
  std::string last_error;
  for (std::size_t r = 0; r < restarts; ++r) {
    ChainStreams local(rng.init.derive(r));
    arma::uword K0 = config.k;
    if (config.mode != InferenceMode::FixedK) {
      const arma::uword span = config.init_k_max - config.init_k_min + 1;
      K0 = config.init_k_min + static_cast<arma::uword>(local.init.uniform() * span) % span;
    }
    if (config.mode == InferenceMode::Overfitting) K0 = std::min(K0, config.k_max);
    K0 = std::min<arma::uword>(K0, data.n());
    try {
      MixtureState cand = state_from_partition(data, kmeans(Z, K0, local.init), K0, config.hyper,
                                               config.initial_gamma);
      if (held > cand.K()) {
        relabel_nonempty_first(cand);
        spawn_empty_components(data, cand, held, config.hyper, local.spawn, config.warm_sweeps, diag);
      }
      gibbs_sweep(data, cand, config, local, diag);
      const double score = log_posterior_unnorm(data, cand, config.hyper, config.mode);
      if (std::isfinite(score) && score > best_score) {
        best_score = score;
        best = std::move(cand);
      }
    } catch (const Error& e) {
      last_error = e.what();
    }
  }
  if (!std::isfinite(best_score))
    throw Error(ErrorKind::Numerical, "initialize: every restart failed" +
                                          (last_error.empty() ? std::string() : ": " + last_error));
  return best;
}

DrawArchive run_chain(const Dataset& data, const RunConfig& config, std::size_t chain) {
  data.validate();
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();

  DrawArchive ar;
  ar.config = config;
  ar.chain = chain;
  ar.seed = config.seed_for_chain(chain);
  ar.n = data.n();
  ar.p = data.p();
  ar.trace.reserve(config.iterations);
  ar.draws.reserve(config.retained_draws());

  ChainStreams rng(RngStream(ar.seed, config.stream_for_chain(chain)));
  MixtureState state = initialize(data, config, rng, ar.diag);

  for (std::size_t t = 1; t <= config.iterations; ++t) {
    TraceRow row;
    try {
      const SweepInfo info = gibbs_sweep(data, state, config, rng, ar.diag);
      if (info.k_cap_hit) ++ar.k_cap_hits;
      if (info.gamma_accepted) ++ar.gamma_accepts;
      if (t % kPdCheckEvery == 0) check_positive_definite(state);
      row.iteration = t;
      row.K = state.K();
      row.k_plus = state.k_plus();
      row.gamma = state.gamma;
      row.log_lik = observed_log_lik(data, state);
      row.log_post = log_posterior_unnorm(data, state, config.hyper, config.mode);
    } catch (const Error& e) {
      throw ChainAbort(e, t, state);
    }
    ar.trace.push_back(row);
    if (t > config.burn_in && (t - config.burn_in) % config.thin == 0)
      ar.draws.push_back(Draw{row, state.pi, state.z, state.comps});
  }

  if (ar.k_cap_hits > 0)
    ar.warnings.push_back("K conditional reached the component cap in " +
                          std::to_string(ar.k_cap_hits) + " sweeps");
  if (ar.diag.tau_saturations + ar.diag.phi_saturations > 0)
    ar.warnings.push_back("coefficient floor hit " +
                          std::to_string(ar.diag.tau_saturations + ar.diag.phi_saturations) +
                          " times in shrinkage updates");
  ar.warnings.push_back("log_post omits the normalizing constant of the graphical-lasso prior");
  if (config.mode == InferenceMode::Telescoping || config.mode == InferenceMode::Overfitting)
    ar.warnings.push_back("new empty components start from " + std::to_string(config.warm_sweeps) +
                          " prior Gibbs sweeps, not exact prior draws");
  ar.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return ar;
}

ModeReport screen_modes(const std::vector<std::vector<double>>& log_post, std::size_t window,
                        double gap) {
  ModeReport rep;
  const std::size_t m = log_post.size();
  rep.terminal_mean.resize(m);
  rep.group.assign(m, 0);
  for (std::size_t c = 0; c < m; ++c) {
    const auto& lp = log_post[c];
    if (lp.empty()) throw_invalid("screen_modes: chain " + std::to_string(c + 1) + " has no draws");
    const std::size_t w = std::min(window, lp.size());
    rep.terminal_mean[c] = std::accumulate(lp.end() - w, lp.end(), 0.0) / static_cast<double>(w);
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return rep.terminal_mean[a] > rep.terminal_mean[b];
  });
  int g = 0;
  for (std::size_t r = 0; r < m; ++r) {
    if (r > 0 && rep.terminal_mean[order[r - 1]] - rep.terminal_mean[order[r]] > gap) ++g;
    rep.group[order[r]] = g;
  }
  for (std::size_t c = 0; c < m; ++c)
    (rep.group[c] == 0 ? rep.main_chains : rep.minor_chains).push_back(c);
  return rep;
}

MultiChainResult run_multichain(const Dataset& data, const RunConfig& config) {
  config.validate();
  MultiChainResult out;
  out.chains.resize(config.chains);
  const std::size_t workers = std::clamp<std::size_t>(config.jobs, 1, config.chains);
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::exception_ptr failure;
  auto work = [&] {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= config.chains) return;
      try {
        out.chains[c] = run_chain(data, config, c);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
        next = config.chains;
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<std::vector<double>> lp;
  for (const auto& ch : out.chains) {
    std::vector<double> v;
    for (const auto& d : ch.draws) v.push_back(d.info.log_post);
    if (v.empty())
      for (const auto& r : ch.trace) v.push_back(r.log_post);
    lp.push_back(std::move(v));
  }
  out.modes = screen_modes(lp, config.mode_window, config.minor_mode_gap);
  return out;
}

}  // namespace bgcwm
