#include "bgcwm/allocation.hpp"

#include <cmath>

#include "bgcwm/error.hpp"
#include "bgcwm/glasso_gaussian.hpp"

namespace bgcwm {

arma::mat allocation_probs(const Dataset& data, const MixtureState& state) {
  arma::mat lw = log_lik_matrix(data, state.comps);
  lw.each_row() += arma::log(state.pi).t();
  for (arma::uword i = 0; i < lw.n_rows; ++i) {
    const double m = lw.row(i).max();
    if (!std::isfinite(m))
      throw Error(ErrorKind::Numerical, "allocation_probs: no finite weight for observation " +
                                            std::to_string(i));
    arma::rowvec w = arma::exp(lw.row(i) - m);
    lw.row(i) = w / arma::accu(w);
  }
  return lw;
}

arma::uvec draw_allocations(const arma::mat& probs, RngStream& rng) {
  arma::uvec z(probs.n_rows);
  for (arma::uword i = 0; i < probs.n_rows; ++i)
    z[i] = sample_multinomial_index(rng, probs.row(i).t());
  return z;
}

arma::uword relabel_nonempty_first(MixtureState& state) {
  const arma::uvec counts = state.counts();
  arma::uvec order(state.K());
  arma::uword pos = 0;
  for (arma::uword k = 0; k < state.K(); ++k)
    if (counts[k] > 0) order[pos++] = k;
  const arma::uword k_plus = pos;
  for (arma::uword k = 0; k < state.K(); ++k)
    if (counts[k] == 0) order[pos++] = k;

  arma::uvec new_label(state.K());
  for (arma::uword k = 0; k < state.K(); ++k) new_label[order[k]] = k;
  std::vector<ComponentParams> comps;
  comps.reserve(state.K());
  for (arma::uword k = 0; k < state.K(); ++k) comps.push_back(std::move(state.comps[order[k]]));
  state.comps = std::move(comps);
  state.pi = state.pi.elem(order);
  for (auto& zi : state.z) zi = new_label[zi];
  return k_plus;
}

arma::vec pi_conditional(const MixtureState& state, InferenceMode mode, const Hyperparams& hyper) {
  const double g = dirichlet_concentration(mode, hyper, state.gamma, state.K());
  return arma::conv_to<arma::vec>::from(state.counts()) + g;
}

double k_conditional_log_mass(arma::uword K, const arma::uvec& occupied_counts, arma::uword n,
                              double gamma, const BnbParams& bnb) {
  const arma::uword k_plus = occupied_counts.n_elem;
  if (K < k_plus || K == 0) return -arma::datum::inf;
  const double kd = static_cast<double>(K);
  const double g_k = gamma / kd;
  double out = bnb_log_pmf(static_cast<long>(K), bnb);
  out += std::lgamma(kd + 1.0) - std::lgamma(static_cast<double>(K - k_plus) + 1.0);
  out += std::lgamma(g_k * kd) - std::lgamma(static_cast<double>(n) + g_k * kd);
  out -= static_cast<double>(k_plus) * std::lgamma(g_k);
  for (arma::uword c : occupied_counts) out += std::lgamma(static_cast<double>(c) + g_k);
  return out;
}

KConditional k_conditional(const arma::uvec& occupied_counts, arma::uword n, double gamma,
                           const BnbParams& bnb) {
  if (!(gamma > 0.0)) throw_domain("k_conditional: gamma must be positive");
  const arma::uword k_min = std::max<arma::uword>(occupied_counts.n_elem, 1);
  if (k_min > kMaxComponents) throw_domain("k_conditional: K+ exceeds the component cap");
  std::vector<double> log_mass;
  double running_max = -arma::datum::inf;
  KConditional out;
  arma::uword K = k_min;
  for (;; ++K) {
    const double lm = k_conditional_log_mass(K, occupied_counts, n, gamma, bnb);
    log_mass.push_back(lm);
    running_max = std::max(running_max, lm);
    if (lm < running_max - kKTailCutoff) break;
    if (K == kMaxComponents) {
      out.cap_hit = true;
      break;
    }
  }
  arma::vec lw(log_mass);
  arma::vec w = arma::exp(lw - lw.max());
  out.probs = w / arma::accu(w);
  out.support = arma::regspace<arma::uvec>(k_min, k_min + lw.n_elem - 1);
  return out;
}

arma::uword k_conditional_draw(const MixtureState& state, const BnbParams& bnb, RngStream& rng,
                               bool* cap_hit) {
  const arma::uvec counts = state.counts();
  const arma::uvec occupied = counts.elem(arma::find(counts > 0));
  const KConditional kc = k_conditional(occupied, state.z.n_elem, state.gamma, bnb);
  if (cap_hit) *cap_hit = kc.cap_hit;
  return kc.support[sample_multinomial_index(rng, kc.probs)];
}

double gamma_log_target(double gamma, const arma::uvec& occupied_counts, arma::uword K,
                        arma::uword n, double nu_l, double nu_r, bool literal) {
  const double kd = static_cast<double>(K);
  const double g_k = gamma / kd;
  double out = snedecor_f_log_pdf(gamma, nu_l, nu_r);
  out += static_cast<double>(occupied_counts.n_elem) * std::log(gamma);
  out += std::lgamma(gamma) - std::lgamma(static_cast<double>(n) + gamma);
  for (arma::uword c : occupied_counts) {
    const double nk = static_cast<double>(c);
    out += (literal ? std::log(nk + g_k) : std::lgamma(nk + g_k)) - std::lgamma(1.0 + g_k);
  }
  return out;
}

double gamma_mh_log_ratio(const MixtureState& state, double gamma, double proposal, double nu_l,
                          double nu_r, bool literal) {
  const arma::uvec counts = state.counts();
  const arma::uvec occupied = counts.elem(arma::find(counts > 0));
  const arma::uword n = state.z.n_elem;
  return gamma_log_target(proposal, occupied, state.K(), n, nu_l, nu_r, literal) -
         gamma_log_target(gamma, occupied, state.K(), n, nu_l, nu_r, literal) +
         std::log(proposal) - std::log(gamma);
}

GammaMhResult gamma_mh_update(const MixtureState& state, double nu_l, double nu_r,
                              double proposal_scale, RngStream& rng, bool literal) {
  if (!(proposal_scale >= 0.0)) throw_domain("gamma_mh_update: proposal scale must be >= 0");
  const double proposal = state.gamma * std::exp(proposal_scale * rng.normal());
  const double log_ratio =
      proposal == state.gamma
          ? 0.0
          : gamma_mh_log_ratio(state, state.gamma, proposal, nu_l, nu_r, literal);
  const bool accept = std::log(rng.uniform()) < log_ratio;
  return {accept ? proposal : state.gamma, accept, log_ratio};
}

void spawn_empty_components(const Dataset& data, MixtureState& state, arma::uword K_new,
                            const Hyperparams& hyper, RngStream& rng, std::size_t warm_sweeps,
                            GibbsDiagnostics& diag) {
  if (K_new == 0) throw_domain("spawn_empty_components: K must be positive");
  const arma::uvec counts = state.counts();
  if (K_new < state.K()) {
    for (arma::uword k = K_new; k < state.K(); ++k)
      if (counts[k] > 0)
        throw_invalid("spawn_empty_components: cannot drop non-empty component " +
                      std::to_string(k + 1));
    state.comps.resize(K_new);
    state.pi = state.pi.head(K_new);
  } else if (K_new > state.K()) {
    const arma::uword old_k = state.K();
    state.pi.resize(K_new);
    const ComponentSuffStats none = ComponentSuffStats::empty();
    for (arma::uword k = old_k; k < K_new; ++k) {
      ComponentParams c = neutral_component(data.p(), hyper);
      draw_regression_prior(c, hyper, rng);
      for (std::size_t s = 0; s < warm_sweeps; ++s) update_component(data, c, none, hyper, rng, diag);
      state.comps.push_back(std::move(c));
      state.pi[k] = 1e-300;
    }
  }
  state.pi /= arma::accu(state.pi);
}

}  // namespace bgcwm
