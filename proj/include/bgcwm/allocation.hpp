#ifndef BGCWM_ALLOCATION_HPP
#define BGCWM_ALLOCATION_HPP

#include <armadillo>
#include <cstddef>

#include "bgcwm/lasso_regression.hpp"
#include "bgcwm/model.hpp"
#include "bgcwm/rngdist.hpp"

namespace bgcwm {

// n x K matrix; row i holds p(z_i = k | .), normalized in log space.
arma::mat allocation_probs(const Dataset& data, const MixtureState& state);

arma::uvec draw_allocations(const arma::mat& probs, RngStream& rng);

// Moves the occupied components to the front (keeping their relative order)
// and permutes pi, z and the component list consistently. Returns K+.
arma::uword relabel_nonempty_first(MixtureState& state);

// Dirichlet concentrations gamma_k + n_k of the weight full conditional.
arma::vec pi_conditional(const MixtureState& state, InferenceMode mode, const Hyperparams& hyper);

inline constexpr arma::uword kMaxComponents = 200;
inline constexpr double kKTailCutoff = 30.0;

// Normalized full conditional of K on its truncated support. support[0] = K+.
struct KConditional {
  arma::uvec support;
  arma::vec probs;
  bool cap_hit = false;
};

// Unnormalized log mass of K given occupied cluster sizes, total n and gamma
// (with gamma_K = gamma / K).
double k_conditional_log_mass(arma::uword K, const arma::uvec& occupied_counts, arma::uword n,
                              double gamma, const BnbParams& bnb);

KConditional k_conditional(const arma::uvec& occupied_counts, arma::uword n, double gamma,
                           const BnbParams& bnb);

arma::uword k_conditional_draw(const MixtureState& state, const BnbParams& bnb, RngStream& rng,
                               bool* cap_hit = nullptr);

// Log of the gamma full-conditional target (F prior included).
double gamma_log_target(double gamma, const arma::uvec& occupied_counts, arma::uword K,
                        arma::uword n, double nu_l, double nu_r, bool literal);

struct GammaMhResult {
  double gamma;
  bool accepted;
  double log_ratio;
};

// Random walk on log(gamma); the log-scale Jacobian gamma'/gamma enters the
// acceptance ratio.
GammaMhResult gamma_mh_update(const MixtureState& state, double nu_l, double nu_r,
                              double proposal_scale, RngStream& rng, bool literal = false);

// Log acceptance ratio for moving gamma -> proposal.
double gamma_mh_log_ratio(const MixtureState& state, double gamma, double proposal, double nu_l,
                          double nu_r, bool literal);

// Resizes the component list to K_new. Trailing empty components are dropped
// when shrinking. New components take an exact prior draw of the regression
// block, neutral covariate-block values, and then `warm_sweeps` prior-only
// Gibbs passes. Occupied components are never touched.
void spawn_empty_components(const Dataset& data, MixtureState& state, arma::uword K_new,
                            const Hyperparams& hyper, RngStream& rng, std::size_t warm_sweeps,
                            GibbsDiagnostics& diag);

}  // namespace bgcwm

#endif  // BGCWM_ALLOCATION_HPP
