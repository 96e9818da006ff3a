#ifndef BGCWM_LASSO_REGRESSION_HPP
#define BGCWM_LASSO_REGRESSION_HPP

#include <armadillo>

#include "bgcwm/model.hpp"
#include "bgcwm/rngdist.hpp"

namespace bgcwm {

// Observations currently allocated to one component. An empty member list is
// a legal state: every conditional below then reduces to its prior form.
struct ComponentSuffStats {
  arma::uvec members;

  arma::uword n_k() const { return members.n_elem; }
  static ComponentSuffStats for_component(const arma::uvec& z, arma::uword k);
  static ComponentSuffStats empty() { return {}; }
};

struct NormalParams {
  double mean;
  double variance;
};

struct MvNormalParams {
  arma::vec mean;
  arma::mat covariance;
};

struct GammaParams {
  double shape;
  double rate;
};

struct InvGaussianParams {
  double mean;
  double shape;
  bool saturated;  // |coefficient| was floored at kCoefficientFloor
};

inline constexpr double kCoefficientFloor = 1e-12;

// Counters for numerical guards hit while sweeping.
struct GibbsDiagnostics {
  std::size_t tau_saturations = 0;
  std::size_t phi_saturations = 0;
};

NormalParams alpha_conditional(const Dataset& data, const ComponentParams& comp,
                               const ComponentSuffStats& stats, double sigma_alpha2);

// Throws Error(Numerical) when A_k is numerically singular (condition number
// of its unit-diagonal scaling above 1e12).
MvNormalParams beta_conditional(const Dataset& data, const ComponentParams& comp,
                                const ComponentSuffStats& stats, double alpha);

GammaParams sigma2_conditional(const Dataset& data, const ComponentParams& comp,
                               const ComponentSuffStats& stats, double alpha,
                               const arma::vec& beta, double a, double b);

// Parameters of the inverse-Gaussian law of 1/tau2_j.
InvGaussianParams tau2_conditional(const ComponentParams& comp, arma::uword j);

// Gamma law of lambda^2.
GammaParams lambda2_conditional(const ComponentParams& comp);

GammaParams delta_conditional(const ComponentParams& comp);

// Steps alpha, beta, sigma2, tau2, lambda, delta in that order, each draw
// conditioning on the values drawn before it.
void update_regression_block(const Dataset& data, ComponentParams& comp,
                             const ComponentSuffStats& stats, const Hyperparams& hyper,
                             RngStream& rng, GibbsDiagnostics& diag);

// Exact draw of (delta, lambda, sigma2, tau2, beta, alpha) from the prior,
// through the half-Cauchy and Laplace scale-mixture representations.
void draw_regression_prior(ComponentParams& comp, const Hyperparams& hyper, RngStream& rng);

}  // namespace bgcwm

#endif  // BGCWM_LASSO_REGRESSION_HPP
