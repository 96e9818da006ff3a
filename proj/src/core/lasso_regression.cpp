#include "bgcwm/lasso_regression.hpp"

#include <algorithm>
#include <cmath>

#include "bgcwm/error.hpp"

namespace bgcwm {

namespace {

// Scale parameters are kept inside this range so products such as
// sum(tau2) stay finite during long prior-only excursions.
constexpr double kScaleMin = 1e-150;
constexpr double kScaleMax = 1e150;

double clamp_scale(double v) { return std::clamp(v, kScaleMin, kScaleMax); }

}  // namespace

ComponentSuffStats ComponentSuffStats::for_component(const arma::uvec& z, arma::uword k) {
  return ComponentSuffStats{arma::find(z == k)};
}

NormalParams alpha_conditional(const Dataset& data, const ComponentParams& comp,
                               const ComponentSuffStats& stats, double sigma_alpha2) {
  if (!(comp.sigma2 > 0.0)) throw_domain("alpha_conditional: sigma2 must be positive");
  double resid_sum = 0.0;
  for (arma::uword i : stats.members)
    resid_sum += data.y[i] - arma::dot(data.X.row(i), comp.beta);
  const double denom = static_cast<double>(stats.n_k()) * sigma_alpha2 + comp.sigma2;
  return {sigma_alpha2 * resid_sum / denom, sigma_alpha2 * comp.sigma2 / denom};
}

MvNormalParams beta_conditional(const Dataset& data, const ComponentParams& comp,
                                const ComponentSuffStats& stats, double alpha) {
  if (arma::any(comp.tau2 <= 0.0)) throw_domain("beta_conditional: tau2 must be positive");
  const arma::mat xk = data.X.rows(stats.members);
  arma::mat a = xk.t() * xk;
  a.diag() += 1.0 / comp.tau2;
  const arma::vec rhs = xk.t() * (data.y.elem(stats.members) - alpha);

  // Work with the unit-diagonal scaling of A; its conditioning is what
  // governs the accuracy of the factorization.
  const arma::vec d = 1.0 / arma::sqrt(a.diag());
  const arma::mat scaled = arma::symmatu(a % (d * d.t()));
  if (arma::rcond(scaled) < 1e-12)
    throw Error(ErrorKind::Numerical, "beta_conditional: A_k is numerically singular");
  arma::mat scaled_inv;
  if (!arma::inv_sympd(scaled_inv, scaled))
    throw FactorizationError("beta_conditional: A_k", arma::eig_sym(scaled).min());
  arma::mat a_inv = scaled_inv % (d * d.t());
  a_inv = 0.5 * (a_inv + a_inv.t());
  return {a_inv * rhs, comp.sigma2 * a_inv};
}

GammaParams sigma2_conditional(const Dataset& data, const ComponentParams& comp,
                               const ComponentSuffStats& stats, double alpha,
                               const arma::vec& beta, double a, double b) {
  double sse = 0.0;
  for (arma::uword i : stats.members) {
    const double e = data.y[i] - alpha - arma::dot(data.X.row(i), beta);
    sse += e * e;
  }
  const double penalty = arma::accu(arma::square(beta) / comp.tau2);
  const double shape = a + 0.5 * static_cast<double>(stats.n_k() + beta.n_elem);
  return {shape, b + 0.5 * (sse + penalty)};
}

InvGaussianParams tau2_conditional(const ComponentParams& comp, arma::uword j) {
  double abs_beta = std::abs(comp.beta[j]);
  bool saturated = false;
  if (abs_beta < kCoefficientFloor) {
    abs_beta = kCoefficientFloor;
    saturated = true;
  }
  return {std::sqrt(comp.sigma2) * comp.lambda / abs_beta, comp.lambda * comp.lambda, saturated};
}

GammaParams lambda2_conditional(const ComponentParams& comp) {
  return {static_cast<double>(comp.p()) + 0.5, 0.5 * (arma::accu(comp.tau2) + comp.delta)};
}

GammaParams delta_conditional(const ComponentParams& comp) {
  return {1.0, 0.5 * (comp.lambda * comp.lambda + 1.0)};
}

void update_regression_block(const Dataset& data, ComponentParams& comp,
                             const ComponentSuffStats& stats, const Hyperparams& hyper,
                             RngStream& rng, GibbsDiagnostics& diag) {
  const NormalParams ap = alpha_conditional(data, comp, stats, hyper.sigma_alpha2);
  comp.alpha = sample_normal(rng, ap.mean, std::sqrt(ap.variance));

  const MvNormalParams bp = beta_conditional(data, comp, stats, comp.alpha);
  comp.beta = sample_mvnormal(rng, bp.mean, bp.covariance);

  const GammaParams sp =
      sigma2_conditional(data, comp, stats, comp.alpha, comp.beta, hyper.a, hyper.b);
  comp.sigma2 = clamp_scale(sample_inverse_gamma(rng, sp.shape, sp.rate));

  for (arma::uword j = 0; j < comp.p(); ++j) {
    const InvGaussianParams tp = tau2_conditional(comp, j);
    if (tp.saturated) ++diag.tau_saturations;
    comp.tau2[j] = clamp_scale(1.0 / sample_inverse_gaussian(rng, tp.mean, tp.shape));
  }

  const GammaParams lp = lambda2_conditional(comp);
  comp.lambda = clamp_scale(std::sqrt(sample_gamma(rng, lp.shape, lp.rate)));

  const GammaParams dp = delta_conditional(comp);
  comp.delta = clamp_scale(sample_gamma(rng, dp.shape, dp.rate));
}

void draw_regression_prior(ComponentParams& comp, const Hyperparams& hyper, RngStream& rng) {
  comp.delta = clamp_scale(sample_gamma(rng, 0.5, 0.5));
  const double lambda2 = clamp_scale(sample_gamma(rng, 0.5, 0.5 * comp.delta));
  comp.lambda = std::sqrt(lambda2);
  comp.sigma2 = clamp_scale(sample_inverse_gamma(rng, hyper.a, hyper.b));
  const double sigma = std::sqrt(comp.sigma2);
  for (arma::uword j = 0; j < comp.p(); ++j) {
    comp.tau2[j] = clamp_scale(sample_exponential(rng, 0.5 * lambda2));
    comp.beta[j] = sample_normal(rng, 0.0, sigma * std::sqrt(comp.tau2[j]));
  }
  comp.alpha = sample_normal(rng, 0.0, std::sqrt(hyper.sigma_alpha2));
}

}  // namespace bgcwm
