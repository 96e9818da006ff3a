#include "bgcwm/model.hpp"

#include <cmath>
#include <numbers>

#include "bgcwm/error.hpp"

namespace bgcwm {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;
}

const char* to_string(InferenceMode mode) {
  switch (mode) {
    case InferenceMode::FixedK: return "fixed_k";
    case InferenceMode::Overfitting: return "overfitting";
    case InferenceMode::Telescoping: return "telescoping";
  }
  return "unknown";
}

InferenceMode inference_mode_from_string(const std::string& name) {
  if (name == "fixed_k") return InferenceMode::FixedK;
  if (name == "overfitting") return InferenceMode::Overfitting;
  if (name == "telescoping") return InferenceMode::Telescoping;
  throw Error(ErrorKind::Config, "unknown inference mode '" + name + "'");
}

void Dataset::validate() const {
  if (y.n_elem == 0) throw_invalid("dataset: no observations");
  if (X.n_cols == 0) throw_invalid("dataset: no covariates");
  if (X.n_rows != y.n_elem) throw_invalid("dataset: y and X row counts differ");
  if (!y.is_finite() || !X.is_finite()) throw_invalid("dataset: non-finite values");
  if (!labels.empty() && labels.size() != y.n_elem)
    throw_invalid("dataset: label column length differs from n");
}

arma::mat ComponentParams::covariance() const {
  arma::mat sigma;
  if (!arma::inv_sympd(sigma, arma::symmatu(omega)))
    throw FactorizationError("component covariance: omega not invertible",
                             arma::eig_sym(arma::symmatu(omega)).min());
  return sigma;
}

void ComponentParams::validate() const {
  const arma::uword d = beta.n_elem;
  if (tau2.n_elem != d || mu.n_elem != d || omega.n_rows != d || omega.n_cols != d ||
      phi.n_elem != d * (d - 1) / 2)
    throw_invalid("component: inconsistent parameter dimensions");
  if (!(sigma2 > 0.0) || !(lambda > 0.0) || !(delta > 0.0) || !(psi > 0.0))
    throw_domain("component: scale parameters must be positive");
  if (arma::any(tau2 <= 0.0) || arma::any(phi <= 0.0))
    throw_domain("component: latent scales must be positive");
  if (arma::abs(omega - omega.t()).max() > 1e-8 * std::max(1.0, arma::abs(omega).max()))
    throw_domain("component: omega is not symmetric");
  cholesky_lower(omega, "component omega");
}

arma::vec Hyperparams::m0_for(arma::uword p) const {
  if (m0.n_elem == 0) return arma::zeros(p);
  if (m0.n_elem != p) throw Error(ErrorKind::Config, "hyper.m0 length differs from p");
  return m0;
}

void Hyperparams::validate() const {
  const bool ok = sigma_alpha2 > 0 && a > 0 && b > 0 && r > 0 && s > 0 && nu_l > 0 &&
                  nu_r > 0 && bnb.a_lambda > 0 && bnb.a_pi > 0 && bnb.b_pi > 0 &&
                  fixed_k_gamma > 0 && overfitting_gamma > 0;
  if (!ok) throw Error(ErrorKind::Config, "hyperparameters must be positive");
}

double dirichlet_concentration(InferenceMode mode, const Hyperparams& hyper, double gamma,
                               arma::uword K) {
  switch (mode) {
    case InferenceMode::FixedK: return hyper.fixed_k_gamma;
    case InferenceMode::Overfitting: return hyper.overfitting_gamma;
    case InferenceMode::Telescoping: return gamma / static_cast<double>(K);
  }
  return 1.0;
}

arma::uvec MixtureState::counts() const {
  arma::uvec c(K(), arma::fill::zeros);
  for (arma::uword i = 0; i < z.n_elem; ++i) ++c[z[i]];
  return c;
}

arma::uword MixtureState::k_plus() const { return arma::accu(counts() > 0); }

void MixtureState::validate(arma::uword n) const {
  if (comps.empty()) throw_invalid("state: no components");
  if (z.n_elem != n) throw_invalid("state: allocation length differs from n");
  if (pi.n_elem != K()) throw_invalid("state: weight vector length differs from K");
  if (n > 0 && z.max() >= K()) throw_invalid("state: allocation label out of range");
  if (std::abs(arma::accu(pi) - 1.0) > 1e-9 || arma::any(pi < 0.0))
    throw_invalid("state: weights are not on the simplex");
  for (const auto& c : comps) c.validate();
}

ComponentParams neutral_component(arma::uword p, const Hyperparams& hyper) {
  ComponentParams c;
  c.alpha = 0.0;
  c.beta = arma::zeros(p);
  c.sigma2 = hyper.b / hyper.a;
  c.tau2 = arma::ones(p);
  c.lambda = 1.0;
  c.delta = 1.0;
  c.mu = hyper.m0_for(p);
  c.omega = arma::eye(p, p);
  c.phi = arma::ones(p * (p - 1) / 2);
  c.psi = hyper.r / hyper.s;
  return c;
}

ComponentDensity::ComponentDensity(const ComponentParams& comp)
    : alpha_(comp.alpha),
      beta_(comp.beta),
      sigma2_(comp.sigma2),
      log_norm_y_(-0.5 * (kLog2Pi + std::log(comp.sigma2))),
      mu_(comp.mu.t()) {
  if (!(comp.sigma2 > 0.0)) throw_domain("log_lik: sigma2 must be positive");
  chol_upper_ = cholesky_lower(comp.omega, "log_lik: omega").t();
  const double log_det = 2.0 * arma::accu(arma::log(chol_upper_.diag()));
  log_norm_x_ = -0.5 * static_cast<double>(comp.p()) * kLog2Pi + 0.5 * log_det;
}

double ComponentDensity::log_lik(double y, const arma::rowvec& x) const {
  const double resid = y - alpha_ - arma::dot(x, beta_);
  const arma::rowvec d = (x - mu_) * chol_upper_.t();
  return log_norm_y_ - 0.5 * resid * resid / sigma2_ + log_norm_x_ - 0.5 * arma::dot(d, d);
}

arma::vec ComponentDensity::log_lik_all(const Dataset& data) const {
  const arma::vec resid = data.y - alpha_ - data.X * beta_;
  arma::mat d = data.X;
  d.each_row() -= mu_;
  d = d * chol_upper_.t();
  return log_norm_y_ - 0.5 * arma::square(resid) / sigma2_ + log_norm_x_ -
         0.5 * arma::sum(arma::square(d), 1);
}

double log_lik_point(double y, const arma::rowvec& x, const ComponentParams& comp) {
  if (x.n_elem != comp.p()) throw_invalid("log_lik_point: dimension mismatch");
  return ComponentDensity(comp).log_lik(y, x);
}

arma::mat log_lik_matrix(const Dataset& data, const std::vector<ComponentParams>& comps) {
  arma::mat out(data.n(), comps.size());
  for (arma::uword k = 0; k < comps.size(); ++k)
    out.col(k) = ComponentDensity(comps[k]).log_lik_all(data);
  return out;
}

double log_sum_exp(const arma::rowvec& v) {
  const double m = v.max();
  if (!std::isfinite(m)) return m;
  // summed largest first
  const arma::rowvec terms = arma::sort(arma::exp(v - m), "descend");
  double sum = 0.0;
  for (double t : terms) sum += t;
  return m + std::log(sum);
}

double observed_log_lik(const Dataset& data, const MixtureState& state) {
  arma::mat ll = log_lik_matrix(data, state.comps);
  const arma::rowvec log_pi = arma::log(state.pi).t();
  double total = 0.0;
  for (arma::uword i = 0; i < ll.n_rows; ++i) total += log_sum_exp(ll.row(i) + log_pi);
  return total;
}

double complete_log_lik(const Dataset& data, const MixtureState& state) {
  double total = 0.0;
  for (arma::uword k = 0; k < state.K(); ++k) {
    const arma::uvec members = arma::find(state.z == k);
    if (members.is_empty()) continue;
    const ComponentDensity dens(state.comps[k]);
    const double log_pi = std::log(state.pi[k]);
    for (arma::uword i : members) total += log_pi + dens.log_lik(data.y[i], data.X.row(i));
  }
  return total;
}

ComponentLogPrior component_log_prior(const ComponentParams& c, const Hyperparams& h) {
  ComponentLogPrior lp;
  const double p = static_cast<double>(c.p());
  lp.alpha = -0.5 * (kLog2Pi + std::log(h.sigma_alpha2)) - 0.5 * c.alpha * c.alpha / h.sigma_alpha2;
  const double sigma = std::sqrt(c.sigma2);
  lp.beta = p * std::log(c.lambda / (2.0 * sigma)) - c.lambda * arma::accu(arma::abs(c.beta)) / sigma;
  lp.sigma2 = h.a * std::log(h.b) - std::lgamma(h.a) - (h.a + 1.0) * std::log(c.sigma2) - h.b / c.sigma2;
  lp.lambda = std::log(2.0 / std::numbers::pi) - std::log1p(c.lambda * c.lambda);

  const arma::mat l = cholesky_lower(c.omega, "log prior: omega");
  const double log_det = 2.0 * arma::accu(arma::log(l.diag()));
  const arma::vec dm = c.mu - h.m0_for(c.p());
  const arma::vec u = l.t() * dm;
  lp.mu = -0.5 * p * kLog2Pi + 0.5 * log_det - 0.5 * arma::dot(u, u);

  const double log_half_psi = std::log(0.5 * c.psi);
  double om = 0.0;
  for (arma::uword j = 0; j < c.p(); ++j) {
    om += log_half_psi - 0.5 * c.psi * c.omega(j, j);
    for (arma::uword l2 = j + 1; l2 < c.p(); ++l2)
      om += log_half_psi - c.psi * std::abs(c.omega(j, l2));
  }
  lp.omega = om;
  lp.psi = h.r * std::log(h.s) - std::lgamma(h.r) + (h.r - 1.0) * std::log(c.psi) - h.s * c.psi;
  return lp;
}

double log_dirichlet_pdf(const arma::vec& pi, const arma::vec& conc) {
  double out = std::lgamma(arma::accu(conc));
  for (arma::uword k = 0; k < pi.n_elem; ++k)
    out += -std::lgamma(conc[k]) + (conc[k] - 1.0) * std::log(pi[k]);
  return out;
}

double log_posterior_unnorm(const Dataset& data, const MixtureState& state,
                            const Hyperparams& hyper, InferenceMode mode) {
  double total = complete_log_lik(data, state);
  for (const auto& c : state.comps) total += component_log_prior(c, hyper).total();
  const double g = dirichlet_concentration(mode, hyper, state.gamma, state.K());
  total += log_dirichlet_pdf(state.pi, arma::vec(state.K(), arma::fill::value(g)));
  if (mode == InferenceMode::Telescoping) {
    total += bnb_log_pmf(static_cast<long>(state.K()), hyper.bnb);
    total += snedecor_f_log_pdf(state.gamma, hyper.nu_l, hyper.nu_r);
  }
  return total;
}

}  // namespace bgcwm
