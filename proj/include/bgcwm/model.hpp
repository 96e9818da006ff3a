#ifndef BGCWM_MODEL_HPP
#define BGCWM_MODEL_HPP

#include <armadillo>
#include <string>
#include <vector>

#include "bgcwm/rngdist.hpp"

namespace bgcwm {

enum class InferenceMode { FixedK, Overfitting, Telescoping };

const char* to_string(InferenceMode mode);
InferenceMode inference_mode_from_string(const std::string& name);

// Response vector y and covariate matrix X (rows are observations). `labels`
// holds an optional ground-truth classification (1-based) and is never used
// for fitting.
struct Dataset {
  arma::vec y;
  arma::mat X;
  std::vector<int> labels;

  arma::uword n() const { return y.n_elem; }
  arma::uword p() const { return X.n_cols; }
  void validate() const;
};

// Per-component parameters. The covariate block is stored through its
// precision matrix; Sigma is derived on demand.
struct ComponentParams {
  double alpha = 0.0;
  arma::vec beta;
  double sigma2 = 1.0;
  arma::vec tau2;
  double lambda = 1.0;
  double delta = 1.0;
  arma::vec mu;
  arma::mat omega;
  arma::vec phi;  // strict upper triangle of Phi, row-major: (0,1),(0,2),...,(1,2),...
  double psi = 1.0;

  arma::uword p() const { return beta.n_elem; }
  arma::mat covariance() const;
  void validate() const;
};

struct Hyperparams {
  double sigma_alpha2 = 1e3;
  double a = 1e-2;
  double b = 1e-2;
  arma::vec m0;  // empty means the zero vector
  double r = 1.0;
  double s = 1e-2;
  double nu_l = 6.0;
  double nu_r = 3.0;
  BnbParams bnb;
  double fixed_k_gamma = 1.0;
  double overfitting_gamma = 1e-3;
  // Evaluate the gamma Metropolis target with (n_k + gamma/K) in place of
  // Gamma(n_k + gamma/K), as printed in some references.
  bool literal_gamma_target = false;
  // Use shape (n_k + 1)/2 for the diagonal Schur-complement draw instead of
  // (n_k + 1)/2 + 1.
  bool literal_eta_shape = false;

  arma::vec m0_for(arma::uword p) const;
  void validate() const;
};

// Dirichlet concentration of each component under the given regime.
double dirichlet_concentration(InferenceMode mode, const Hyperparams& hyper, double gamma,
                               arma::uword K);

struct MixtureState {
  arma::uvec z;  // 0-based component index per observation
  arma::vec pi;
  double gamma = 1.0;
  std::vector<ComponentParams> comps;

  arma::uword K() const { return comps.size(); }
  arma::uvec counts() const;
  arma::uword k_plus() const;
  void validate(arma::uword n) const;
};

ComponentParams neutral_component(arma::uword p, const Hyperparams& hyper);

// Precomputed quantities for repeated density evaluation of one component.
class ComponentDensity {
 public:
  explicit ComponentDensity(const ComponentParams& comp);
  double log_lik(double y, const arma::rowvec& x) const;
  // Column of log_lik values for every row of the dataset.
  arma::vec log_lik_all(const Dataset& data) const;

 private:
  double alpha_;
  arma::vec beta_;
  double sigma2_;
  double log_norm_y_;
  arma::rowvec mu_;
  arma::mat chol_upper_;  // omega = chol_upper_' * chol_upper_
  double log_norm_x_;
};

double log_lik_point(double y, const arma::rowvec& x, const ComponentParams& comp);

// n x K matrix of log_lik_point values.
arma::mat log_lik_matrix(const Dataset& data, const std::vector<ComponentParams>& comps);

double observed_log_lik(const Dataset& data, const MixtureState& state);
double complete_log_lik(const Dataset& data, const MixtureState& state);

struct ComponentLogPrior {
  double alpha = 0.0;
  double beta = 0.0;  // double-exponential (lasso) term
  double sigma2 = 0.0;
  double lambda = 0.0;  // half-Cauchy
  double mu = 0.0;
  double omega = 0.0;  // graphical-lasso term without the PD normalizing constant
  double psi = 0.0;
  double total() const { return alpha + beta + sigma2 + lambda + mu + omega + psi; }
};

ComponentLogPrior component_log_prior(const ComponentParams& comp, const Hyperparams& hyper);

double log_dirichlet_pdf(const arma::vec& pi, const arma::vec& concentration);

double log_posterior_unnorm(const Dataset& data, const MixtureState& state,
                            const Hyperparams& hyper, InferenceMode mode);

double log_sum_exp(const arma::rowvec& v);

}  // namespace bgcwm

#endif  // BGCWM_MODEL_HPP
