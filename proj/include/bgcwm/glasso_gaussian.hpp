#ifndef BGCWM_GLASSO_GAUSSIAN_HPP
#define BGCWM_GLASSO_GAUSSIAN_HPP

#include <armadillo>

#include "bgcwm/lasso_regression.hpp"
#include "bgcwm/model.hpp"
#include "bgcwm/rngdist.hpp"

namespace bgcwm {

// Position of the (j, l) off-diagonal entry, j != l, in ComponentParams::phi.
arma::uword phi_index(arma::uword j, arma::uword l, arma::uword p);

// Symmetric p x p matrix with zero diagonal and phi on the off-diagonals.
arma::mat phi_matrix(const arma::vec& phi, arma::uword p);

// Row/column j of Omega, S and Phi split into the block without j, the
// column at j (j-th entry removed) and the diagonal entry.
struct PartitionView {
  arma::uvec rest;  // indices other than j, ascending
  arma::mat omega_minor;
  arma::vec omega_col;
  double omega_jj;
  arma::mat s_minor;
  arma::vec s_col;
  double s_jj;
  arma::vec phi_col;

  static PartitionView make(const arma::mat& omega, const arma::mat& scatter,
                            const arma::vec& phi, arma::uword j);
};

MvNormalParams mu_conditional(const Dataset& data, const ComponentParams& comp,
                              const ComponentSuffStats& stats, const arma::vec& m0);

// S_k = sum_i z_ik (x_i - mu)(x_i - mu)' + (mu - m0)(mu - m0)'.
arma::mat compute_scatter(const Dataset& data, const ComponentParams& comp,
                          const ComponentSuffStats& stats, const arma::vec& m0);

// Shape of the Gamma law of the Schur complement eta1 for a component with
// n_k members.
double eta1_shape(arma::uword n_k, bool literal);

struct OmegaColumnParams {
  GammaParams eta1;
  MvNormalParams eta2;  // mean -C s_col, covariance C
  arma::mat omega_minor_inv;
};

OmegaColumnParams omega_column_conditional(const ComponentParams& comp, const arma::mat& scatter,
                                           arma::uword n_k, arma::uword j, bool literal_eta_shape);

// Redraws row/column j of comp.omega in place.
void omega_block_update(ComponentParams& comp, const arma::mat& scatter,
                        const ComponentSuffStats& stats, arma::uword j, RngStream& rng,
                        bool literal_eta_shape = false);

// Updates every row/column in order and then symmetrizes.
void omega_sweep(ComponentParams& comp, const arma::mat& scatter, const ComponentSuffStats& stats,
                 RngStream& rng, bool literal_eta_shape = false);

// Inverse-Gaussian law of u_jl = 1/phi_jl.
InvGaussianParams phi_conditional(const ComponentParams& comp, arma::uword j, arma::uword l);

// ||Omega||_1 sums the absolute values of all p^2 entries.
GammaParams psi_conditional(const ComponentParams& comp, double r, double s);

// mu, scatter, omega rows/columns, phi, psi for one component.
void update_covariate_block(const Dataset& data, ComponentParams& comp,
                            const ComponentSuffStats& stats, const Hyperparams& hyper,
                            RngStream& rng, GibbsDiagnostics& diag);

// Full per-component Gibbs pass: regression block then covariate block.
void update_component(const Dataset& data, ComponentParams& comp, const ComponentSuffStats& stats,
                      const Hyperparams& hyper, RngStream& rng, GibbsDiagnostics& diag);

}  // namespace bgcwm

#endif  // BGCWM_GLASSO_GAUSSIAN_HPP
