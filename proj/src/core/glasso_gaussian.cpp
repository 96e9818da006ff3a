#include "bgcwm/glasso_gaussian.hpp"

#include <algorithm>
#include <cmath>

#include "bgcwm/error.hpp"

namespace bgcwm {

namespace {
constexpr double kScaleMin = 1e-150;
constexpr double kScaleMax = 1e150;
}  // namespace

arma::uword phi_index(arma::uword j, arma::uword l, arma::uword p) {
  if (j == l || j >= p || l >= p) throw_invalid("phi_index: invalid off-diagonal position");
  if (j > l) std::swap(j, l);
  // Entries of rows 0..j-1 come first: sum_{r<j} (p - 1 - r).
  return j * (2 * p - j - 1) / 2 + (l - j - 1);
}

arma::mat phi_matrix(const arma::vec& phi, arma::uword p) {
  arma::mat out(p, p, arma::fill::zeros);
  for (arma::uword j = 0; j < p; ++j)
    for (arma::uword l = j + 1; l < p; ++l) out(j, l) = out(l, j) = phi[phi_index(j, l, p)];
  return out;
}

PartitionView PartitionView::make(const arma::mat& omega, const arma::mat& scatter,
                                  const arma::vec& phi, arma::uword j) {
  const arma::uword p = omega.n_rows;
  PartitionView v;
  v.rest.set_size(p - 1);
  for (arma::uword i = 0, r = 0; i < p; ++i)
    if (i != j) v.rest[r++] = i;
  const arma::uvec jj{j};
  v.omega_minor = omega.submat(v.rest, v.rest);
  v.omega_col = omega.submat(v.rest, jj);
  v.omega_jj = omega(j, j);
  v.s_minor = scatter.submat(v.rest, v.rest);
  v.s_col = scatter.submat(v.rest, jj);
  v.s_jj = scatter(j, j);
  v.phi_col.set_size(p - 1);
  for (arma::uword r = 0; r < v.rest.n_elem; ++r) v.phi_col[r] = phi[phi_index(v.rest[r], j, p)];
  return v;
}

MvNormalParams mu_conditional(const Dataset& data, const ComponentParams& comp,
                              const ComponentSuffStats& stats, const arma::vec& m0) {
  const double w = 1.0 / static_cast<double>(stats.n_k() + 1);
  arma::vec total = m0;
  for (arma::uword i : stats.members) total += data.X.row(i).t();
  return {w * total, w * comp.covariance()};
}

arma::mat compute_scatter(const Dataset& data, const ComponentParams& comp,
                          const ComponentSuffStats& stats, const arma::vec& m0) {
  arma::mat centered = data.X.rows(stats.members);
  centered.each_row() -= comp.mu.t();
  const arma::vec dm = comp.mu - m0;
  return arma::symmatu(centered.t() * centered + dm * dm.t());
}

double eta1_shape(arma::uword n_k, bool literal) {
  const double base = 0.5 * static_cast<double>(n_k + 1);
  return literal ? base : base + 1.0;
}

OmegaColumnParams omega_column_conditional(const ComponentParams& comp, const arma::mat& scatter,
                                           arma::uword n_k, arma::uword j,
                                           bool literal_eta_shape) {
  const arma::uword p = comp.p();
  OmegaColumnParams out;
  const double s_jj = scatter(j, j);
  out.eta1 = {eta1_shape(n_k, literal_eta_shape), 0.5 * (s_jj + comp.psi)};
  if (p == 1) return out;

  const PartitionView v = PartitionView::make(comp.omega, scatter, comp.phi, j);
  const arma::mat minor = arma::symmatu(v.omega_minor);
  if (!arma::inv_sympd(out.omega_minor_inv, minor)) {
    arma::vec ev;
    throw FactorizationError("omega_block_update: Omega minor inversion failed",
                             arma::eig_sym(ev, minor) ? ev.min() : std::nan(""));
  }
  arma::mat precision = (v.s_jj + comp.psi) * out.omega_minor_inv;
  precision.diag() += 1.0 / v.phi_col;
  arma::mat c;
  if (!arma::inv_sympd(c, arma::symmatu(precision))) {
    arma::vec ev;
    throw FactorizationError("omega_block_update: C inversion failed",
                             arma::eig_sym(ev, arma::symmatu(precision)) ? ev.min() : std::nan(""));
  }
  c = 0.5 * (c + c.t());
  out.eta2 = {-c * v.s_col, c};
  return out;
}

void omega_block_update(ComponentParams& comp, const arma::mat& scatter,
                        const ComponentSuffStats& stats, arma::uword j, RngStream& rng,
                        bool literal_eta_shape) {
  const OmegaColumnParams cp =
      omega_column_conditional(comp, scatter, stats.n_k(), j, literal_eta_shape);
  const double eta1 = sample_gamma(rng, cp.eta1.shape, cp.eta1.rate);
  if (comp.p() == 1) {
    comp.omega(0, 0) = eta1;
    return;
  }
  const arma::vec eta2 = sample_mvnormal(rng, cp.eta2.mean, cp.eta2.covariance);
  arma::uword r = 0;
  for (arma::uword i = 0; i < comp.p(); ++i) {
    if (i == j) continue;
    comp.omega(i, j) = comp.omega(j, i) = eta2[r++];
  }
  comp.omega(j, j) = eta1 + arma::as_scalar(eta2.t() * cp.omega_minor_inv * eta2);
}

void omega_sweep(ComponentParams& comp, const arma::mat& scatter, const ComponentSuffStats& stats,
                 RngStream& rng, bool literal_eta_shape) {
  for (arma::uword j = 0; j < comp.p(); ++j)
    omega_block_update(comp, scatter, stats, j, rng, literal_eta_shape);
  comp.omega = 0.5 * (comp.omega + comp.omega.t());
}

InvGaussianParams phi_conditional(const ComponentParams& comp, arma::uword j, arma::uword l) {
  double abs_omega = std::abs(comp.omega(j, l));
  bool saturated = false;
  if (abs_omega < kCoefficientFloor) {
    abs_omega = kCoefficientFloor;
    saturated = true;
  }
  return {comp.psi / abs_omega, comp.psi * comp.psi, saturated};
}

GammaParams psi_conditional(const ComponentParams& comp, double r, double s) {
  const double p = static_cast<double>(comp.p());
  return {r + 0.5 * p * (p + 1.0), s + 0.5 * arma::accu(arma::abs(comp.omega))};
}

void update_covariate_block(const Dataset& data, ComponentParams& comp,
                            const ComponentSuffStats& stats, const Hyperparams& hyper,
                            RngStream& rng, GibbsDiagnostics& diag) {
  const arma::vec m0 = hyper.m0_for(comp.p());
  const MvNormalParams mp = mu_conditional(data, comp, stats, m0);
  comp.mu = sample_mvnormal(rng, mp.mean, mp.covariance);

  const arma::mat scatter = compute_scatter(data, comp, stats, m0);
  omega_sweep(comp, scatter, stats, rng, hyper.literal_eta_shape);

  for (arma::uword j = 0; j < comp.p(); ++j) {
    for (arma::uword l = j + 1; l < comp.p(); ++l) {
      const InvGaussianParams pp = phi_conditional(comp, j, l);
      if (pp.saturated) ++diag.phi_saturations;
      const double u = sample_inverse_gaussian(rng, pp.mean, pp.shape);
      comp.phi[phi_index(j, l, comp.p())] = std::clamp(1.0 / u, kScaleMin, kScaleMax);
    }
  }

  const GammaParams sp = psi_conditional(comp, hyper.r, hyper.s);
  comp.psi = std::clamp(sample_gamma(rng, sp.shape, sp.rate), kScaleMin, kScaleMax);
}

void update_component(const Dataset& data, ComponentParams& comp, const ComponentSuffStats& stats,
                      const Hyperparams& hyper, RngStream& rng, GibbsDiagnostics& diag) {
  update_regression_block(data, comp, stats, hyper, rng, diag);
  update_covariate_block(data, comp, stats, hyper, rng, diag);
}

}  // namespace bgcwm
