#include "bgcwm/rngdist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "bgcwm/error.hpp"

namespace bgcwm {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream_id) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream_id + 0x632be59bd9b4e019ULL));
}

constexpr double kTiny = std::numeric_limits<double>::min();
constexpr double kHuge = std::numeric_limits<double>::max();

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), engine_(mix_seed(seed, stream_id)) {}

RngStream RngStream::derive(std::uint64_t sub_id) const {
  return RngStream(seed_, splitmix64(stream_id_ * 0x9e3779b97f4a7c15ULL + sub_id + 1));
}

double RngStream::uniform() {
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Marsaglia polar method.
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

double sample_uniform(RngStream& rng, double lo, double hi) {
  if (!(hi > lo)) throw_domain("sample_uniform: requires lo < hi");
  return lo + (hi - lo) * rng.uniform();
}

double sample_normal(RngStream& rng, double mean, double sd) {
  if (!(sd >= 0.0)) throw_domain("sample_normal: sd must be non-negative");
  return mean + sd * rng.normal();
}

double sample_exponential(RngStream& rng, double rate) {
  if (!(rate > 0.0)) throw_domain("sample_exponential: rate must be positive");
  return -std::log(rng.uniform()) / rate;
}

double sample_double_exponential(RngStream& rng, double location, double rate) {
  if (!(rate > 0.0)) throw_domain("sample_double_exponential: rate must be positive");
  const double e = -std::log(rng.uniform()) / rate;
  return rng.uniform() < 0.5 ? location - e : location + e;
}

double sample_log_gamma_unit(RngStream& rng, double shape) {
  if (!(shape > 0.0) || !std::isfinite(shape))
    throw_domain("sample_gamma: shape must be positive and finite");
  if (shape < 1.0) {
    // G(a) = G(a + 1) * U^(1/a), kept on the log scale.
    const double log_u = std::log(rng.uniform());
    return sample_log_gamma_unit(rng, shape + 1.0) + log_u / shape;
  }
  // Marsaglia-Tsang.
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return std::log(d * v);
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return std::log(d * v);
  }
}

double sample_gamma(RngStream& rng, double shape, double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate))
    throw_domain("sample_gamma: rate must be positive and finite");
  const double log_g = sample_log_gamma_unit(rng, shape) - std::log(rate);
  return std::clamp(std::exp(log_g), kTiny, kHuge);
}

double sample_inverse_gamma(RngStream& rng, double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0))
    throw_domain("sample_inverse_gamma: shape and rate must be positive");
  const double log_x = std::log(rate) - sample_log_gamma_unit(rng, shape);
  return std::clamp(std::exp(log_x), kTiny, kHuge);
}

double sample_inverse_gaussian(RngStream& rng, double mean, double shape) {
  if (!(mean > 0.0) || !(shape > 0.0))
    throw_domain("sample_inverse_gaussian: mean and shape must be positive");
  const double nu = rng.normal();
  const double y = nu * nu;
  const double my = mean * y;
  // mean + mean^2 y / (2 shape) - mean / (2 shape) sqrt(4 mean shape y + mean^2 y^2),
  // rearranged to avoid cancellation.
  const double root = std::sqrt(4.0 * mean * shape * y + my * my);
  double x = mean - 2.0 * mean * my / (my + root);
  if (!(my + root > 0.0)) x = mean;
  x = std::max(x, kTiny);
  const double u = rng.uniform();
  const double out = (u <= mean / (mean + x)) ? x : mean * (mean / x);
  return std::clamp(out, kTiny, kHuge);
}

arma::vec sample_dirichlet(RngStream& rng, const arma::vec& concentration) {
  if (concentration.n_elem == 0) throw_domain("sample_dirichlet: empty concentration");
  arma::vec log_g(concentration.n_elem);
  for (arma::uword k = 0; k < concentration.n_elem; ++k) {
    if (!(concentration[k] > 0.0))
      throw_domain("sample_dirichlet: concentrations must be positive");
    log_g[k] = sample_log_gamma_unit(rng, concentration[k]);
  }
  arma::vec w = arma::exp(log_g - log_g.max());
  w /= arma::accu(w);
  bool floored = false;
  for (auto& v : w) {
    if (v < 1e-300) {
      v = 1e-300;
      floored = true;
    }
  }
  if (floored) w /= arma::accu(w);
  return w;
}

arma::uword sample_index_from_log_weights(RngStream& rng, const arma::vec& log_weights) {
  if (log_weights.n_elem == 0) throw_domain("sample_index: no categories");
  const double m = log_weights.max();
  if (!std::isfinite(m)) throw_domain("sample_index: no finite weight");
  arma::vec w = arma::exp(log_weights - m);
  return sample_multinomial_index(rng, w / arma::accu(w));
}

arma::uword sample_multinomial_index(RngStream& rng, const arma::vec& probs) {
  if (probs.n_elem == 0) throw_domain("sample_multinomial_index: no categories");
  const double total = arma::accu(probs);
  if (!(total > 0.0)) throw_domain("sample_multinomial_index: probabilities sum to zero");
  const double u = rng.uniform() * total;
  double cum = 0.0;
  for (arma::uword k = 0; k < probs.n_elem; ++k) {
    if (probs[k] < 0.0) throw_domain("sample_multinomial_index: negative probability");
    cum += probs[k];
    if (u < cum) return k;
  }
  // Round-off: return the last category with positive mass.
  for (arma::uword k = probs.n_elem; k-- > 0;)
    if (probs[k] > 0.0) return k;
  return probs.n_elem - 1;
}

arma::mat cholesky_lower(const arma::mat& m, const char* what) {
  arma::mat l;
  const bool ok = m.is_finite() && arma::chol(l, m, "lower") && arma::min(l.diag()) > 0.0;
  if (!ok) {
    double min_eig = std::numeric_limits<double>::quiet_NaN();
    arma::vec ev;
    if (m.is_finite() && arma::eig_sym(ev, arma::symmatu(m))) min_eig = ev.min();
    throw FactorizationError(std::string(what) + ": matrix is not positive definite", min_eig);
  }
  return l;
}

arma::vec sample_mvnormal(RngStream& rng, const arma::vec& mean, const arma::mat& covariance) {
  if (covariance.n_rows != mean.n_elem || covariance.n_cols != mean.n_elem)
    throw_invalid("sample_mvnormal: dimension mismatch");
  const arma::mat l = cholesky_lower(covariance, "sample_mvnormal");
  arma::vec z(mean.n_elem);
  for (auto& v : z) v = rng.normal();
  return mean + l * z;
}

arma::mat sample_wishart(RngStream& rng, const arma::mat& scale, double df) {
  const arma::uword d = scale.n_rows;
  if (scale.n_cols != d || d == 0) throw_invalid("sample_wishart: scale must be square");
  if (!(df > static_cast<double>(d) - 1.0))
    throw_domain("sample_wishart: degrees of freedom must exceed dimension - 1");
  const arma::mat l = cholesky_lower(scale, "sample_wishart");
  arma::mat a(d, d, arma::fill::zeros);
  for (arma::uword i = 0; i < d; ++i) {
    // chi-square with df - i degrees of freedom.
    a(i, i) = std::sqrt(2.0 * sample_gamma(rng, 0.5 * (df - static_cast<double>(i)), 1.0));
    for (arma::uword j = 0; j < i; ++j) a(i, j) = rng.normal();
  }
  const arma::mat la = l * a;
  return arma::symmatu(la * la.t());
}

double bnb_log_pmf(long k, const BnbParams& p) {
  if (k < 1) throw_domain("bnb_log_pmf: k must be >= 1");
  if (!(p.a_lambda > 0.0 && p.a_pi > 0.0 && p.b_pi > 0.0))
    throw_domain("bnb_log_pmf: parameters must be positive");
  const double km1 = static_cast<double>(k - 1);
  auto log_beta = [](double x, double y) {
    return std::lgamma(x) + std::lgamma(y) - std::lgamma(x + y);
  };
  return std::lgamma(p.a_lambda + km1) + log_beta(p.a_lambda + p.a_pi, km1 + p.b_pi) -
         std::lgamma(p.a_lambda) - std::lgamma(km1 + 1.0) - log_beta(p.a_pi, p.b_pi);
}

double snedecor_f_log_pdf(double x, double nu_l, double nu_r) {
  if (!(x > 0.0)) throw_domain("snedecor_f_log_pdf: x must be positive");
  if (!(nu_l > 0.0 && nu_r > 0.0))
    throw_domain("snedecor_f_log_pdf: degrees of freedom must be positive");
  const double h = 0.5 * (nu_l + nu_r);
  return std::lgamma(h) - std::lgamma(0.5 * nu_l) - std::lgamma(0.5 * nu_r) +
         0.5 * nu_l * std::log(nu_l / nu_r) + (0.5 * nu_l - 1.0) * std::log(x) -
         h * std::log1p(nu_l * x / nu_r);
}

}  // namespace bgcwm
