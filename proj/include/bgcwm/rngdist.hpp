#ifndef BGCWM_RNGDIST_HPP
#define BGCWM_RNGDIST_HPP

#include <armadillo>
#include <cstdint>
#include <random>

namespace bgcwm {

// Seeded variate source. The engine is std::mt19937_64, whose output sequence
// is fixed by the standard, and every transform below is written out here
// instead of going through <random> distributions (whose algorithms are
// implementation-defined). Same (seed, stream id, call sequence) gives the same
// bits on every conforming platform.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  // Independent child stream; depends only on (seed, stream id, sub id).
  RngStream derive(std::uint64_t sub_id) const;

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on the open interval (0, 1).
  double uniform();
  double normal();

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

struct BnbParams {
  double a_lambda = 1.0;
  double a_pi = 4.0;
  double b_pi = 3.0;
};

double sample_uniform(RngStream& rng, double lo, double hi);
double sample_normal(RngStream& rng, double mean, double sd);
double sample_exponential(RngStream& rng, double rate);
double sample_double_exponential(RngStream& rng, double location, double rate);

// Gamma with shape/rate parameterization.
double sample_gamma(RngStream& rng, double shape, double rate);
// log of a Gamma(shape, 1) draw; stays finite for very small shapes where the
// draw itself underflows.
double sample_log_gamma_unit(RngStream& rng, double shape);

// X with density proportional to x^(-shape-1) exp(-rate / x).
double sample_inverse_gamma(RngStream& rng, double shape, double rate);

// Inverse-Gaussian(mean, shape) by the Michael-Schucany-Haas transform.
double sample_inverse_gaussian(RngStream& rng, double mean, double shape);

arma::vec sample_dirichlet(RngStream& rng, const arma::vec& concentration);

// Index drawn with probability proportional to exp(log_weights).
arma::uword sample_index_from_log_weights(RngStream& rng, const arma::vec& log_weights);
// Index drawn from a single-trial multinomial with the given probabilities.
arma::uword sample_multinomial_index(RngStream& rng, const arma::vec& probs);

// Throws FactorizationError when covariance is not positive definite.
arma::vec sample_mvnormal(RngStream& rng, const arma::vec& mean, const arma::mat& covariance);

// Wishart_d(scale, df) via the Bartlett decomposition; df > d - 1.
arma::mat sample_wishart(RngStream& rng, const arma::mat& scale, double df);

double bnb_log_pmf(long k, const BnbParams& params);
double snedecor_f_log_pdf(double x, double nu_l, double nu_r);

// Lower Cholesky factor; throws FactorizationError carrying the smallest
// eigenvalue of the input when it is not (numerically) positive definite.
arma::mat cholesky_lower(const arma::mat& m, const char* what);

}  // namespace bgcwm

#endif  // BGCWM_RNGDIST_HPP
