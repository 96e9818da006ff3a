#ifndef BGCWM_SIMULATE_HPP
#define BGCWM_SIMULATE_HPP

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "bgcwm/model.hpp"
#include "bgcwm/rngdist.hpp"

namespace bgcwm {

struct SimSpec {
  arma::uword K = 2;
  arma::uword p = 9;
  arma::uword n = 500;
  int scenario = 1;
  double p0 = 2.0 / 3.0;
  std::uint64_t seed = 1;
  void validate() const;
};

SimSpec sim_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SimSpec& spec);

struct RegressionTruth {
  arma::vec alpha;  // K
  arma::mat beta;   // K x p
  arma::vec sigma2;
};

struct CovariateTruth {
  arma::vec pi;
  arma::uvec rho;  // cluster -> mean profile (0-based), scenarios 3 and 4
  arma::mat mu;    // K x p
  std::vector<arma::mat> sigma;
  arma::uvec z;  // 0-based
  arma::mat X;
};

struct GroundTruth {
  SimSpec spec;
  RegressionTruth reg;
  CovariateTruth cov;
  arma::uvec xi;
};

arma::vec sim_weights(arma::uword K);

// Mean profile value for profile k (1-based) at coordinate j (1-based).
double scenario_mean(arma::uword k, arma::uword j, arma::uword p);

// Toeplitz scale V_ij = (p - |i - j|) / p.
arma::mat toeplitz_scale(arma::uword p);

RegressionTruth gen_regression_params(const SimSpec& spec, RngStream& rng);
CovariateTruth gen_covariates(const SimSpec& spec, RngStream& rng);

struct SimResult {
  Dataset data;
  GroundTruth truth;
};

SimResult gen_dataset(const SimSpec& spec);

nlohmann::json truth_to_json(const GroundTruth& truth);

}  // namespace bgcwm

#endif  // BGCWM_SIMULATE_HPP
