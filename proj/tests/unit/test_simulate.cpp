#include <doctest.h>

#include "bgcwm/error.hpp"
#include "bgcwm/simulate.hpp"

using namespace bgcwm;

TEST_CASE("scenario mean profiles") {
  CHECK(scenario_mean(2, 1, 9) == 0.0);
  CHECK(scenario_mean(2, 4, 9) == doctest::Approx(2.0 * std::sin(2.0 * M_PI / 3.0)).epsilon(1e-14));
  CHECK(scenario_mean(2, 4, 9) == doctest::Approx(1.7321).epsilon(1e-4));
  CHECK(scenario_mean(1, 5, 9) == 0.0);
  CHECK(scenario_mean(3, 1, 9) == 2.0);
  CHECK(scenario_mean(4, 1, 9) == -4.0);
  CHECK(scenario_mean(4, 3, 18) == doctest::Approx(-4.0 * std::cos(2.0 * 8.0 * M_PI / 18.0)).epsilon(1e-12));
  CHECK_THROWS_AS(scenario_mean(5, 1, 9), Error);
  CHECK(arma::approx_equal(sim_weights(3), arma::vec{1.0 / 6, 2.0 / 6, 3.0 / 6}, "absdiff", 1e-15));
  const arma::mat V = toeplitz_scale(3);
  CHECK(V(0, 2) == doctest::Approx(1.0 / 3.0));
  CHECK(V(1, 1) == 1.0);
}

TEST_CASE("regression parameters") {
  SimSpec s;
  s.p0 = 1.0;
  RngStream rng(101, 0);
  const RegressionTruth all_zero = gen_regression_params(s, rng);
  CHECK(arma::all(arma::vectorise(all_zero.beta) == 0.0));

  s.p = 18;
  s.p0 = 2.0 / 3.0;
  double nonzero = 0.0;
  arma::vec alpha(1000);
  for (int rep = 0; rep < 1000; ++rep) {
    RngStream r(200 + rep, 0);
    const RegressionTruth t = gen_regression_params(s, r);
    nonzero += arma::accu(t.beta.row(0) != 0.0);
    CHECK(arma::all(t.sigma2 > 0.0));
    alpha[rep] = t.alpha[0];
  }
  // Binomial(18, 1/3): mean 6, sd sqrt(4) per cluster, mean of 1000
  CHECK(std::fabs(nonzero / 1000.0 - 6.0) < 3.0 * 2.0 / std::sqrt(1000.0));
  CHECK(std::fabs(arma::stddev(alpha) - 10.0) < 1.0);
}

TEST_CASE("generated datasets") {
  SimSpec s;
  s.n = 3000;
  s.seed = 7;
  const SimResult a = gen_dataset(s);
  CHECK(a.data.n() == 3000);
  CHECK(a.data.p() == 9);
  const arma::uvec z = a.truth.cov.z;
  CHECK(arma::all(z <= 1));
  // proportion 1/3 with binomial sd
  const double share = static_cast<double>(arma::accu(z == 0)) / 3000.0;
  CHECK(std::fabs(share - 1.0 / 3.0) < 3.0 * std::sqrt((2.0 / 9.0) / 3000.0));
  for (arma::uword i = 0; i < 3000; ++i) CHECK(a.data.labels[i] == static_cast<int>(z[i]) + 1);

  for (arma::uword k = 0; k < 2; ++k) {
    const arma::uvec m = arma::find(z == k);
    const arma::mat Xk = a.data.X.rows(m);
    CHECK(arma::norm(arma::cov(Xk) - arma::eye(9, 9), "fro") < 0.3);
    const arma::vec resid = a.data.y(m) - a.truth.reg.alpha[k] - Xk * a.truth.reg.beta.row(k).t();
    CHECK(std::fabs(arma::var(resid) / a.truth.reg.sigma2[k] - 1.0) < 0.15);
  }
  for (arma::uword j = 0; j < 9; ++j)
    CHECK(a.truth.xi[j] == (arma::any(a.truth.reg.beta.col(j) != 0.0) ? 1u : 0u));

  const SimResult b = gen_dataset(s);
  CHECK(arma::approx_equal(a.data.X, b.data.X, "absdiff", 0.0));
  CHECK(arma::approx_equal(a.data.y, b.data.y, "absdiff", 0.0));
  s.seed = 8;
  CHECK_FALSE(arma::approx_equal(a.data.y, gen_dataset(s).data.y, "absdiff", 0.0));
}

TEST_CASE("scenario 1 covariance at n=1000") {
  // E||S - I||_F^2 = (p^2 + p) / n for the identity, about 0.09 here
  SimSpec s;
  s.n = 1000;
  arma::vec err2(40);
  for (arma::uword rep = 0; rep < 40; ++rep) {
    s.seed = 300 + rep;
    const SimResult r = gen_dataset(s);
    arma::mat pooled(9, 9, arma::fill::zeros);
    for (arma::uword k = 0; k < 2; ++k) {
      const arma::mat Xk = r.data.X.rows(arma::find(r.truth.cov.z == k));
      pooled += (Xk.n_rows - 1.0) * arma::cov(Xk);
    }
    pooled /= 998.0;
    err2[rep] = std::pow(arma::norm(pooled - arma::eye(9, 9), "fro"), 2);
  }
  const double expected = 90.0 / 998.0;
  CHECK(std::fabs(arma::mean(err2) - expected) < 3.0 * arma::stddev(err2) / std::sqrt(40.0));
}

TEST_CASE("scenario covariance and mean structure") {
  SimSpec s;
  s.K = 4;
  s.n = 200;
  s.scenario = 2;
  RngStream rng(102, 0);
  const CovariateTruth t2 = gen_covariates(s, rng);
  for (arma::uword k = 1; k < 4; ++k) CHECK(arma::approx_equal(t2.sigma[k], t2.sigma[0], "absdiff", 0.0));
  CHECK(arma::all(arma::vectorise(t2.mu) == 0.0));

  s.scenario = 3;
  const CovariateTruth t3 = gen_covariates(s, rng);
  CHECK(arma::all(arma::sort(t3.rho) == arma::regspace<arma::uvec>(0, 3)));
  for (arma::uword k = 0; k < 4; ++k) {
    CHECK(arma::approx_equal(t3.sigma[k], arma::eye(9, 9), "absdiff", 0.0));
    for (arma::uword j = 0; j < 9; ++j) CHECK(t3.mu(k, j) == scenario_mean(t3.rho[k] + 1, j + 1, 9));
  }

  s.scenario = 4;
  const CovariateTruth t4 = gen_covariates(s, rng);
  for (arma::uword k = 0; k < 4; ++k) {
    arma::vec eig = arma::eig_sym(t4.sigma[k]);
    CHECK(eig.min() >= 0.2 - 1e-9);
    for (arma::uword j = 0; j < 9; ++j) CHECK(t4.mu(k, j) == scenario_mean(t4.rho[k] + 1, j + 1, 9));
  }
  CHECK_FALSE(arma::approx_equal(t4.sigma[0], t4.sigma[1], "absdiff", 1e-6));
}

TEST_CASE("specification parsing") {
  const SimSpec s = sim_spec_from_json(nlohmann::json{{"K", 3}, {"p", 18}, {"scenario", 4}, {"seed", 9}});
  CHECK(s.K == 3);
  CHECK(s.p == 18);
  CHECK(s.n == 500);
  CHECK(sim_spec_from_json(to_json(s)).seed == 9);
  CHECK_THROWS_AS(sim_spec_from_json(nlohmann::json{{"k", 3}}), Error);
  CHECK_THROWS_AS(sim_spec_from_json(nlohmann::json{{"scenario", 5}}), Error);
  CHECK_THROWS_AS(sim_spec_from_json(nlohmann::json{{"p0", 1.5}}), Error);
  CHECK_THROWS_AS(sim_spec_from_json(nlohmann::json{{"scenario", 2}, {"p", 21}}), Error);
}
