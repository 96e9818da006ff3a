#include <doctest.h>

#include "bgcwm/allocation.hpp"
#include "bgcwm/criteria.hpp"
#include "oracles.hpp"

using namespace bgcwm;

namespace {

DrawArchive fixed_archive(arma::uword K, const Dataset& data, RngStream& rng, int draws, double spread) {
  DrawArchive ar;
  ar.config.mode = InferenceMode::FixedK;
  ar.config.k = K;
  ar.n = data.n();
  ar.p = data.p();
  for (int d = 0; d < draws; ++d) {
    Draw draw;
    draw.info.K = K;
    draw.pi = sample_dirichlet(rng, arma::vec(K, arma::fill::value(5.0)));
    for (arma::uword k = 0; k < K; ++k) {
      ComponentParams c = oracle::random_component(rng, data.p());
      c.alpha = spread * static_cast<double>(k);
      draw.comps.push_back(c);
    }
    draw.z = arma::uvec(data.n(), arma::fill::zeros);
    MixtureState s{draw.z, draw.pi, 1.0, draw.comps};
    draw.info.log_lik = observed_log_lik(data, s);
    draw.info.k_plus = 1;
    ar.draws.push_back(draw);
  }
  return ar;
}

}  // namespace

TEST_CASE("free parameter count") {
  CHECK(free_parameters(2, 9) == 131.0);
  CHECK(free_parameters(1, 1) == 5.0);
  for (arma::uword K = 1; K < 10; ++K) CHECK(free_parameters(K + 1, 4) > free_parameters(K, 4));
}

TEST_CASE("allocation entropy") {
  CHECK(allocation_entropy(arma::mat{{1, 0}, {0, 1}}) == 0.0);
  CHECK(allocation_entropy(arma::mat{{0.5, 0.5}}) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("criteria from fixed-K runs") {
  RngStream rng(91, 0);
  const Dataset data = oracle::random_dataset(rng, 50, 2);
  std::vector<DrawArchive> archives;
  for (arma::uword K = 1; K <= 3; ++K) archives.push_back(fixed_archive(K, data, rng, 20, 1.0));
  DrawArchive extra = fixed_archive(2, data, rng, 20, 1.0);
  std::map<arma::uword, std::vector<const DrawArchive*>> runs{
      {1, {&archives[0]}}, {2, {&archives[1], &extra}}, {3, {&archives[2]}}};
  const CriterionReport rep = evaluate_criteria(runs, data);
  REQUIRE(rep.rows.size() == 3);
  const double logn = std::log(50.0);
  for (const auto& row : rep.rows) {
    double best = -1e300;
    for (const DrawArchive* ar : runs.at(row.K))
      for (const Draw& d : ar->draws) best = std::max(best, d.info.log_lik);
    CHECK(row.log_lik == best);
    CHECK(row.aic - row.bic == doctest::Approx(row.d * (2.0 - logn)).epsilon(1e-12));
    CHECK(row.icl >= row.bic);
    CHECK(row.aic == -2.0 * row.log_lik + 2.0 * row.d);
  }
  CHECK(rep.rows[0].icl == rep.rows[0].bic);
  arma::uword best_bic = 1;
  for (const auto& row : rep.rows)
    if (row.bic < rep.rows[best_bic - 1].bic) best_bic = row.K;
  CHECK(rep.best_bic == best_bic);

  const std::string csv = criteria_csv(rep);
  CHECK(csv.rfind("K,d,loglik,aic,bic,icl\n1,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}

TEST_CASE("hard allocations give ICL equal to BIC") {
  RngStream rng(92, 0);
  Dataset data = oracle::random_dataset(rng, 30, 1);
  DrawArchive ar = fixed_archive(2, data, rng, 1, 1e6);
  for (auto& c : ar.draws[0].comps) c.sigma2 = 1.0;
  for (arma::uword i = 0; i < 30; ++i) data.y[i] = i < 15 ? 0.0 : 1e6;
  MixtureState s{ar.draws[0].z, ar.draws[0].pi, 1.0, ar.draws[0].comps};
  const arma::mat probs = allocation_probs(data, s);
  REQUIRE(arma::all(arma::vectorise((probs == 0.0) + (probs == 1.0)) == 1));
  const CriterionReport rep = evaluate_criteria({{2, {&ar}}}, data);
  CHECK(rep.rows[0].icl == rep.rows[0].bic);
}

TEST_CASE("criteria input errors") {
  RngStream rng(93, 0);
  const Dataset data = oracle::random_dataset(rng, 20, 2);
  DrawArchive a1 = fixed_archive(1, data, rng, 3, 1.0), a3 = fixed_archive(3, data, rng, 3, 1.0);
  try {
    evaluate_criteria({{1, {&a1}}, {3, {&a3}}}, data);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("missing K") != std::string::npos);
    CHECK(std::string(e.what()).find("2") != std::string::npos);
  }
  CHECK_THROWS_AS(evaluate_criteria({{2, {&a1}}}, data), Error);
  DrawArchive tele = a1;
  tele.config.mode = InferenceMode::Telescoping;
  CHECK_THROWS_AS(evaluate_criteria({{1, {&tele}}}, data), Error);
  CHECK_THROWS_AS(evaluate_criteria({}, data), Error);
}
