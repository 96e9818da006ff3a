#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "bgcwm/archive.hpp"
#include "bgcwm/dataset_io.hpp"
#include "bgcwm/pipeline.hpp"
#include "tmpdir.hpp"

using namespace bgcwm;
using nlohmann::json;

namespace {

RunConfig quick(InferenceMode mode, arma::uword k = 2) {
  RunConfig c;
  c.mode = mode;
  c.k = k;
  c.iterations = 400;
  c.burn_in = 100;
  c.thin = 2;
  c.chains = 2;
  c.init_restarts = 2;
  return c;
}

std::size_t line_count(const std::string& text) { return std::count(text.begin(), text.end(), '\n'); }

}  // namespace

TEST_CASE("simulate, fit, postprocess and score") {
  testutil::TempDir dir("pipeline");
  SimSpec spec;
  spec.n = 120;
  spec.p = 3;
  spec.scenario = 3;
  spec.seed = 21;
  const json truth = simulate_to_files(spec, dir / "data.csv", dir / "truth.json");
  CHECK(truth.at("allocations").size() == 120);
  const Dataset data = read_dataset_csv(dir / "data.csv");
  CHECK(data.n() == 120);
  CHECK(data.labels.size() == 120);

  const json manifest = fit_to_dir(dir / "data.csv", quick(InferenceMode::Telescoping), dir / "fit");
  CHECK(manifest.at("kind") == "fit");
  REQUIRE(manifest.at("chains").size() == 2);
  CHECK(read_json_file(dir / "fit/manifest.json") == manifest);
  const DrawArchive chain = read_archive(dir / "fit/chain_1");
  CHECK(chain.draws.size() == 150);

  const json summary = postprocess_to_dir({dir / "fit"}, dir / "data.csv", 0.9, dir / "post");
  const arma::uword kp = summary.at("modal_k_plus").get<arma::uword>();
  double mass = 0.0;
  for (const auto& item : summary.at("k_plus_posterior").items()) mass += item.value().get<double>();
  CHECK(mass == doctest::Approx(1.0));
  CHECK(summary.at("clustering").size() == 120);
  CHECK(summary.contains("ari"));
  CHECK(summary.at("selection").at("xi").size() == 3);
  CHECK(line_count(testutil::read_text(dir / "post/clustering.csv")) == 121);
  CHECK(line_count(testutil::read_text(dir / "post/regions.csv")) == 1 + kp * 3);
  CHECK(line_count(testutil::read_text(dir / "post/kde_beta.csv")) == 1 + kp * 3 * 100);
  std::uint64_t total = 0;
  for (const auto& row : summary.at("confusion").at("counts"))
    for (const auto& v : row) total += v.get<std::uint64_t>();
  CHECK(total == 120);

  const json scored = score_files(dir / "truth.json", dir / "post/summary.json", dir / "score.json");
  CHECK(scored.at("abs_k_error").get<double>() == std::fabs(2.0 - static_cast<double>(kp)));
  CHECK(scored.at("ari").get<double>() == doctest::Approx(summary.at("ari").get<double>()).epsilon(1e-12));
  double hamming = 0;
  for (std::size_t j = 0; j < 3; ++j)
    hamming += std::abs(truth.at("xi")[j].get<int>() - summary.at("selection").at("xi")[j].get<int>());
  CHECK(scored.at("hamming").get<double>() == hamming);
}

TEST_CASE("reruns reproduce trace files byte for byte") {
  testutil::TempDir dir("rerun");
  SimSpec spec;
  spec.n = 60;
  spec.p = 2;
  simulate_to_files(spec, dir / "data.csv", dir / "truth.json");
  RunConfig c = quick(InferenceMode::Telescoping);
  c.jobs = 2;
  fit_to_dir(dir / "data.csv", c, dir / "a");
  c.jobs = 1;
  fit_to_dir(dir / "data.csv", c, dir / "b");
  for (const char* chain : {"chain_1", "chain_2"}) {
    const std::string f = std::string(chain) + "/trace.csv";
    CHECK(testutil::read_text(dir / ("a/" + f)) == testutil::read_text(dir / ("b/" + f)));
    const std::string g = std::string(chain) + "/draws.bin";
    CHECK(testutil::read_text(dir / ("a/" + g)) == testutil::read_text(dir / ("b/" + g)));
  }
}

TEST_CASE("criteria over fixed-K fits") {
  testutil::TempDir dir("criteria");
  SimSpec spec;
  spec.n = 80;
  spec.p = 2;
  simulate_to_files(spec, dir / "data.csv", dir / "truth.json");
  for (arma::uword K = 1; K <= 3; ++K)
    fit_to_dir(dir / "data.csv", quick(InferenceMode::FixedK, K), dir / ("k" + std::to_string(K)));
  const json rep = criteria_to_file({dir / "k1", dir / "k2", dir / "k3"}, dir / "data.csv", dir / "criteria.csv");
  CHECK(rep.at("rows").size() == 3);
  const std::string csv = testutil::read_text(dir / "criteria.csv");
  CHECK(csv.rfind("K,d,loglik,aic,bic,icl\n", 0) == 0);
  CHECK(line_count(csv) == 4);

  CHECK_THROWS_AS(criteria_to_file({dir / "k1", dir / "k3"}, dir / "data.csv", dir / "gap.csv"), Error);
  fit_to_dir(dir / "data.csv", quick(InferenceMode::Telescoping), dir / "tele");
  CHECK_THROWS_AS(criteria_to_file({dir / "k1", dir / "tele"}, dir / "data.csv", dir / "bad.csv"), Error);
}

TEST_CASE("score from hand-written files") {
  const json truth{{"K", 3}, {"allocations", {1, 1, 2, 2, 3, 3}}, {"xi", {1, 0, 1, 0}}};
  const json summary{{"modal_k_plus", 2},
                     {"clustering", {2, 2, 1, 1, 1, 1}},
                     {"selection", {{"xi", {1, 1, 0, 0}}}}};
  const ScoreMetrics m = score(truth, summary);
  CHECK(m.abs_k_error == 1.0);
  CHECK(m.hamming == 2.0);
  CHECK(m.ari == doctest::Approx(adjusted_rand_index(std::vector<int>{1, 1, 2, 2, 3, 3},
                                                      std::vector<int>{2, 2, 1, 1, 1, 1})));
  CHECK_THROWS_AS(score(json{{"K", 2}}, summary), Error);
}

TEST_CASE("pipeline input errors") {
  testutil::TempDir dir("errors");
  CHECK_THROWS_AS(fit_to_dir(dir / "missing.csv", quick(InferenceMode::Telescoping), dir / "fit"), Error);
  CHECK_THROWS_AS(read_json_file(dir / "missing.json"), Error);
  testutil::write_text(dir / "bad.json", "{");
  CHECK_THROWS_AS(read_json_file(dir / "bad.json"), Error);
  CHECK_THROWS_AS(postprocess_to_dir({dir.str()}, dir / "missing.csv", 0.9, dir / "post"), Error);
}
