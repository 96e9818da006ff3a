#include <doctest.h>

#include <filesystem>

#include "bgcwm/archive.hpp"
#include "bgcwm/simulate.hpp"
#include "tmpdir.hpp"

using namespace bgcwm;

namespace {

DrawArchive small_run(bool draws_csv) {
  SimSpec s;
  s.n = 60;
  s.p = 3;
  s.seed = 4;
  const SimResult sim = gen_dataset(s);
  RunConfig c;
  c.iterations = 300;
  c.burn_in = 100;
  c.thin = 5;
  c.init_restarts = 2;
  c.write_draws_csv = draws_csv;
  return run_chain(sim.data, c, 0);
}

void check_component(const ComponentParams& a, const ComponentParams& b) {
  CHECK(a.alpha == b.alpha);
  CHECK(a.sigma2 == b.sigma2);
  CHECK(a.lambda == b.lambda);
  CHECK(a.delta == b.delta);
  CHECK(a.psi == b.psi);
  CHECK(arma::approx_equal(a.beta, b.beta, "absdiff", 0.0));
  CHECK(arma::approx_equal(a.tau2, b.tau2, "absdiff", 0.0));
  CHECK(arma::approx_equal(a.mu, b.mu, "absdiff", 0.0));
  CHECK(arma::approx_equal(a.omega, b.omega, "absdiff", 0.0));
  CHECK(arma::approx_equal(a.phi, b.phi, "absdiff", 0.0));
}

}  // namespace

TEST_CASE("archive round trip is exact") {
  const DrawArchive a = small_run(true);
  testutil::TempDir dir("archive");
  write_archive(dir.str(), a, {{"note", "x"}});
  for (const char* f : {"manifest.json", "trace.csv", "draws.bin", "draws.csv"})
    CHECK(std::filesystem::exists(dir / f));

  const DrawArchive b = read_archive(dir.str());
  CHECK(b.chain == a.chain);
  CHECK(b.seed == a.seed);
  CHECK(b.n == a.n);
  CHECK(b.p == a.p);
  CHECK(b.config.iterations == 300);
  REQUIRE(b.trace.size() == a.trace.size());
  for (std::size_t t = 0; t < a.trace.size(); ++t) {
    CHECK(b.trace[t].iteration == a.trace[t].iteration);
    CHECK(b.trace[t].K == a.trace[t].K);
    CHECK(b.trace[t].gamma == a.trace[t].gamma);
    CHECK(b.trace[t].log_post == a.trace[t].log_post);
  }
  REQUIRE(b.draws.size() == 40);
  for (std::size_t d = 0; d < a.draws.size(); ++d) {
    CHECK(arma::all(b.draws[d].z == a.draws[d].z));
    CHECK(arma::approx_equal(b.draws[d].pi, a.draws[d].pi, "absdiff", 0.0));
    REQUIRE(b.draws[d].comps.size() == a.draws[d].comps.size());
    for (std::size_t k = 0; k < a.draws[d].comps.size(); ++k) check_component(a.draws[d].comps[k], b.draws[d].comps[k]);
  }
  // writing the reread archive reproduces the same files
  testutil::TempDir again("archive2");
  write_archive(again.str(), b, {{"note", "x"}});
  CHECK(testutil::read_text(dir / "draws.bin") == testutil::read_text(again / "draws.bin"));
  CHECK(testutil::read_text(dir / "trace.csv") == testutil::read_text(again / "trace.csv"));
}

TEST_CASE("trace.csv layout") {
  std::vector<TraceRow> rows{{1, 3, 2, 0.5, -1.25, -2.0}, {2, 4, 2, 1.0 / 3.0, -1.0, -3.5}};
  const std::string text = trace_csv(rows);
  CHECK(text.rfind("iteration,K,K_plus,gamma,log_lik,log_post\n", 0) == 0);
  CHECK(text.find("\n1,3,2,0.5,-1.25,-2\n") != std::string::npos);
  CHECK(text.find("0.33333333333333331") != std::string::npos);
}

TEST_CASE("corrupt or foreign directories are rejected") {
  const DrawArchive a = small_run(false);
  testutil::TempDir dir("corrupt");
  write_archive(dir.str(), a);
  CHECK_FALSE(std::filesystem::exists(dir / "draws.csv"));
  std::string bin = testutil::read_text(dir / "draws.bin");
  testutil::write_text(dir / "draws.bin", bin.substr(0, bin.size() - 8 * 7));
  CHECK_THROWS_AS(read_archive(dir.str()), Error);

  testutil::TempDir empty("empty");
  CHECK_THROWS_AS(read_archive(empty.str()), Error);
  testutil::write_text(empty / "manifest.json", R"({"kind":"other"})");
  CHECK_THROWS_AS(read_archive(empty.str()), Error);
  CHECK_THROWS_AS(resolve_chain_dirs(empty.str()), Error);
}

TEST_CASE("chain directory resolution") {
  testutil::TempDir fit("fit");
  testutil::write_text(fit / "manifest.json",
                       R"({"kind":"fit","chains":[{"dir":"chain_1","main_mode":true},)"
                       R"({"dir":"chain_2","main_mode":false},{"dir":"chain_3"}]})");
  const auto main = resolve_chain_dirs(fit.str(), true);
  REQUIRE(main.size() == 2);
  CHECK(main[0] == fit / "chain_1");
  CHECK(main[1] == fit / "chain_3");
  CHECK(resolve_chain_dirs(fit.str(), false).size() == 3);

  const DrawArchive a = small_run(false);
  testutil::TempDir chain("chain");
  write_archive(chain.str(), a);
  CHECK(resolve_chain_dirs(chain.str()) == std::vector<std::string>{chain.str()});
}
