#include <doctest.h>

#include "bgcwm/config.hpp"
#include "bgcwm/error.hpp"
#include "tmpdir.hpp"

using namespace bgcwm;

namespace {

bool is_config_error(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind() == ErrorKind::Config;
  }
  return false;
}

}  // namespace

TEST_CASE("defaults and retained draw count") {
  RunConfig c;
  CHECK(c.mode == InferenceMode::Telescoping);
  CHECK(c.iterations == 11000);
  CHECK(c.burn_in == 1000);
  CHECK(c.thin == 10);
  CHECK(c.retained_draws() == 1000);
  CHECK(c.hyper.sigma_alpha2 == 1e3);
  CHECK(c.hyper.a == 1e-2);
  CHECK(c.hyper.b == 1e-2);
  CHECK(c.hyper.s == 1e-2);
  CHECK(c.hyper.bnb.a_pi == 4.0);
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("presets") {
  RunConfig c;
  apply_preset(c, "long");
  CHECK(c.iterations == 250000);
  CHECK(c.thin == 100);
  CHECK(c.burn_in < c.iterations);
  apply_preset(c, "default");
  CHECK(c.retained_draws() == 1000);
  CHECK(is_config_error([&] { apply_preset(c, "short"); }));
}

TEST_CASE("validation") {
  RunConfig c;
  c.burn_in = c.iterations;
  CHECK(is_config_error([&] { c.validate(); }));
  c = RunConfig{};
  c.thin = 0;
  CHECK(is_config_error([&] { c.validate(); }));
  c = RunConfig{};
  c.seeds.clear();
  CHECK(is_config_error([&] { c.validate(); }));
  c = RunConfig{};
  c.hyper.a = -1.0;
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("seed assignment per chain") {
  RunConfig c;
  c.seeds = {7};
  c.chains = 3;
  CHECK(c.seed_for_chain(2) == 7);
  CHECK(c.stream_for_chain(2) == 2);
  c.seeds = {7, 8, 9};
  CHECK(c.seed_for_chain(2) == 9);
  CHECK(c.stream_for_chain(2) == 0);
}

TEST_CASE("json round trip and strict keys") {
  RunConfig c;
  c.mode = InferenceMode::Overfitting;
  c.k_max = 12;
  c.seeds = {3, 4};
  c.hyper.a = 1e-3;
  c.hyper.literal_gamma_target = true;
  const RunConfig back = config_from_json(to_json(c));
  CHECK(back.mode == InferenceMode::Overfitting);
  CHECK(back.k_max == 12);
  CHECK(back.seeds == std::vector<std::uint64_t>{3, 4});
  CHECK(back.hyper.a == 1e-3);
  CHECK(back.hyper.literal_gamma_target);
  CHECK(to_json(back) == to_json(c));

  CHECK(is_config_error([] { config_from_json(nlohmann::json{{"iterationz", 10}}); }));
  CHECK(is_config_error([] { config_from_json(nlohmann::json{{"hyper", {{"q", 1.0}}}}); }));
  CHECK(is_config_error([] { config_from_json(nlohmann::json{{"mode", "unknown"}}); }));
  CHECK(is_config_error([] { config_from_json(nlohmann::json{{"thin", "ten"}}); }));

  const RunConfig single = config_from_json(nlohmann::json{{"seed", 5}});
  CHECK(single.seeds == std::vector<std::uint64_t>{5});
  const RunConfig preset = config_from_json(nlohmann::json{{"preset", "long"}});
  CHECK(preset.iterations == 250000);
}

TEST_CASE("config file and overrides") {
  testutil::TempDir dir("config");
  testutil::write_text(dir / "run.json", R"({"mode": "fixed_k", "k": 3, "iterations": 200, "burn_in": 100})");
  RunConfig c = load_config_file(dir / "run.json");
  CHECK(c.mode == InferenceMode::FixedK);
  CHECK(c.k == 3);

  apply_override(c, "thin", "5");
  apply_override(c, "hyper.a", "0.001");
  apply_override(c, "mode", "telescoping");
  apply_override(c, "seeds", "[1,2,3]");
  CHECK(c.thin == 5);
  CHECK(c.hyper.a == 0.001);
  CHECK(c.mode == InferenceMode::Telescoping);
  CHECK(c.seeds.size() == 3);
  CHECK(is_config_error([&] { apply_override(c, "nonsense", "1"); }));
  CHECK(is_config_error([&] { apply_override(c, "hyper.nonsense", "1"); }));
  CHECK(is_config_error([&] { apply_override(c, "thin.x", "1"); }));

  testutil::write_text(dir / "bad.json", "{ not json");
  CHECK(is_config_error([&] { load_config_file(dir / "bad.json"); }));
  CHECK_THROWS_AS(load_config_file(dir / "missing.json"), Error);
}
