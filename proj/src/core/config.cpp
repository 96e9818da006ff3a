#include "bgcwm/config.hpp"

#include <fstream>
#include <set>

#include "bgcwm/error.hpp"

namespace bgcwm {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorKind::Config, what); }

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) config_error(where + " must be a JSON object");
  for (const auto& item : j.items())
    if (!known.count(item.key())) config_error("unknown configuration key '" + where + item.key() + "'");
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    config_error(std::string("invalid value for '") + key + "': " + e.what());
  }
}

json hyper_to_json(const Hyperparams& h) {
  return json{{"sigma_alpha2", h.sigma_alpha2},
              {"a", h.a},
              {"b", h.b},
              {"m0", arma::conv_to<std::vector<double>>::from(h.m0)},
              {"r", h.r},
              {"s", h.s},
              {"nu_l", h.nu_l},
              {"nu_r", h.nu_r},
              {"a_lambda", h.bnb.a_lambda},
              {"a_pi", h.bnb.a_pi},
              {"b_pi", h.bnb.b_pi},
              {"fixed_k_gamma", h.fixed_k_gamma},
              {"overfitting_gamma", h.overfitting_gamma},
              {"literal_gamma_target", h.literal_gamma_target},
              {"literal_eta_shape", h.literal_eta_shape}};
}

Hyperparams hyper_from_json(const json& j) {
  reject_unknown(j,
                 {"sigma_alpha2", "a", "b", "m0", "r", "s", "nu_l", "nu_r", "a_lambda", "a_pi",
                  "b_pi", "fixed_k_gamma", "overfitting_gamma", "literal_gamma_target",
                  "literal_eta_shape"},
                 "hyper.");
  Hyperparams h;
  read(j, "sigma_alpha2", h.sigma_alpha2);
  read(j, "a", h.a);
  read(j, "b", h.b);
  std::vector<double> m0;
  read(j, "m0", m0);
  h.m0 = arma::vec(m0);
  read(j, "r", h.r);
  read(j, "s", h.s);
  read(j, "nu_l", h.nu_l);
  read(j, "nu_r", h.nu_r);
  read(j, "a_lambda", h.bnb.a_lambda);
  read(j, "a_pi", h.bnb.a_pi);
  read(j, "b_pi", h.bnb.b_pi);
  read(j, "fixed_k_gamma", h.fixed_k_gamma);
  read(j, "overfitting_gamma", h.overfitting_gamma);
  read(j, "literal_gamma_target", h.literal_gamma_target);
  read(j, "literal_eta_shape", h.literal_eta_shape);
  return h;
}

}  // namespace

std::uint64_t RunConfig::seed_for_chain(std::size_t chain) const {
  if (seeds.empty()) return 1;
  return chain < seeds.size() ? seeds[chain] : seeds.front();
}

std::uint64_t RunConfig::stream_for_chain(std::size_t chain) const {
  return chain < seeds.size() ? 0 : chain;
}

void RunConfig::validate() const {
  if (iterations == 0) config_error("iterations must be positive");
  if (burn_in >= iterations) config_error("burn_in must be smaller than iterations");
  if (thin < 1) config_error("thin must be at least 1");
  if (chains < 1) config_error("chains must be at least 1");
  if (seeds.empty()) config_error("at least one seed is required");
  if (mode == InferenceMode::FixedK && k < 1) config_error("k must be at least 1");
  if (mode == InferenceMode::Overfitting && k_max < 1) config_error("k_max must be at least 1");
  if (init_k_min < 1 || init_k_min > init_k_max) config_error("invalid init_k range");
  if (!(initial_gamma > 0.0)) config_error("initial_gamma must be positive");
  if (!(gamma_proposal_scale >= 0.0)) config_error("gamma_proposal_scale must be non-negative");
  if (!(level > 0.0 && level < 1.0)) config_error("level must lie in (0, 1)");
  if (mode_window < 1) config_error("mode_window must be at least 1");
  hyper.validate();
}

void apply_preset(RunConfig& config, const std::string& name) {
  if (name == "default") {
    config.iterations = 11000;
    config.burn_in = 1000;
    config.thin = 10;
  } else if (name == "long") {
    config.iterations = 250000;
    config.burn_in = 50000;
    config.thin = 100;
  } else {
    config_error("unknown preset '" + name + "'");
  }
}

json to_json(const RunConfig& c) {
  return json{{"mode", to_string(c.mode)},
              {"k", c.k},
              {"k_max", c.k_max},
              {"iterations", c.iterations},
              {"burn_in", c.burn_in},
              {"thin", c.thin},
              {"chains", c.chains},
              {"seeds", c.seeds},
              {"init_restarts", c.init_restarts},
              {"init_k_min", c.init_k_min},
              {"init_k_max", c.init_k_max},
              {"initial_gamma", c.initial_gamma},
              {"gamma_proposal_scale", c.gamma_proposal_scale},
              {"minor_mode_gap", c.minor_mode_gap},
              {"mode_window", c.mode_window},
              {"warm_sweeps", c.warm_sweeps},
              {"jobs", c.jobs},
              {"write_draws_csv", c.write_draws_csv},
              {"level", c.level},
              {"hyper", hyper_to_json(c.hyper)}};
}

RunConfig config_from_json(const json& j) {
  reject_unknown(j,
                 {"mode", "k", "k_max", "iterations", "burn_in", "thin", "chains", "seeds", "seed",
                  "init_restarts", "init_k_min", "init_k_max", "initial_gamma",
                  "gamma_proposal_scale", "minor_mode_gap", "mode_window", "warm_sweeps", "jobs",
                  "write_draws_csv", "level", "preset", "hyper"},
                 "");
  RunConfig c;
  if (j.contains("preset")) apply_preset(c, j.at("preset").get<std::string>());
  if (j.contains("mode")) c.mode = inference_mode_from_string(j.at("mode").get<std::string>());
  read(j, "k", c.k);
  read(j, "k_max", c.k_max);
  read(j, "iterations", c.iterations);
  read(j, "burn_in", c.burn_in);
  read(j, "thin", c.thin);
  read(j, "chains", c.chains);
  read(j, "seeds", c.seeds);
  if (j.contains("seed")) {
    std::uint64_t s = 0;
    read(j, "seed", s);
    c.seeds = {s};
  }
  read(j, "init_restarts", c.init_restarts);
  read(j, "init_k_min", c.init_k_min);
  read(j, "init_k_max", c.init_k_max);
  read(j, "initial_gamma", c.initial_gamma);
  read(j, "gamma_proposal_scale", c.gamma_proposal_scale);
  read(j, "minor_mode_gap", c.minor_mode_gap);
  read(j, "mode_window", c.mode_window);
  read(j, "warm_sweeps", c.warm_sweeps);
  read(j, "jobs", c.jobs);
  read(j, "write_draws_csv", c.write_draws_csv);
  read(j, "level", c.level);
  if (j.contains("hyper")) c.hyper = hyper_from_json(j.at("hyper"));
  return c;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    config_error("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

void apply_override(RunConfig& config, const std::string& key, const std::string& value) {
  json j = to_json(config);
  json parsed;
  try {
    parsed = json::parse(value);
  } catch (const json::exception&) {
    parsed = value;
  }
  if (key == "preset") {
    apply_preset(config, value);
    return;
  }
  if (key == "seed") {
    j.erase("seeds");
    j["seed"] = parsed;
    config = config_from_json(j);
    return;
  }
  const auto dot = key.find('.');
  if (dot == std::string::npos) {
    if (!j.contains(key)) config_error("unknown configuration key '" + key + "'");
    j[key] = parsed;
  } else {
    const std::string head = key.substr(0, dot);
    const std::string tail = key.substr(dot + 1);
    if (head != "hyper" || !j["hyper"].contains(tail))
      config_error("unknown configuration key '" + key + "'");
    j["hyper"][tail] = parsed;
  }
  config = config_from_json(j);
}

}  // namespace bgcwm
