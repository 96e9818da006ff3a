#ifndef BGCWM_CONFIG_HPP
#define BGCWM_CONFIG_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "bgcwm/model.hpp"

namespace bgcwm {

struct RunConfig {
  InferenceMode mode = InferenceMode::Telescoping;
  arma::uword k = 2;       // number of components in fixed_k mode
  arma::uword k_max = 20;  // number of components in overfitting mode
  std::size_t iterations = 11000;
  std::size_t burn_in = 1000;
  std::size_t thin = 10;
  std::size_t chains = 1;
  std::vector<std::uint64_t> seeds{1};
  std::size_t init_restarts = 30;
  arma::uword init_k_min = 6;
  arma::uword init_k_max = 15;
  double initial_gamma = 1.0;
  double gamma_proposal_scale = 0.5;
  double minor_mode_gap = 50.0;
  std::size_t mode_window = 100;
  std::size_t warm_sweeps = 10;
  std::size_t jobs = 1;
  bool write_draws_csv = false;
  double level = 0.90;
  Hyperparams hyper;

  std::size_t retained_draws() const { return (iterations - burn_in) / thin; }
  // Chain c uses seeds[c] when the list is long enough; otherwise every chain
  // shares seeds[0] and is told apart by its stream id.
  std::uint64_t seed_for_chain(std::size_t chain) const;
  std::uint64_t stream_for_chain(std::size_t chain) const;
  void validate() const;
};

// Applies a named preset ("default" or "long") to the schedule fields.
void apply_preset(RunConfig& config, const std::string& name);

nlohmann::json to_json(const RunConfig& config);
// Rejects unknown keys with ErrorKind::Config.
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config_file(const std::string& path);

// key is a dotted path such as "iterations" or "hyper.a"; value is parsed as
// JSON when possible and taken as a string otherwise.
void apply_override(RunConfig& config, const std::string& key, const std::string& value);

}  // namespace bgcwm

#endif  // BGCWM_CONFIG_HPP
