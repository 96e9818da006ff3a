#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bgcwm/bgcwm.h"

namespace {

constexpr int kExitUsage = 2;

struct Failure {
  int status;
  std::string message;
};

void check(int status) {
  if (status != BGCWM_OK) throw Failure{status, bgcwm_last_error()};
}

int report(const Failure& f) {
  const nlohmann::json err{{"error", {{"status", bgcwm_status_name(f.status)}, {"message", f.message}}}};
  std::cerr << err.dump() << std::endl;
  return f.status == BGCWM_ERR_CONFIG ? kExitUsage : 1;
}

std::vector<const char*> c_strings(const std::vector<std::string>& v) {
  std::vector<const char*> out;
  for (const auto& s : v) out.push_back(s.c_str());
  return out;
}

class Config {
 public:
  Config() { check(bgcwm_config_create(&ptr_)); }
  ~Config() { bgcwm_config_destroy(ptr_); }
  Config(const Config&) = delete;
  Config& operator=(const Config&) = delete;
  bgcwm_config* get() { return ptr_; }
  void set(const std::string& key, const std::string& value) {
    check(bgcwm_config_set(ptr_, key.c_str(), value.c_str()));
  }
  std::string json() const {
    size_t needed = 0;
    check(bgcwm_config_to_json(ptr_, nullptr, 0, &needed));
    std::string buf(needed, '\0');
    check(bgcwm_config_to_json(ptr_, buf.data(), buf.size(), &needed));
    buf.resize(needed - 1);
    return buf;
  }

 private:
  bgcwm_config* ptr_ = nullptr;
};

struct FitOptions {
  std::string data, out, config_file, preset, mode;
  std::vector<std::string> overrides;
  std::optional<unsigned> k, k_max, chains, jobs;
  std::optional<std::size_t> iters, burnin, thin;
  std::vector<std::uint64_t> seeds;
  std::optional<double> level;
  bool draws_csv = false;
  bool dry_run = false;
};

void apply_fit_options(Config& cfg, const FitOptions& o) {
  if (!o.config_file.empty()) check(bgcwm_config_load(cfg.get(), o.config_file.c_str()));
  if (!o.preset.empty()) check(bgcwm_config_preset(cfg.get(), o.preset.c_str()));
  if (!o.mode.empty()) cfg.set("mode", o.mode);
  if (o.k) cfg.set("k", std::to_string(*o.k));
  if (o.k_max) cfg.set("k_max", std::to_string(*o.k_max));
  if (o.iters) cfg.set("iterations", std::to_string(*o.iters));
  if (o.burnin) cfg.set("burn_in", std::to_string(*o.burnin));
  if (o.thin) cfg.set("thin", std::to_string(*o.thin));
  if (o.chains) cfg.set("chains", std::to_string(*o.chains));
  if (o.jobs) cfg.set("jobs", std::to_string(*o.jobs));
  if (o.level) cfg.set("level", std::to_string(*o.level));
  if (!o.seeds.empty()) cfg.set("seeds", nlohmann::json(o.seeds).dump());
  if (o.draws_csv) cfg.set("write_draws_csv", "true");
  for (const auto& kv : o.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0)
      throw Failure{BGCWM_ERR_CONFIG, "override '" + kv + "' is not of the form key=value"};
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian Gaussian cluster-weighted model: simulate, fit, postprocess, criteria, score"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(bgcwm_version()));

  // simulate
  auto* sim = app.add_subcommand("simulate", "Generate a synthetic dataset and its ground truth");
  std::string sim_spec_file, sim_data, sim_truth;
  std::optional<unsigned> sim_K, sim_p, sim_n;
  std::optional<int> sim_scenario;
  std::optional<double> sim_p0;
  std::optional<std::uint64_t> sim_seed;
  sim->add_option("--spec", sim_spec_file, "JSON file with K, p, n, scenario, p0, seed")->check(CLI::ExistingFile);
  sim->add_option("--K", sim_K, "Number of clusters (1-4)");
  sim->add_option("--p", sim_p, "Number of covariates");
  sim->add_option("--n", sim_n, "Sample size");
  sim->add_option("--scenario", sim_scenario, "Covariate scenario (1-4)");
  sim->add_option("--p0", sim_p0, "Probability of a zero coefficient");
  sim->add_option("--seed", sim_seed, "Random seed");
  sim->add_option("--out-data", sim_data, "Output CSV")->required();
  sim->add_option("--out-truth", sim_truth, "Output truth JSON")->required();

  // fit
  auto* fit = app.add_subcommand("fit", "Run the MCMC sampler and write chain archives");
  FitOptions fo;
  fit->add_option("--data", fo.data, "Dataset CSV")->required()->check(CLI::ExistingFile);
  fit->add_option("--out", fo.out, "Output directory")->required();
  fit->add_option("--config", fo.config_file, "JSON configuration file")->check(CLI::ExistingFile);
  fit->add_option("--preset", fo.preset, "Schedule preset: default or long");
  fit->add_option("--mode", fo.mode, "fixed_k, overfitting or telescoping");
  fit->add_option("--k", fo.k, "Components in fixed_k mode");
  fit->add_option("--k-max", fo.k_max, "Components in overfitting mode");
  fit->add_option("--iters", fo.iters, "Total iterations");
  fit->add_option("--burnin", fo.burnin, "Burn-in iterations");
  fit->add_option("--thin", fo.thin, "Thinning interval");
  fit->add_option("--chains", fo.chains, "Number of chains");
  fit->add_option("--seed", fo.seeds, "Seed (repeat for one seed per chain)");
  fit->add_option("--level", fo.level, "Credible level stored with the run");
  fit->add_option("--jobs", fo.jobs, "Chains run in parallel");
  fit->add_option("--set", fo.overrides, "Configuration override key=value (repeatable)");
  fit->add_flag("--draws-csv", fo.draws_csv, "Also write draws.csv");
  fit->add_flag("--dry-run", fo.dry_run, "Print the resolved configuration and exit");

  // postprocess
  auto* post = app.add_subcommand("postprocess", "Relabel draws, select variables and summarize");
  std::vector<std::string> post_runs;
  std::string post_data, post_out;
  double post_level = 0.90;
  post->add_option("--run", post_runs, "Fit or chain directory (repeatable)")->required();
  post->add_option("--data", post_data, "Dataset CSV used for the fit")->required()->check(CLI::ExistingFile);
  post->add_option("--out", post_out, "Output directory")->required();
  post->add_option("--level", post_level, "Simultaneous credible level");

  // criteria
  auto* crit = app.add_subcommand("criteria", "AIC, BIC and ICL over fixed_k runs");
  std::vector<std::string> crit_runs;
  std::string crit_data, crit_out;
  crit->add_option("--run", crit_runs, "Fit directory of a fixed_k run (repeatable)")->required();
  crit->add_option("--data", crit_data, "Dataset CSV")->required()->check(CLI::ExistingFile);
  crit->add_option("--out", crit_out, "Output criteria.csv")->required();

  // score
  auto* sc = app.add_subcommand("score", "Compare a summary against simulation truth");
  std::string sc_truth, sc_summary, sc_out;
  sc->add_option("--truth", sc_truth, "truth.json")->required()->check(CLI::ExistingFile);
  sc->add_option("--summary", sc_summary, "summary.json")->required()->check(CLI::ExistingFile);
  sc->add_option("--out", sc_out, "Output metrics.json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << nlohmann::json{{"error", {{"status", "usage"}, {"message", e.what()}}}}.dump() << std::endl;
    return kExitUsage;
  }

  try {
    if (*sim) {
      bgcwm_sim_spec spec;
      bgcwm_sim_spec_default(&spec);
      if (!sim_spec_file.empty()) check(bgcwm_sim_spec_load(sim_spec_file.c_str(), &spec));
      if (sim_K) spec.K = *sim_K;
      if (sim_p) spec.p = *sim_p;
      if (sim_n) spec.n = *sim_n;
      if (sim_scenario) spec.scenario = *sim_scenario;
      if (sim_p0) spec.p0 = *sim_p0;
      if (sim_seed) spec.seed = *sim_seed;
      check(bgcwm_simulate(&spec, sim_data.c_str(), sim_truth.c_str()));
    } else if (*fit) {
      Config cfg;
      apply_fit_options(cfg, fo);
      if (fo.dry_run) {
        std::cout << cfg.json() << std::endl;
        return 0;
      }
      check(bgcwm_fit(fo.data.c_str(), cfg.get(), fo.out.c_str()));
    } else if (*post) {
      const auto runs = c_strings(post_runs);
      check(bgcwm_postprocess(runs.data(), runs.size(), post_data.c_str(), post_level, post_out.c_str()));
    } else if (*crit) {
      const auto runs = c_strings(crit_runs);
      check(bgcwm_criteria(runs.data(), runs.size(), crit_data.c_str(), crit_out.c_str()));
    } else if (*sc) {
      check(bgcwm_score(sc_truth.c_str(), sc_summary.c_str(), sc_out.c_str()));
    }
  } catch (const Failure& f) {
    return report(f);
  }
  return 0;
}
