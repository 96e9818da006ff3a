#ifndef BGCWM_PIPELINE_HPP
#define BGCWM_PIPELINE_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "bgcwm/config.hpp"
#include "bgcwm/postprocess.hpp"
#include "bgcwm/simulate.hpp"

namespace bgcwm {

// Runs all chains and writes <out>/manifest.json plus one archive directory
// per chain (<out>/chain_<c>). Returns the top-level manifest.
nlohmann::json fit_to_dir(const std::string& data_csv, const RunConfig& config,
                          const std::string& out_dir);

struct PostprocessSummary {
  std::map<arma::uword, double> k_plus_posterior;
  arma::uword modal_k_plus = 0;
  std::size_t draws_used = 0;
  RelabeledDraws relabeled;
  arma::uvec clustering;  // 0-based
  VariableSelectionResult selection;
  bool has_ari = false;
  double ari = 0.0;
};

PostprocessSummary postprocess_archives(const std::vector<const DrawArchive*>& archives,
                                        const Dataset& data, double level);

// `inputs` are fit or chain directories; for fit directories only main-mode
// chains are used. Writes summary.json, clustering.csv, regions.csv and
// kde_beta.csv into out_dir and returns summary.json's content.
nlohmann::json postprocess_to_dir(const std::vector<std::string>& inputs, const std::string& data_csv,
                                  double level, const std::string& out_dir);

// Groups the fixed_k runs by K and writes criteria.csv. Returns the report as
// JSON.
nlohmann::json criteria_to_file(const std::vector<std::string>& inputs, const std::string& data_csv,
                                const std::string& out_csv);

nlohmann::json simulate_to_files(const SimSpec& spec, const std::string& data_csv,
                                 const std::string& truth_json);

struct ScoreMetrics {
  double abs_k_error = 0.0;
  double ari = 0.0;
  double hamming = 0.0;
};

ScoreMetrics score(const nlohmann::json& truth, const nlohmann::json& summary);

nlohmann::json score_files(const std::string& truth_json, const std::string& summary_json,
                           const std::string& out_json);

nlohmann::json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

}  // namespace bgcwm

#endif  // BGCWM_PIPELINE_HPP
