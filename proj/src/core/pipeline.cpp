#include "bgcwm/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bgcwm/archive.hpp"
#include "bgcwm/criteria.hpp"
#include "bgcwm/dataset_io.hpp"
#include "bgcwm/error.hpp"
#include "bgcwm/runner.hpp"

namespace bgcwm {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create directory '" + dir.string() + "': " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error(ErrorKind::Io, "failed writing '" + path.string() + "'");
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::uint64_t> one_based(const arma::uvec& v) {
  std::vector<std::uint64_t> out(v.begin(), v.end());
  for (auto& x : out) ++x;
  return out;
}

std::vector<DrawArchive> load_archives(const std::vector<std::string>& inputs, bool main_only) {
  std::vector<DrawArchive> out;
  for (const auto& in : inputs)
    for (const auto& dir : resolve_chain_dirs(in, main_only)) out.push_back(read_archive(dir));
  if (out.empty()) throw_invalid("no archives found");
  return out;
}

}  // namespace

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Io, "'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_json_file(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json fit_to_dir(const std::string& data_csv, const RunConfig& config, const std::string& out_dir) {
  config.validate();
  const Dataset data = read_dataset_csv(data_csv);
  const fs::path root(out_dir);
  ensure_dir(root);

  MultiChainResult res;
  try {
    res = run_multichain(data, config);
  } catch (const ChainAbort& e) {
    write_json_file((root / "state_dump.json").string(),
                    json{{"sweep", e.sweep()}, {"error", e.what()}, {"state", state_to_json(e.state())}});
    throw;
  }

  json chains = json::array();
  for (std::size_t c = 0; c < res.chains.size(); ++c) {
    const std::string name = "chain_" + std::to_string(c + 1);
    const bool main = res.modes.group[c] == 0;
    write_archive((root / name).string(), res.chains[c],
                  json{{"mode_group", res.modes.group[c]}, {"main_mode", main}, {"data", data_csv}});
    chains.push_back({{"dir", name},
                      {"seed", res.chains[c].seed},
                      {"stream", config.stream_for_chain(c)},
                      {"terminal_mean_log_post", res.modes.terminal_mean[c]},
                      {"mode_group", res.modes.group[c]},
                      {"main_mode", main}});
  }
  json manifest{{"kind", "fit"},
                {"data", data_csv},
                {"n", data.n()},
                {"p", data.p()},
                {"config", to_json(config)},
                {"chains", chains},
                {"minor_mode_chains", one_based(arma::uvec(std::vector<arma::uword>(
                                          res.modes.minor_chains.begin(), res.modes.minor_chains.end())))}};
  write_json_file((root / "manifest.json").string(), manifest);
  return manifest;
}

PostprocessSummary postprocess_archives(const std::vector<const DrawArchive*>& archives,
                                        const Dataset& data, double level) {
  PostprocessSummary s;
  for (const DrawArchive* ar : archives)
    if (ar->n != data.n() || ar->p != data.p())
      throw_invalid("postprocess: archive dimensions do not match the dataset");
  s.k_plus_posterior = k_plus_posterior(archives);
  s.modal_k_plus = modal_k_plus(s.k_plus_posterior);
  std::vector<Draw> pooled;
  for (const DrawArchive* ar : archives)
    for (const Draw& d : ar->draws)
      if (d.info.k_plus == s.modal_k_plus) pooled.push_back(d);
  s.relabeled = ecr_relabel(pooled, s.modal_k_plus);
  s.draws_used = s.relabeled.draws.size();
  s.clustering = single_best_clustering(s.relabeled);
  s.selection = select_variables(s.relabeled, level);
  if (!data.labels.empty()) {
    s.has_ari = true;
    s.ari = adjusted_rand_index(data.labels, std::vector<int>(s.clustering.begin(), s.clustering.end()));
  }
  return s;
}

json postprocess_to_dir(const std::vector<std::string>& inputs, const std::string& data_csv,
                        double level, const std::string& out_dir) {
  const Dataset data = read_dataset_csv(data_csv);
  const std::vector<DrawArchive> archives = load_archives(inputs, true);
  std::vector<const DrawArchive*> ptrs;
  for (const auto& a : archives) ptrs.push_back(&a);
  const PostprocessSummary s = postprocess_archives(ptrs, data, level);
  const fs::path root(out_dir);
  ensure_dir(root);

  json kpost = json::object();
  for (const auto& [k, pr] : s.k_plus_posterior) kpost[std::to_string(k)] = pr;
  const auto& sel = s.selection;
  json regions = json::array();
  std::string regions_csv = "cluster,variable,lower,upper,significant\n";
  for (arma::uword k = 0; k < sel.lower.n_rows; ++k)
    for (arma::uword j = 0; j < sel.lower.n_cols; ++j) {
      regions.push_back({{"cluster", k + 1},
                         {"variable", j + 1},
                         {"lower", sel.lower(k, j)},
                         {"upper", sel.upper(k, j)},
                         {"significant", sel.xi_k(k, j) == 1}});
      regions_csv += std::to_string(k + 1) + ',' + std::to_string(j + 1) + ',' + fmt(sel.lower(k, j)) + ',' +
                     fmt(sel.upper(k, j)) + ',' + std::to_string(sel.xi_k(k, j)) + '\n';
    }
  json sk = json::array();
  for (const auto& v : sel.S_k) sk.push_back(one_based(v));
  std::vector<std::vector<std::uint64_t>> xi_k;
  for (arma::uword k = 0; k < sel.xi_k.n_rows; ++k)
    xi_k.push_back(arma::conv_to<std::vector<std::uint64_t>>::from(arma::urowvec(sel.xi_k.row(k))));

  std::vector<std::size_t> chains;
  for (const auto& a : archives) chains.push_back(a.chain + 1);
  json summary{{"k_plus_posterior", kpost},
               {"modal_k_plus", s.modal_k_plus},
               {"chains", chains},
               {"draws_total", [&] {
                  std::size_t t = 0;
                  for (const auto& a : archives) t += a.draws.size();
                  return t;
                }()},
               {"draws_relabeled", s.draws_used},
               {"clustering", one_based(s.clustering)},
               {"selection",
                {{"level", level},
                 {"xi", arma::conv_to<std::vector<std::uint64_t>>::from(sel.xi)},
                 {"S", one_based(sel.S)},
                 {"xi_k", xi_k},
                 {"S_k", sk},
                 {"regions", regions}}}};
  if (s.has_ari) {
    summary["ari"] = s.ari;
    std::vector<int> est(s.clustering.n_elem);
    for (arma::uword i = 0; i < est.size(); ++i) est[i] = static_cast<int>(s.clustering[i] + 1);
    const ConfusionMatrix cm = confusion_matrix(data.labels, est);
    std::vector<std::vector<std::uint64_t>> counts;
    for (arma::uword r = 0; r < cm.counts.n_rows; ++r)
      counts.push_back(arma::conv_to<std::vector<std::uint64_t>>::from(arma::urowvec(cm.counts.row(r))));
    summary["confusion"] = {{"truth_labels", cm.row_labels}, {"cluster_labels", cm.col_labels}, {"counts", counts}};
  }
  write_json_file((root / "summary.json").string(), summary);

  std::string clustering = "observation,label\n";
  for (arma::uword i = 0; i < s.clustering.n_elem; ++i)
    clustering += std::to_string(i + 1) + ',' + std::to_string(s.clustering[i] + 1) + '\n';
  write_text(root / "clustering.csv", clustering);
  write_text(root / "regions.csv", regions_csv);

  const RelabeledDraws& rel = s.relabeled;
  std::string kde = "cluster,variable,grid,density\n";
  constexpr arma::uword kGrid = 100;
  for (arma::uword k = 0; k < s.modal_k_plus; ++k)
    for (arma::uword j = 0; j < data.p(); ++j) {
      arma::vec samples(rel.draws.size());
      for (arma::uword m = 0; m < samples.n_elem; ++m) samples[m] = rel.draws[m].comps[k].beta[j];
      const double lo = samples.min(), hi = samples.max();
      const double pad = std::max(0.1 * (hi - lo), 1e-6);
      const arma::vec grid = arma::linspace(lo - pad, hi + pad, kGrid);
      const arma::vec dens = kde_gaussian(samples, grid);
      for (arma::uword g = 0; g < kGrid; ++g)
        kde += std::to_string(k + 1) + ',' + std::to_string(j + 1) + ',' + fmt(grid[g]) + ',' + fmt(dens[g]) + '\n';
    }
  write_text(root / "kde_beta.csv", kde);
  return summary;
}

json criteria_to_file(const std::vector<std::string>& inputs, const std::string& data_csv,
                      const std::string& out_csv) {
  const Dataset data = read_dataset_csv(data_csv);
  const std::vector<DrawArchive> archives = load_archives(inputs, false);
  std::map<arma::uword, std::vector<const DrawArchive*>> runs;
  for (const auto& a : archives) {
    if (a.config.mode != InferenceMode::FixedK)
      throw_invalid("criteria: every run must use fixed_k mode (chain " + std::to_string(a.chain + 1) + " does not)");
    runs[a.config.k].push_back(&a);
  }
  const CriterionReport rep = evaluate_criteria(runs, data);
  write_text(out_csv, criteria_csv(rep));
  json rows = json::array();
  for (const auto& r : rep.rows)
    rows.push_back({{"K", r.K}, {"d", r.d}, {"loglik", r.log_lik}, {"entropy", r.entropy},
                    {"aic", r.aic}, {"bic", r.bic}, {"icl", r.icl}});
  return json{{"rows", rows}, {"selected", {{"aic", rep.best_aic}, {"bic", rep.best_bic}, {"icl", rep.best_icl}}}};
}

json simulate_to_files(const SimSpec& spec, const std::string& data_csv, const std::string& truth_json) {
  const SimResult sim = gen_dataset(spec);
  write_dataset_csv(data_csv, sim.data);
  const json truth = truth_to_json(sim.truth);
  write_json_file(truth_json, truth);
  return truth;
}

ScoreMetrics score(const json& truth, const json& summary) {
  ScoreMetrics m;
  try {
    const double K = truth.at("K").get<double>();
    const double khat = summary.at("modal_k_plus").get<double>();
    m.abs_k_error = std::abs(K - khat);
    const auto a = truth.at("allocations").get<std::vector<int>>();
    const auto b = summary.at("clustering").get<std::vector<int>>();
    m.ari = adjusted_rand_index(a, b);
    const auto xi = truth.at("xi").get<std::vector<int>>();
    const auto xi_hat = summary.at("selection").at("xi").get<std::vector<int>>();
    if (xi.size() != xi_hat.size()) throw_invalid("score: selection vectors differ in length");
    for (std::size_t j = 0; j < xi.size(); ++j) m.hamming += std::abs(xi[j] - xi_hat[j]);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("score: malformed input: ") + e.what());
  }
  return m;
}

json score_files(const std::string& truth_json, const std::string& summary_json, const std::string& out_json) {
  const ScoreMetrics m = score(read_json_file(truth_json), read_json_file(summary_json));
  const json out{{"abs_k_error", m.abs_k_error}, {"ari", m.ari}, {"hamming", m.hamming}};
  write_json_file(out_json, out);
  return out;
}

}  // namespace bgcwm
