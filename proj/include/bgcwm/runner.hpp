#ifndef BGCWM_RUNNER_HPP
#define BGCWM_RUNNER_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "bgcwm/config.hpp"
#include "bgcwm/error.hpp"
#include "bgcwm/lasso_regression.hpp"
#include "bgcwm/model.hpp"
#include "bgcwm/rngdist.hpp"

namespace bgcwm {

struct TraceRow {
  std::size_t iteration = 0;
  arma::uword K = 0;
  arma::uword k_plus = 0;
  double gamma = 0.0;
  double log_lik = 0.0;
  double log_post = 0.0;
};

// One retained state. z holds 0-based labels; components 0..k_plus-1 are the
// occupied ones.
struct Draw {
  TraceRow info;
  arma::vec pi;
  arma::uvec z;
  std::vector<ComponentParams> comps;
};

struct DrawArchive {
  RunConfig config;
  std::size_t chain = 0;
  std::uint64_t seed = 0;
  arma::uword n = 0;
  arma::uword p = 0;
  std::vector<TraceRow> trace;
  std::vector<Draw> draws;
  std::vector<std::string> warnings;
  double wall_seconds = 0.0;
  GibbsDiagnostics diag;
  std::size_t gamma_accepts = 0;
  std::size_t k_cap_hits = 0;
};

// Thrown when a chain cannot continue; carries the state of the failing sweep.
class ChainAbort : public Error {
 public:
  ChainAbort(const Error& cause, std::size_t sweep, MixtureState state)
      : Error(cause.kind(), "chain aborted at sweep " + std::to_string(sweep) + ": " + cause.what()),
        sweep_(sweep),
        state_(std::move(state)) {}
  std::size_t sweep() const noexcept { return sweep_; }
  const MixtureState& state() const noexcept { return state_; }

 private:
  std::size_t sweep_;
  MixtureState state_;
};

// Per-role child streams of one chain stream.
struct ChainStreams {
  RngStream init;
  RngStream alloc;
  RngStream comp;
  RngStream weights;
  RngStream k;
  RngStream gamma;
  RngStream spawn;
  explicit ChainStreams(const RngStream& chain);
};

struct SweepInfo {
  bool k_changed = false;
  bool k_cap_hit = false;
  bool gamma_accepted = false;
};

// Number of components the chain is held at (fixed_k, overfitting) or 0.
arma::uword fixed_component_count(const RunConfig& config);

// One pass: z, relabel, component blocks, pi, then K and gamma in telescoping
// mode. pi is redrawn at the end when K changed.
SweepInfo gibbs_sweep(const Dataset& data, MixtureState& state, const RunConfig& config,
                      ChainStreams& rng, GibbsDiagnostics& diag);

// Point estimates from a hard partition (labels 0..K-1); clusters with fewer
// than p + 2 members use pooled estimates.
MixtureState state_from_partition(const Dataset& data, const arma::uvec& labels, arma::uword K,
                                  const Hyperparams& hyper, double gamma);

// k-means++ followed by Lloyd iterations on the rows of `points`.
arma::uvec kmeans(const arma::mat& points, arma::uword K, RngStream& rng,
                  std::size_t max_iter = 100);

MixtureState initialize(const Dataset& data, const RunConfig& config, ChainStreams& rng,
                        GibbsDiagnostics& diag);

DrawArchive run_chain(const Dataset& data, const RunConfig& config, std::size_t chain);

struct ModeReport {
  std::vector<double> terminal_mean;  // per chain
  std::vector<int> group;             // 0 is the group holding the best chain
  std::vector<std::size_t> main_chains;
  std::vector<std::size_t> minor_chains;
};

// Single-linkage grouping of chains by the mean log-posterior of their last
// `window` retained draws; consecutive sorted means further apart than `gap`
// start a new group.
ModeReport screen_modes(const std::vector<std::vector<double>>& log_post, std::size_t window,
                        double gap);

struct MultiChainResult {
  std::vector<DrawArchive> chains;
  ModeReport modes;
};

MultiChainResult run_multichain(const Dataset& data, const RunConfig& config);

}  // namespace bgcwm

#endif  // BGCWM_RUNNER_HPP
