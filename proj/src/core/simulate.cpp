#include "bgcwm/simulate.hpp"

#include <cmath>
#include <set>

#include "bgcwm/error.hpp"

namespace bgcwm {

using nlohmann::json;

void SimSpec::validate() const {
  if (K < 1 || K > 4) throw Error(ErrorKind::Config, "simulate: K must lie in 1..4");
  if (p < 1) throw Error(ErrorKind::Config, "simulate: p must be positive");
  if (n < 1) throw Error(ErrorKind::Config, "simulate: n must be positive");
  if (scenario < 1 || scenario > 4) throw Error(ErrorKind::Config, "simulate: scenario must lie in 1..4");
  if (!(p0 >= 0.0 && p0 <= 1.0)) throw Error(ErrorKind::Config, "simulate: p0 must lie in [0, 1]");
  if (scenario == 2 && p > 20)
    throw Error(ErrorKind::Config, "simulate: scenario 2 uses 20 Wishart degrees of freedom and needs p <= 20");
}

SimSpec sim_spec_from_json(const json& j) {
  static const std::set<std::string> known{"K", "p", "n", "scenario", "p0", "seed"};
  if (!j.is_object()) throw Error(ErrorKind::Config, "simulation spec must be a JSON object");
  for (const auto& item : j.items())
    if (!known.count(item.key()))
      throw Error(ErrorKind::Config, "unknown simulation key '" + item.key() + "'");
  SimSpec s;
  try {
    if (j.contains("K")) s.K = j.at("K").get<arma::uword>();
    if (j.contains("p")) s.p = j.at("p").get<arma::uword>();
    if (j.contains("n")) s.n = j.at("n").get<arma::uword>();
    if (j.contains("scenario")) s.scenario = j.at("scenario").get<int>();
    if (j.contains("p0")) s.p0 = j.at("p0").get<double>();
    if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, std::string("invalid simulation spec: ") + e.what());
  }
  s.validate();
  return s;
}

json to_json(const SimSpec& s) {
  return json{{"K", s.K}, {"p", s.p}, {"n", s.n}, {"scenario", s.scenario}, {"p0", s.p0}, {"seed", s.seed}};
}

arma::vec sim_weights(arma::uword K) {
  arma::vec w = arma::regspace<arma::vec>(1, K);
  return w / arma::accu(w);
}

double scenario_mean(arma::uword k, arma::uword j, arma::uword p) {
  const double phase = static_cast<double>(j - 1) * static_cast<double>(k) * arma::datum::pi /
                       static_cast<double>(p);
  switch (k) {
    case 1:
      return 0.0;
    case 2:
      return 2.0 * std::sin(phase);
    case 3:
      return 2.0 * std::cos(phase);
    case 4:
      return 4.0 * std::sin(phase) * std::sin(phase) - 4.0 * std::cos(phase) * std::cos(phase);
    default:
      throw_invalid("scenario_mean: profile must lie in 1..4");
  }
}

arma::mat toeplitz_scale(arma::uword p) {
  arma::mat V(p, p);
  for (arma::uword i = 0; i < p; ++i)
    for (arma::uword j = 0; j < p; ++j)
      V(i, j) = (static_cast<double>(p) - std::abs(static_cast<double>(i) - static_cast<double>(j))) /
                static_cast<double>(p);
  return V;
}

RegressionTruth gen_regression_params(const SimSpec& spec, RngStream& rng) {
  RegressionTruth t;
  t.alpha.set_size(spec.K);
  t.beta.zeros(spec.K, spec.p);
  t.sigma2.set_size(spec.K);
  for (arma::uword k = 0; k < spec.K; ++k) {
    t.alpha[k] = sample_normal(rng, 0.0, 10.0);
    for (arma::uword j = 0; j < spec.p; ++j) {
      const bool zero = rng.uniform() < spec.p0;
      const double v = sample_normal(rng, 0.0, 3.0);
      t.beta(k, j) = zero ? 0.0 : v;
    }
    t.sigma2[k] = sample_exponential(rng, 1.0);
  }
  return t;
}

namespace {

bool is_pd(const arma::mat& m) {
  arma::mat L;
  return m.is_finite() && arma::chol(L, arma::symmatu(m));
}

}  // namespace

CovariateTruth gen_covariates(const SimSpec& spec, RngStream& rng) {
  spec.validate();
  const arma::uword K = spec.K;
  const arma::uword p = spec.p;
  CovariateTruth t;
  t.pi = sim_weights(K);
  t.mu.zeros(K, p);
  t.rho = arma::regspace<arma::uvec>(0, K - 1);

  if (spec.scenario >= 3) {
    for (arma::uword i = K - 1; i > 0; --i) {
      const arma::uword j = static_cast<arma::uword>(rng.uniform() * (i + 1)) % (i + 1);
      std::swap(t.rho[i], t.rho[j]);
    }
    for (arma::uword k = 0; k < K; ++k)
      for (arma::uword j = 0; j < p; ++j) t.mu(k, j) = scenario_mean(t.rho[k] + 1, j + 1, p);
  }

  switch (spec.scenario) {
    case 1:
    case 3:
      t.sigma.assign(K, arma::eye(p, p));
      break;
    case 2: {
      const arma::mat V = toeplitz_scale(p);
      arma::mat S;
      bool ok = false;
      for (int attempt = 0; attempt < 10 && !ok; ++attempt) {
        S = sample_wishart(rng, V, 20.0);
        S = 0.5 * (S + S.t());
        ok = is_pd(S);
      }
      if (!ok) throw Error(ErrorKind::Numerical, "simulate: Wishart draw not positive definite after 10 attempts");
      t.sigma.assign(K, S);
      break;
    }
    case 4:
      for (arma::uword k = 0; k < K; ++k) {
        arma::mat L(p, 2);
        for (auto& v : L) v = rng.normal();
        arma::vec psi(p);
        for (auto& v : psi) v = sample_uniform(rng, 0.2, 1.0);
        t.sigma.push_back(L * L.t() + arma::diagmat(psi));
      }
      break;
  }

  t.z.set_size(spec.n);
  for (auto& zi : t.z) zi = sample_multinomial_index(rng, t.pi);
  t.X.set_size(spec.n, p);
  for (arma::uword i = 0; i < spec.n; ++i)
    t.X.row(i) = sample_mvnormal(rng, t.mu.row(t.z[i]).t(), t.sigma[t.z[i]]).t();
  return t;
}

SimResult gen_dataset(const SimSpec& spec) {
  spec.validate();
  RngStream root(spec.seed, 0x51);
  RngStream reg_rng = root.derive(1);
  RngStream cov_rng = root.derive(2);
  RngStream y_rng = root.derive(3);

  SimResult out;
  out.truth.spec = spec;
  out.truth.reg = gen_regression_params(spec, reg_rng);
  out.truth.cov = gen_covariates(spec, cov_rng);
  const auto& reg = out.truth.reg;
  const auto& cov = out.truth.cov;

  out.data.X = cov.X;
  out.data.y.set_size(spec.n);
  out.data.labels.resize(spec.n);
  for (arma::uword i = 0; i < spec.n; ++i) {
    const arma::uword k = cov.z[i];
    const double mean = reg.alpha[k] + arma::dot(cov.X.row(i), reg.beta.row(k));
    out.data.y[i] = sample_normal(y_rng, mean, std::sqrt(reg.sigma2[k]));
    out.data.labels[i] = static_cast<int>(k + 1);
  }
  out.truth.xi.set_size(spec.p);
  for (arma::uword j = 0; j < spec.p; ++j) out.truth.xi[j] = arma::any(reg.beta.col(j) != 0.0) ? 1 : 0;
  return out;
}

json truth_to_json(const GroundTruth& t) {
  auto rows = [](const arma::mat& m) {
    std::vector<std::vector<double>> out;
    for (arma::uword i = 0; i < m.n_rows; ++i) out.push_back(arma::conv_to<std::vector<double>>::from(m.row(i)));
    return out;
  };
  json sigma = json::array();
  for (const auto& s : t.cov.sigma) sigma.push_back(rows(s));
  std::vector<arma::uword> z(t.cov.z.begin(), t.cov.z.end());
  for (auto& v : z) ++v;
  std::vector<arma::uword> rho(t.cov.rho.begin(), t.cov.rho.end());
  for (auto& v : rho) ++v;
  return json{{"spec", to_json(t.spec)},
              {"K", t.spec.K},
              {"pi", arma::conv_to<std::vector<double>>::from(t.cov.pi)},
              {"rho", rho},
              {"alpha", arma::conv_to<std::vector<double>>::from(t.reg.alpha)},
              {"beta", rows(t.reg.beta)},
              {"sigma2", arma::conv_to<std::vector<double>>::from(t.reg.sigma2)},
              {"mu", rows(t.cov.mu)},
              {"Sigma", sigma},
              {"allocations", z},
              {"xi", std::vector<arma::uword>(t.xi.begin(), t.xi.end())}};
}

}  // namespace bgcwm
