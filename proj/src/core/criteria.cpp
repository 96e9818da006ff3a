#include "bgcwm/criteria.hpp"

#include <cmath>
#include <cstdio>

#include "bgcwm/allocation.hpp"
#include "bgcwm/error.hpp"

namespace bgcwm {

double free_parameters(arma::uword K, arma::uword p) {
  const double kd = static_cast<double>(K);
  const double pd = static_cast<double>(p);
  return kd * (1.0 + pd + 1.0 + pd + 0.5 * pd * (pd + 1.0)) + (kd - 1.0);
}

double allocation_entropy(const arma::mat& probs) {
  double h = 0.0;
  for (double v : probs)
    if (v > 0.0) h -= v * std::log(v);
  return h;
}

CriterionReport evaluate_criteria(const std::map<arma::uword, std::vector<const DrawArchive*>>& runs,
                                  const Dataset& data) {
  if (runs.empty()) throw_invalid("evaluate_criteria: no runs supplied");
  std::string gaps;
  for (arma::uword K = runs.begin()->first; K <= runs.rbegin()->first; ++K)
    if (!runs.count(K)) gaps += (gaps.empty() ? "" : ", ") + std::to_string(K);
  if (!gaps.empty()) throw_invalid("evaluate_criteria: missing K in the sweep range: " + gaps);

  const double n = static_cast<double>(data.n());
  CriterionReport rep;
  for (const auto& [K, archives] : runs) {
    const Draw* best = nullptr;
    for (const DrawArchive* ar : archives) {
      if (ar->config.mode != InferenceMode::FixedK || ar->config.k != K)
        throw_invalid("evaluate_criteria: run for K=" + std::to_string(K) + " is not a fixed_k run with that K");
      if (ar->n != data.n() || ar->p != data.p())
        throw_invalid("evaluate_criteria: archive dimensions do not match the dataset");
      for (const Draw& d : ar->draws)
        if (!best || d.info.log_lik > best->info.log_lik) best = &d;
    }
    if (!best) throw_invalid("evaluate_criteria: no retained draws for K=" + std::to_string(K));

    MixtureState s;
    s.z = best->z;
    s.pi = best->pi;
    s.comps = best->comps;
    CriterionRow row;
    row.K = K;
    row.d = free_parameters(K, data.p());
    row.log_lik = observed_log_lik(data, s);
    row.entropy = allocation_entropy(allocation_probs(data, s));
    row.aic = -2.0 * row.log_lik + 2.0 * row.d;
    row.bic = -2.0 * row.log_lik + row.d * std::log(n);
    row.icl = row.bic + 2.0 * row.entropy;
    rep.rows.push_back(row);
  }
  auto argmin = [&](auto field) {
    const CriterionRow* b = &rep.rows.front();
    for (const auto& r : rep.rows)
      if (r.*field < b->*field) b = &r;
    return b->K;
  };
  rep.best_aic = argmin(&CriterionRow::aic);
  rep.best_bic = argmin(&CriterionRow::bic);
  rep.best_icl = argmin(&CriterionRow::icl);
  return rep;
}

std::string criteria_csv(const CriterionReport& report) {
  std::string out = "K,d,loglik,aic,bic,icl\n";
  char buf[256];
  for (const auto& r : report.rows) {
    std::snprintf(buf, sizeof buf, "%llu,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  static_cast<unsigned long long>(r.K), r.d, r.log_lik, r.aic, r.bic, r.icl);
    out += buf;
  }
  return out;
}

}  // namespace bgcwm
