#ifndef BGCWM_CRITERIA_HPP
#define BGCWM_CRITERIA_HPP

#include <map>
#include <string>
#include <vector>

#include "bgcwm/runner.hpp"

namespace bgcwm {

// Free parameters of a K-component model with p covariates.
double free_parameters(arma::uword K, arma::uword p);

// Shannon entropy of every row of a probability matrix, summed.
double allocation_entropy(const arma::mat& probs);

struct CriterionRow {
  arma::uword K = 0;
  double d = 0.0;
  double log_lik = 0.0;
  double entropy = 0.0;
  double aic = 0.0;
  double bic = 0.0;
  double icl = 0.0;
};

struct CriterionReport {
  std::vector<CriterionRow> rows;  // ascending K
  arma::uword best_aic = 0;
  arma::uword best_bic = 0;
  arma::uword best_icl = 0;
};

// Plug-in criteria at the largest-likelihood retained draw of each fixed-K
// run. Several archives may share a K (chains); they are pooled. The K values
// must form a contiguous range.
CriterionReport evaluate_criteria(const std::map<arma::uword, std::vector<const DrawArchive*>>& runs,
                                  const Dataset& data);

std::string criteria_csv(const CriterionReport& report);

}  // namespace bgcwm

#endif  // BGCWM_CRITERIA_HPP
