#ifndef BGCWM_POSTPROCESS_HPP
#define BGCWM_POSTPROCESS_HPP

#include <map>
#include <vector>

#include <armadillo>

#include "bgcwm/runner.hpp"

namespace bgcwm {

// Minimum-cost perfect assignment of rows to columns of a square matrix
// (Hungarian method). out[row] = column.
arma::uvec solve_assignment(const arma::mat& cost);

// N(a, b) = #{i : z_i = a, pivot_i = b} restricted to labels < k.
arma::umat label_overlap(const arma::uvec& z, const arma::uvec& pivot, arma::uword k);

// Number of observations whose relabeled draw label differs from the pivot.
arma::uword misclassification_cost(const arma::uvec& z, const arma::uvec& pivot,
                                   const arma::uvec& perm);

struct RelabeledDraws {
  arma::uword k_plus = 0;
  arma::uvec pivot;
  std::vector<arma::uvec> permutations;  // permutations[d][old label] = new label
  std::vector<Draw> draws;               // aligned copies
};

// Applies perm (defined on labels < perm.n_elem; other labels are kept) to z,
// pi and the component list of a draw.
Draw permute_draw(const Draw& draw, const arma::uvec& perm);

// ECR relabeling of the draws with K+ = k_plus. The pivot is the allocation
// of the draw with the largest log-posterior among them.
RelabeledDraws ecr_relabel(const std::vector<Draw>& draws, arma::uword k_plus);

// Per-observation modal aligned label (ties go to the smaller label).
arma::uvec single_best_clustering(const RelabeledDraws& relabeled);

double ari_from_contingency(const arma::mat& table);

double adjusted_rand_index(const arma::uvec& a, const arma::uvec& b);
double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b);

struct CredibleRegion {
  arma::vec lower;
  arma::vec upper;
  arma::uword contained = 0;  // complete draws inside the region
  arma::uword t = 0;          // rank depth: bounds are the t-th order statistics from each end
};

// Rank-based simultaneous band over the rows of `draws` (M x p) holding at
// least ceil(level * M) complete draws.
CredibleRegion simultaneous_credible_region(const arma::mat& draws, double level);

struct VariableSelectionResult {
  double level = 0.9;
  arma::mat lower;  // K+ x p
  arma::mat upper;
  arma::umat xi_k;  // 1 when the interval excludes zero
  arma::uvec xi;
  std::vector<arma::uvec> S_k;  // 0-based selected variables per cluster
  arma::uvec S;
};

// xi_j = 1 - prod_k (1 - xi_kj).
arma::uvec combine_selection(const arma::umat& xi_k);

VariableSelectionResult select_variables(const RelabeledDraws& relabeled, double level);

// Relative frequency of K+ over all retained draws.
std::map<arma::uword, double> k_plus_posterior(const std::vector<const DrawArchive*>& archives);

// Most probable K+; ties go to the smaller value.
arma::uword modal_k_plus(const std::map<arma::uword, double>& posterior);

struct ConfusionMatrix {
  std::vector<int> row_labels;  // truth
  std::vector<int> col_labels;  // estimate
  arma::umat counts;
};

ConfusionMatrix confusion_matrix(const std::vector<int>& truth, const std::vector<int>& estimate);

// Gaussian kernel density estimate with Silverman's bandwidth.
arma::vec kde_gaussian(const arma::vec& samples, const arma::vec& grid);

}  // namespace bgcwm

#endif  // BGCWM_POSTPROCESS_HPP
