#include "bgcwm/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "bgcwm/error.hpp"

namespace bgcwm {

arma::uvec solve_assignment(const arma::mat& cost) {
  const arma::uword n = cost.n_rows;
  if (cost.n_cols != n) throw_invalid("solve_assignment: cost matrix must be square");
  if (!cost.is_finite()) throw_invalid("solve_assignment: non-finite cost");
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<arma::uword> match(n + 1, 0), way(n + 1, 0);
  for (arma::uword i = 1; i <= n; ++i) {
    match[0] = i;
    arma::uword j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const arma::uword i0 = match[j0];
      double delta = inf;
      arma::uword j1 = 0;
      for (arma::uword j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (arma::uword j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const arma::uword j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  arma::uvec out(n);
  for (arma::uword j = 1; j <= n; ++j) out[match[j] - 1] = j - 1;
  return out;
}

arma::umat label_overlap(const arma::uvec& z, const arma::uvec& pivot, arma::uword k) {
  if (z.n_elem != pivot.n_elem) throw_invalid("label_overlap: allocation lengths differ");
  arma::umat n(k, k, arma::fill::zeros);
  for (arma::uword i = 0; i < z.n_elem; ++i)
    if (z[i] < k && pivot[i] < k) ++n(z[i], pivot[i]);
  return n;
}

arma::uword misclassification_cost(const arma::uvec& z, const arma::uvec& pivot,
                                   const arma::uvec& perm) {
  arma::uword cost = 0;
  for (arma::uword i = 0; i < z.n_elem; ++i) {
    const arma::uword label = z[i] < perm.n_elem ? perm[z[i]] : z[i];
    if (label != pivot[i]) ++cost;
  }
  return cost;
}

Draw permute_draw(const Draw& draw, const arma::uvec& perm) {
  Draw out = draw;
  for (arma::uword a = 0; a < perm.n_elem; ++a) {
    out.pi[perm[a]] = draw.pi[a];
    out.comps[perm[a]] = draw.comps[a];
  }
  for (auto& zi : out.z)
    if (zi < perm.n_elem) zi = perm[zi];
  return out;
}

RelabeledDraws ecr_relabel(const std::vector<Draw>& draws, arma::uword k_plus) {
  if (k_plus == 0) throw_invalid("ecr_relabel: k_plus must be positive");
  std::vector<const Draw*> sub;
  for (const Draw& d : draws)
    if (d.info.k_plus == k_plus) sub.push_back(&d);
  if (sub.empty())
    throw_invalid("ecr_relabel: no draws with K+ = " + std::to_string(k_plus));

  const Draw* pivot_draw = sub.front();
  for (const Draw* d : sub)
    if (d->info.log_post > pivot_draw->info.log_post) pivot_draw = d;

  RelabeledDraws out;
  out.k_plus = k_plus;
  out.pivot = pivot_draw->z;
  const double n = static_cast<double>(out.pivot.n_elem);
  for (const Draw* d : sub) {
    const arma::umat overlap = label_overlap(d->z, out.pivot, k_plus);
    const arma::mat cost = n - arma::conv_to<arma::mat>::from(overlap);
    const arma::uvec perm = solve_assignment(cost);
    out.permutations.push_back(perm);
    out.draws.push_back(permute_draw(*d, perm));
  }
  return out;
}

arma::uvec single_best_clustering(const RelabeledDraws& relabeled) {
  if (relabeled.draws.empty()) throw_invalid("single_best_clustering: no draws");
  const arma::uword n = relabeled.draws.front().z.n_elem;
  arma::uword K = 0;
  for (const Draw& d : relabeled.draws) K = std::max<arma::uword>(K, d.comps.size());
  arma::umat votes(n, K, arma::fill::zeros);
  for (const Draw& d : relabeled.draws)
    for (arma::uword i = 0; i < n; ++i) ++votes(i, d.z[i]);
  arma::uvec out(n);
  for (arma::uword i = 0; i < n; ++i) out[i] = votes.row(i).index_max();
  return out;
}

double ari_from_contingency(const arma::mat& table) {
  if (table.n_elem == 0) throw_invalid("ari_from_contingency: empty table");
  if (arma::any(arma::vectorise(table) < 0.0)) throw_invalid("ari_from_contingency: negative count");
  auto c2 = [](double x) { return 0.5 * x * (x - 1.0); };
  const double n = arma::accu(table);
  double index = 0.0;
  for (double v : table) index += c2(v);
  double rows = 0.0;
  for (double v : arma::vec(arma::sum(table, 1))) rows += c2(v);
  double cols = 0.0;
  for (double v : arma::rowvec(arma::sum(table, 0))) cols += c2(v);
  const double expected = n > 1.0 ? rows * cols / c2(n) : 0.0;
  const double max_index = 0.5 * (rows + cols);
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

namespace {

template <typename T>
arma::mat contingency(const std::vector<T>& a, const std::vector<T>& b) {
  if (a.size() != b.size()) throw_invalid("adjusted_rand_index: partitions differ in length");
  if (a.empty()) throw_invalid("adjusted_rand_index: empty partitions");
  std::vector<T> ua(a), ub(b);
  std::sort(ua.begin(), ua.end());
  ua.erase(std::unique(ua.begin(), ua.end()), ua.end());
  std::sort(ub.begin(), ub.end());
  ub.erase(std::unique(ub.begin(), ub.end()), ub.end());
  arma::mat t(ua.size(), ub.size(), arma::fill::zeros);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto r = std::lower_bound(ua.begin(), ua.end(), a[i]) - ua.begin();
    const auto c = std::lower_bound(ub.begin(), ub.end(), b[i]) - ub.begin();
    t(r, c) += 1.0;
  }
  return t;
}

}  // namespace

double adjusted_rand_index(const arma::uvec& a, const arma::uvec& b) {
  return ari_from_contingency(contingency(arma::conv_to<std::vector<arma::uword>>::from(a),
                                          arma::conv_to<std::vector<arma::uword>>::from(b)));
}

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  return ari_from_contingency(contingency(a, b));
}

CredibleRegion simultaneous_credible_region(const arma::mat& draws, double level) {
  if (!(level > 0.0 && level < 1.0)) throw_domain("simultaneous_credible_region: level must lie in (0, 1)");
  const arma::uword M = draws.n_rows;
  const arma::uword p = draws.n_cols;
  const double alpha = 1.0 - level;
  if (static_cast<double>(M) < 10.0 / alpha - 1e-9)
    throw_invalid("simultaneous_credible_region: " + std::to_string(M) +
                  " draws are too few for level " + std::to_string(level) + " (need at least " +
                  std::to_string(static_cast<long>(std::ceil(10.0 / alpha - 1e-9))) + ")");
  if (p == 0) throw_invalid("simultaneous_credible_region: no coordinates");

  arma::mat sorted(M, p);
  arma::uvec depth(M, arma::fill::zeros);
  for (arma::uword j = 0; j < p; ++j) {
    const arma::uvec order = arma::stable_sort_index(draws.col(j));
    for (arma::uword r = 0; r < M; ++r) {
      sorted(r, j) = draws(order[r], j);
      const arma::uword rank = r + 1;
      depth[order[r]] = std::max({depth[order[r]], rank, M + 1 - rank});
    }
  }
  const arma::uword need = static_cast<arma::uword>(std::ceil(level * static_cast<double>(M) - 1e-9));
  const arma::uvec sorted_depth = arma::sort(depth);
  const arma::uword t_star = sorted_depth[need - 1];

  CredibleRegion out;
  out.t = M + 1 - t_star;
  out.lower = sorted.row(M - t_star).t();
  out.upper = sorted.row(t_star - 1).t();
  for (arma::uword i = 0; i < M; ++i) {
    bool inside = true;
    for (arma::uword j = 0; j < p && inside; ++j)
      inside = draws(i, j) >= out.lower[j] && draws(i, j) <= out.upper[j];
    if (inside) ++out.contained;
  }
  return out;
}

arma::uvec combine_selection(const arma::umat& xi_k) {
  arma::uvec out(xi_k.n_cols);
  for (arma::uword j = 0; j < xi_k.n_cols; ++j) {
    double none = 1.0;
    for (arma::uword k = 0; k < xi_k.n_rows; ++k) none *= 1.0 - static_cast<double>(xi_k(k, j));
    out[j] = static_cast<arma::uword>(1.0 - none);
  }
  return out;
}

VariableSelectionResult select_variables(const RelabeledDraws& relabeled, double level) {
  if (relabeled.draws.empty()) throw_invalid("select_variables: no draws");
  const arma::uword K = relabeled.k_plus;
  const arma::uword p = relabeled.draws.front().comps.front().p();
  const arma::uword M = relabeled.draws.size();
  VariableSelectionResult out;
  out.level = level;
  out.lower.set_size(K, p);
  out.upper.set_size(K, p);
  out.xi_k.zeros(K, p);
  for (arma::uword k = 0; k < K; ++k) {
    arma::mat beta(M, p);
    for (arma::uword m = 0; m < M; ++m) beta.row(m) = relabeled.draws[m].comps[k].beta.t();
    const CredibleRegion region = simultaneous_credible_region(beta, level);
    out.lower.row(k) = region.lower.t();
    out.upper.row(k) = region.upper.t();
    for (arma::uword j = 0; j < p; ++j)
      out.xi_k(k, j) = (region.lower[j] > 0.0 || region.upper[j] < 0.0) ? 1 : 0;
    out.S_k.push_back(arma::find(out.xi_k.row(k).t() == 1));
  }
  out.xi = combine_selection(out.xi_k);
  out.S = arma::find(out.xi == 1);
  return out;
}

std::map<arma::uword, double> k_plus_posterior(const std::vector<const DrawArchive*>& archives) {
  std::map<arma::uword, double> out;
  double total = 0.0;
  for (const DrawArchive* ar : archives)
    for (const Draw& d : ar->draws) {
      out[d.info.k_plus] += 1.0;
      total += 1.0;
    }
  if (total == 0.0) throw_invalid("k_plus_posterior: no retained draws");
  for (auto& kv : out) kv.second /= total;
  return out;
}

arma::uword modal_k_plus(const std::map<arma::uword, double>& posterior) {
  if (posterior.empty()) throw_invalid("modal_k_plus: empty posterior");
  arma::uword best = posterior.begin()->first;
  double best_p = -1.0;
  for (const auto& [k, pr] : posterior)
    if (pr > best_p) {
      best = k;
      best_p = pr;
    }
  return best;
}

ConfusionMatrix confusion_matrix(const std::vector<int>& truth, const std::vector<int>& estimate) {
  const arma::mat t = contingency(truth, estimate);
  ConfusionMatrix out;
  out.row_labels = truth;
  std::sort(out.row_labels.begin(), out.row_labels.end());
  out.row_labels.erase(std::unique(out.row_labels.begin(), out.row_labels.end()), out.row_labels.end());
  out.col_labels = estimate;
  std::sort(out.col_labels.begin(), out.col_labels.end());
  out.col_labels.erase(std::unique(out.col_labels.begin(), out.col_labels.end()), out.col_labels.end());
  out.counts = arma::conv_to<arma::umat>::from(t);
  return out;
}

arma::vec kde_gaussian(const arma::vec& samples, const arma::vec& grid) {
  if (samples.n_elem == 0) throw_invalid("kde_gaussian: no samples");
  const double n = static_cast<double>(samples.n_elem);
  double spread = samples.n_elem > 1 ? arma::stddev(samples) : 0.0;
  if (samples.n_elem > 3) {
    const arma::vec q = arma::quantile(samples, arma::vec{0.25, 0.75});
    const double iqr = (q[1] - q[0]) / 1.34;
    if (iqr > 0.0) spread = std::min(spread, iqr);
  }
  double h = 0.9 * spread * std::pow(n, -0.2);
  if (!(h > 0.0)) h = 1e-3 * std::max(1.0, std::abs(arma::mean(samples)));
  arma::vec out(grid.n_elem);
  const double norm = 1.0 / (n * h * std::sqrt(2.0 * arma::datum::pi));
  for (arma::uword g = 0; g < grid.n_elem; ++g)
    out[g] = norm * arma::accu(arma::exp(-0.5 * arma::square((grid[g] - samples) / h)));
  return out;
}

}  // namespace bgcwm
