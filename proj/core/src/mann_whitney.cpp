#include "dcakdd/mann_whitney.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dcakdd/errors.hpp"

namespace dcakdd {

namespace {

constexpr std::size_t kExactLimit = 10;

struct Ranking {
  double rank_sum_x = 0.0;
  double tie_term = 0.0;
  bool ties = false;
};

Ranking rank(std::span<const double> x, std::span<const double> y) {
  struct Item {
    double value;
    bool from_x;
  };
  std::vector<Item> all;
  all.reserve(x.size() + y.size());
  for (double v : x) all.push_back({v, true});
  for (double v : y) all.push_back({v, false});
  std::sort(all.begin(), all.end(), [](const Item& a, const Item& b) { return a.value < b.value; });

  Ranking r;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i + 1;
    while (j < all.size() && all[j].value == all[i].value) ++j;
    const double tied = static_cast<double>(j - i);
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (all[k].from_x) r.rank_sum_x += midrank;
    }
    if (j - i > 1) {
      r.ties = true;
      r.tie_term += tied * tied * tied - tied;
    }
    i = j;
  }
  return r;
}

}  // namespace

std::vector<long double> mann_whitney_u_counts(std::size_t n_x, std::size_t n_y) {
  // Coefficients of the Gaussian binomial [n_x + n_y choose m]_q, built as
  // prod_{i=1..m} (1 - q^(n+i)) / (1 - q^i) with m the smaller size.
  const std::size_t m = std::min(n_x, n_y);
  const std::size_t n = std::max(n_x, n_y);
  std::vector<long double> poly(m * n + 1, 0.0L);
  poly[0] = 1.0L;
  std::size_t degree = 0;
  for (std::size_t i = 1; i <= m; ++i) {
    // The quotient has degree i*n, so only product terms up to it matter.
    const std::size_t shift = n + i;
    degree += n;
    for (std::size_t k = degree + 1; k-- > shift;) poly[k] -= poly[k - shift];
    for (std::size_t k = i; k <= degree; ++k) poly[k] += poly[k - i];
  }
  return poly;
}

double mann_whitney_exact_p(double u, std::size_t n_x, std::size_t n_y) {
  const auto counts = mann_whitney_u_counts(n_x, n_y);
  const double mean = static_cast<double>(n_x * n_y) / 2.0;
  const double lower = std::min(u, 2.0 * mean - u);
  long double tail = 0.0L;
  long double total = 0.0L;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    total += counts[k];
    if (static_cast<double>(k) <= lower + 1e-9) tail += counts[k];
  }
  return static_cast<double>(std::min(1.0L, 2.0L * tail / total));
}

double mann_whitney_normal_p(double u, std::size_t n_x, std::size_t n_y, double tie_term) {
  const double nx = static_cast<double>(n_x);
  const double ny = static_cast<double>(n_y);
  const double total = nx + ny;
  const double mean = nx * ny / 2.0;
  double variance = nx * ny / 12.0 * (total + 1.0);
  if (total > 1.0) variance -= nx * ny / 12.0 * tie_term / (total * (total - 1.0));
  if (!(variance > 0.0)) return 1.0;
  const double z = std::max(0.0, std::abs(u - mean) - 0.5) / std::sqrt(variance);
  return std::min(1.0, std::erfc(z / std::sqrt(2.0)));
}

MannWhitneyResult mann_whitney_two_sided(std::span<const double> x, std::span<const double> y,
                                         double alpha) {
  if (x.empty() || y.empty()) throw DomainError("Mann-Whitney test needs two non-empty samples");

  const auto ranking = rank(x, y);
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());

  MannWhitneyResult result;
  result.u_x = ranking.rank_sum_x - nx * (nx + 1.0) / 2.0;
  result.u_y = nx * ny - result.u_x;
  result.u = std::min(result.u_x, result.u_y);
  result.exact = !ranking.ties && std::min(x.size(), y.size()) <= kExactLimit;
  result.p_value = result.exact
                       ? mann_whitney_exact_p(result.u, x.size(), y.size())
                       : mann_whitney_normal_p(result.u, x.size(), y.size(), ranking.tie_term);
  result.reject = result.p_value < alpha;
  return result;
}

}  // namespace dcakdd
