#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dcakdd {

struct MannWhitneyResult {
  double u_x = 0.0;  // pairs (x_i, y_j) with x_i > y_j, ties counting 1/2
  double u_y = 0.0;  // u_x + u_y = n_x * n_y
  double u = 0.0;    // min(u_x, u_y)
  double p_value = 1.0;
  bool exact = false;
  bool reject = false;
};

// Two-sided Mann-Whitney U test.
//
// Ranks use midranks for ties. The p value is exact when the smaller sample
// has at most 10 values and there are no ties; otherwise it comes from the
// normal approximation with tie-corrected variance and a 0.5 continuity
// correction. The null hypothesis is rejected when p < alpha. Throws
// DomainError when either sample is empty.
MannWhitneyResult mann_whitney_two_sided(std::span<const double> x, std::span<const double> y,
                                         double alpha = 0.05);

// Number of orderings of n_x + n_y distinct values that give each U in
// [0, n_x * n_y]. The entries sum to C(n_x + n_y, n_x).
std::vector<long double> mann_whitney_u_counts(std::size_t n_x, std::size_t n_y);

// Exact two-sided p value for an integral U without ties.
double mann_whitney_exact_p(double u, std::size_t n_x, std::size_t n_y);

// Normal-approximation p value. tie_term is sum(t^3 - t) over tie groups.
double mann_whitney_normal_p(double u, std::size_t n_x, std::size_t n_y, double tie_term = 0.0);

}  // namespace dcakdd
