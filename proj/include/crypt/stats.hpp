#pragma once

#include <functional>
#include <vector>

#include "crypt/laws.hpp"

namespace cryptsim {

// Kolmogorov-Smirnov machinery. The one-sample statistic is computed against
// a cdf/left-limit pair so distributions with atoms are handled exactly; the
// asymptotic p-value is then conservative for atoms.
struct KsResult {
  double d = 0;        // KS statistic
  std::size_t n1 = 0;  // sample size (first sample)
  std::size_t n2 = 0;  // second sample size, 0 for one-sample tests
  double p_value = 1;
  bool reject_1pct = false;
};

// Kolmogorov distribution tail Q(lambda) = P(K > lambda).
double kolmogorov_q(double lambda);

KsResult ks_one_sample(std::vector<double> sample,
                       const std::function<double(double)>& cdf,
                       const std::function<double(double)>& cdf_left);
KsResult ks_one_sample(std::vector<double> sample, const LimitLaw& law);

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

// Empirical cdf of `sample` evaluated at each grid point (right-continuous).
std::vector<double> empirical_cdf(std::vector<double> sample,
                                  const std::vector<double>& grid);

}  // namespace cryptsim
