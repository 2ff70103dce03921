#include "crypt/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cryptsim {

namespace {

double ks_p_value(double d, double effective_n) {
  const double rn = std::sqrt(effective_n);
  return kolmogorov_q((rn + 0.12 + 0.11 / rn) * d);
}

KsResult finish(double d, std::size_t n1, std::size_t n2, double effective_n) {
  KsResult r;
  r.d = d;
  r.n1 = n1;
  r.n2 = n2;
  r.p_value = ks_p_value(d, effective_n);
  r.reject_1pct = r.p_value < 0.01;
  return r;
}

}  // namespace

double kolmogorov_q(double lambda) {
  if (lambda <= 0.2) return 1.0;
  double sum = 0;
  double sign = 1;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    if (term < 1e-16) break;
    sign = -sign;
  }
  return std::min(1.0, std::max(0.0, 2.0 * sum));
}

KsResult ks_one_sample(std::vector<double> sample,
                       const std::function<double(double)>& cdf,
                       const std::function<double(double)>& cdf_left) {
  if (sample.empty()) throw std::invalid_argument("ks_one_sample: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double hi = (i + 1) / n - cdf(sample[i]);
    const double lo = cdf_left(sample[i]) - i / n;
    d = std::max({d, hi, lo});
  }
  return finish(d, sample.size(), 0, n);
}

KsResult ks_one_sample(std::vector<double> sample, const LimitLaw& law) {
  return ks_one_sample(std::move(sample),
                       [&law](double t) { return limit_cdf(law, t); },
                       [&law](double t) { return limit_cdf_left(law, t); });
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) {
    throw std::invalid_argument("ks_two_sample: empty sample");
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::fabs(i / na - j / nb));
  }
  const double ne = na * nb / (na + nb);
  return finish(d, a.size(), b.size(), ne);
}

std::vector<double> empirical_cdf(std::vector<double> sample,
                                  const std::vector<double>& grid) {
  if (sample.empty()) throw std::invalid_argument("empirical_cdf: empty sample");
  std::sort(sample.begin(), sample.end());
  std::vector<double> out;
  out.reserve(grid.size());
  for (double g : grid) {
    const auto it = std::upper_bound(sample.begin(), sample.end(), g);
    out.push_back(static_cast<double>(it - sample.begin()) / sample.size());
  }
  return out;
}

}  // namespace cryptsim
