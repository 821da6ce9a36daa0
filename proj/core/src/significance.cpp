#include "rcrank/significance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/distributions/students_t.hpp>

#include "rcrank/error.hpp"

namespace rcrank {

PairedTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error("paired test needs equal-length samples (" + std::to_string(a.size()) + " vs " +
                std::to_string(b.size()) + ")");
  }
  if (a.size() < 2) throw Error("paired test needs at least 2 pairs");

  PairedTestResult result;
  result.n = a.size();
  const double n = static_cast<double>(a.size());

  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] - b[i];
  const double mean = sum / n;
  double ss = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = (a[i] - b[i]) - mean;
    ss += d * d;
  }
  result.mean_difference = mean;

  if (ss == 0.0) {
    if (mean == 0.0) return result;
    result.t_statistic = std::copysign(std::numeric_limits<double>::infinity(), mean);
    result.p_value = 0.0;
    return result;
  }

  const double standard_error = std::sqrt(ss / (n - 1.0) / n);
  result.t_statistic = mean / standard_error;
  const boost::math::students_t distribution(n - 1.0);
  const double tail = boost::math::cdf(boost::math::complement(distribution, std::abs(result.t_statistic)));
  result.p_value = std::clamp(2.0 * tail, 0.0, 1.0);
  return result;
}

}  // namespace rcrank
