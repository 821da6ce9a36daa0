#pragma once

#include <cstddef>
#include <span>
#include <string_view>

namespace rcrank {

inline constexpr std::string_view kPairedTestName = "two-tailed paired t-test";

struct PairedTestResult {
  std::size_t n = 0;
  double mean_difference = 0.0;
  double t_statistic = 0.0;
  double p_value = 1.0;
};

/// Paired t-test on a[i] - b[i]. All-zero differences give p = 1; zero
/// variance with a non-zero mean gives p = 0. Requires n >= 2.
PairedTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

inline double paired_significance(std::span<const double> a, std::span<const double> b) {
  return paired_t_test(a, b).p_value;
}

}  // namespace rcrank
