#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace fplab::stats {

// Streaming mean/variance accumulator (Welford form). merge() combines two
// accumulators exactly as if the right-hand samples were appended, so a
// chunked computation reproduces the serial one as long as chunks are merged
// in a fixed order.
struct Accumulator {
  std::size_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x);
  void merge(const Accumulator& o);
  double variance_sample() const;  // unbiased (n-1); 0 for count < 2
  double standard_error() const;   // sqrt(variance_sample / count)
};

// Counts per half-open bin [edges[i], edges[i+1]); values outside the edge
// range are not counted. edges must be strictly increasing.
std::vector<std::size_t> histogram_counts(const std::vector<double>& xs,
                                          const std::vector<double>& edges);

struct ChiSquareResult {
  double statistic = 0.0;
  std::size_t dof = 0;
  double p_value = 1.0;
};

// Pearson chi-square against expected counts (same length as observed,
// all > 0); dof = bins - 1 - dof_adjust. p_value is the upper tail.
ChiSquareResult chi_square_gof(const std::vector<std::size_t>& observed,
                               const std::vector<double>& expected,
                               std::size_t dof_adjust = 0);

struct KsResult {
  double statistic = 0.0;
  double critical = 0.0;  // asymptotic critical value at the significance used
  std::size_t n = 0;
  bool reject = false;
};

// One-sample Kolmogorov-Smirnov against a continuous CDF; asymptotic critical
// value sqrt(-log(significance/2)/2) / sqrt(n).
KsResult ks_test(std::vector<double> sample, const std::function<double(double)>& cdf,
                 double significance);

// log(sum exp(xs)), stable; -infinity for an empty list or all -infinity.
double logsumexp(const std::vector<double>& xs);

// Linear-interpolation quantile of an ascending-sorted vector at level
// q in [0, 1].
double quantile_sorted(const std::vector<double>& sorted, double q);

}  // namespace fplab::stats
