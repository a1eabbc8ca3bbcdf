#include "fplab/stats.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fplab::stats {

void Accumulator::add(double x) {
  ++count;
  const double delta = x - mean;
  mean += delta / static_cast<double>(count);
  m2 += delta * (x - mean);
}

void Accumulator::merge(const Accumulator& o) {
  if (o.count == 0) return;
  if (count == 0) {
    *this = o;
    return;
  }
  const double na = static_cast<double>(count), nb = static_cast<double>(o.count);
  const double delta = o.mean - mean;
  const double total = na + nb;
  mean += delta * nb / total;
  m2 += o.m2 + delta * delta * na * nb / total;
  count += o.count;
}

double Accumulator::variance_sample() const {
  if (count < 2) return 0.0;
  return m2 / static_cast<double>(count - 1);
}

double Accumulator::standard_error() const {
  if (count == 0) return std::numeric_limits<double>::infinity();
  return std::sqrt(variance_sample() / static_cast<double>(count));
}

std::vector<std::size_t> histogram_counts(const std::vector<double>& xs,
                                          const std::vector<double>& edges) {
  if (edges.size() < 2) throw std::invalid_argument("histogram: need >= 2 edges");
  for (std::size_t i = 0; i + 1 < edges.size(); ++i)
    if (!(edges[i] < edges[i + 1]))
      throw std::invalid_argument("histogram: edges must be strictly increasing");
  std::vector<std::size_t> counts(edges.size() - 1, 0);
  for (double x : xs) {
    if (x < edges.front() || x >= edges.back()) continue;
    const auto it = std::upper_bound(edges.begin(), edges.end(), x);
    counts[static_cast<std::size_t>(it - edges.begin()) - 1] += 1;
  }
  return counts;
}

ChiSquareResult chi_square_gof(const std::vector<std::size_t>& observed,
                               const std::vector<double>& expected,
                               std::size_t dof_adjust) {
  if (observed.size() != expected.size() || observed.empty())
    throw std::invalid_argument("chi_square_gof: mismatched bin lists");
  if (observed.size() <= 1 + dof_adjust)
    throw std::invalid_argument("chi_square_gof: no degrees of freedom left");
  double stat = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (!(expected[i] > 0.0))
      throw std::invalid_argument("chi_square_gof: expected counts must be positive");
    const double diff = static_cast<double>(observed[i]) - expected[i];
    stat += diff * diff / expected[i];
  }
  const std::size_t dof = observed.size() - 1 - dof_adjust;
  const double p = boost::math::gamma_q(0.5 * static_cast<double>(dof), 0.5 * stat);
  return {stat, dof, p};
}

KsResult ks_test(std::vector<double> sample, const std::function<double(double)>& cdf,
                 double significance) {
  if (sample.empty()) throw std::invalid_argument("ks_test: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max(d, f - static_cast<double>(i) / n);
    d = std::max(d, static_cast<double>(i + 1) / n - f);
  }
  const double critical = std::sqrt(-0.5 * std::log(significance / 2.0)) / std::sqrt(n);
  return {d, critical, sample.size(), d > critical};
}

double logsumexp(const std::vector<double>& xs) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double x : xs) mx = std::max(mx, x);
  if (!std::isfinite(mx)) return mx;  // empty or all -inf (or a +inf passthrough)
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - mx);
  return mx + std::log(acc);
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("quantile: empty vector");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile: level outside [0,1]");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

}  // namespace fplab::stats
