#include "fplab/polar_geometry.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fplab/entropy.hpp"
#include "fplab/stats.hpp"

namespace fplab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::vector<double> psd_eigenvalues(const ComplexMatrix& p, const char* who) {
  if (p.rows() != p.cols() || p.rows() == 0)
    throw std::domain_error(std::string(who) + ": matrix must be square");
  const double scale = std::max(1.0, p.cwiseAbs().maxCoeff());
  if ((p - p.adjoint()).cwiseAbs().maxCoeff() > 1e-9 * scale)
    throw std::domain_error(std::string(who) + ": matrix must be self-adjoint");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(p, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw std::runtime_error(std::string(who) + ": eigensolve did not converge");
  std::vector<double> lam(static_cast<std::size_t>(p.rows()));
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    const double v = es.eigenvalues()(i);
    if (v < -1e-9 * scale)
      throw std::domain_error(std::string(who) + ": matrix must be positive semidefinite");
    lam[static_cast<std::size_t>(i)] = std::max(0.0, v);
  }
  return lam;
}

// log det of (1/2)(1 (x) p + p (x) 1) through the eigenvalues of p; shared by
// both Jacobians — their coincidence is the geometric cancellation this
// module exists to check
double log_pair_product(const std::vector<double>& lam) {
  const double k = static_cast<double>(lam.size());
  double sum = 0.0;
  for (double a : lam)
    for (double b : lam) {
      const double s = a + b;
      if (!(s > 0.0)) return kNegInf;  // singular p: a zero-zero pair
      sum += std::log(s);
    }
  return sum - k * k * std::log(2.0);
}

// asymptotic Kolmogorov upper tail at lambda = sqrt(n) * D
double kolmogorov_p(double lambda) {
  if (lambda <= 0.0) return 1.0;
  double p = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = 2.0 * std::exp(-2.0 * j * j * lambda * lambda);
    p += (j % 2 == 1) ? term : -term;
    if (term < 1e-16) break;
  }
  return std::min(1.0, std::max(0.0, p));
}

// singular values of a 2x2 complex matrix, descending, via the closed form
// for the eigenvalues of a*a
std::pair<double, double> singular_pair_2x2(const ComplexMatrix& a) {
  const double t = a.squaredNorm();  // tr(a* a)
  const double d = std::abs(a.determinant());
  const double disc = std::sqrt(std::max(0.0, t * t - 4.0 * d * d));
  const double hi = 0.5 * (t + disc), lo = 0.5 * (t - disc);
  return {std::sqrt(std::max(0.0, hi)), std::sqrt(std::max(0.0, lo))};
}

// predicted joint density of the ordered singular pair of a unit-variance
// 2x2 Ginibre matrix: 4 (l1^2-l2^2)^2 l1 l2 exp(-(l1^2+l2^2)) on l1 > l2 > 0
double ginibre2_pair_density(double l1, double l2) {
  const double d = l1 * l1 - l2 * l2;
  return 4.0 * d * d * l1 * l2 * std::exp(-(l1 * l1 + l2 * l2));
}

// integral of the predicted density over [x0,x1] x [y0,y1] intersected with
// the wedge l2 < l1, by nested Gauss-Legendre
double cell_probability(double x0, double x1, double y0, double y1) {
  static const double gx[8] = {-0.9602898564975363, -0.7966664774136267,
                               -0.5255324099163290, -0.1834346424956498,
                               0.1834346424956498,  0.5255324099163290,
                               0.7966664774136267,  0.9602898564975363};
  static const double gw[8] = {0.1012285362903763, 0.2223810344533745,
                               0.3137066458778873, 0.3626837833783620,
                               0.3626837833783620, 0.3137066458778873,
                               0.2223810344533745, 0.1012285362903763};
  if (y0 >= x1) return 0.0;  // cell entirely above the wedge
  double total = 0.0;
  const double xm = 0.5 * (x0 + x1), xh = 0.5 * (x1 - x0);
  for (int i = 0; i < 8; ++i) {
    const double l1 = xm + xh * gx[i];
    const double yhi = std::min(y1, l1);
    if (yhi <= y0) continue;
    const double ym = 0.5 * (y0 + yhi), yh = 0.5 * (yhi - y0);
    double inner = 0.0;
    for (int j = 0; j < 8; ++j) {
      const double l2 = ym + yh * gx[j];
      inner += gw[j] * ginibre2_pair_density(l1, l2);
    }
    total += gw[i] * inner * yh;
  }
  return total * xh;
}

}  // namespace

PolarPair polar_decompose(const ComplexMatrix& a) {
  if (a.rows() != a.cols() || a.rows() == 0)
    throw std::invalid_argument("polar_decompose: matrix must be square");
  Eigen::JacobiSVD<ComplexMatrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  PolarPair out;
  out.v = svd.matrixU() * svd.matrixV().adjoint();
  out.p = svd.matrixV() * svd.singularValues().asDiagonal() *
          svd.matrixV().adjoint();
  out.p = 0.5 * (out.p + out.p.adjoint()).eval();  // scrub roundoff asymmetry
  return out;
}

double jacobian_dp(const ComplexMatrix& p) {
  return log_pair_product(psd_eigenvalues(p, "jacobian_dp"));
}

double jacobian_ds(const ComplexMatrix& p) {
  return log_pair_product(psd_eigenvalues(p, "jacobian_ds"));
}

double volume_ck(int k) {
  if (k < 1) throw std::invalid_argument("volume_ck: k must be >= 1");
  const double kd = static_cast<double>(k);
  double sum_log_fact = 0.0;
  for (int j = 1; j <= k - 1; ++j) sum_log_fact += std::lgamma(static_cast<double>(j) + 1.0);
  return 0.5 * kd * (kd + 1.0) * std::log(2.0 * M_PI) - sum_log_fact;
}

double limck_residual(int k) {
  const double kd = static_cast<double>(k);
  return volume_ck(k) / (kd * kd) + 0.5 * std::log(kd) - entropy_constant();
}

PushCheckReport push_measure_check(int k, std::size_t n_samples, RngStream& rng,
                                   bool shuffle_pairs) {
  if (k != 1 && k != 2)
    throw std::invalid_argument("push_measure_check: only k = 1 and k = 2 are supported");
  if (n_samples < 10000)
    throw std::invalid_argument("push_measure_check: need at least 10^4 samples");
  if (shuffle_pairs && k != 2)
    throw std::invalid_argument("push_measure_check: pair shuffling needs k = 2");
  const double significance = 1e-3;

  PushCheckReport report;
  report.k = k;
  report.n_samples = n_samples;
  report.significance = significance;

  if (k == 1) {
    std::vector<double> radii(n_samples);
    for (double& r : radii) r = std::abs(rng.complex_gaussian(1.0));
    const stats::KsResult ks = stats::ks_test(
        radii, [](double r) { return -std::expm1(-r * r); }, significance);
    report.test_name = "ks";
    report.statistic = ks.statistic;
    report.threshold = ks.critical;
    report.p_value = kolmogorov_p(std::sqrt(static_cast<double>(ks.n)) * ks.statistic);
    report.pass = !ks.reject;
    return report;
  }

  // k = 2: singular pairs of unit-variance Ginibre, entries drawn row-major
  std::vector<double> big(n_samples), small(n_samples);
  ComplexMatrix a(2, 2);
  for (std::size_t s = 0; s < n_samples; ++s) {
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) a(i, j) = rng.complex_gaussian(1.0);
    const auto [l1, l2] = singular_pair_2x2(a);
    big[s] = l1;
    small[s] = l2;
  }
  if (shuffle_pairs) {
    // re-pair each l1 with the next sample's l2 (and re-sort the pair), which
    // destroys the within-sample eigenvalue repulsion
    std::vector<double> rotated(n_samples);
    for (std::size_t s = 0; s < n_samples; ++s) rotated[s] = small[(s + 1) % n_samples];
    for (std::size_t s = 0; s < n_samples; ++s) {
      const double hi = std::max(big[s], rotated[s]);
      const double lo = std::min(big[s], rotated[s]);
      big[s] = hi;
      small[s] = lo;
    }
  }

  // 2-D histogram over [0, box]^2 with cells of small expected count pooled
  // together with the tail mass
  const int bins = 10;
  const double box = 3.4;
  const double w = box / bins;
  std::vector<std::size_t> counts(static_cast<std::size_t>(bins * bins), 0);
  std::size_t outside = 0;
  for (std::size_t s = 0; s < n_samples; ++s) {
    const int i = static_cast<int>(big[s] / w);
    const int j = static_cast<int>(small[s] / w);
    if (i >= bins || j >= bins) {
      ++outside;
      continue;
    }
    counts[static_cast<std::size_t>(i * bins + j)] += 1;
  }

  std::vector<double> probs(static_cast<std::size_t>(bins * bins), 0.0);
  double covered = 0.0;
  for (int i = 0; i < bins; ++i)
    for (int j = 0; j <= i; ++j) {
      const double p = cell_probability(i * w, (i + 1) * w, j * w, (j + 1) * w);
      probs[static_cast<std::size_t>(i * bins + j)] = p;
      covered += p;
    }

  const double n = static_cast<double>(n_samples);
  const double min_expected = 10.0;
  std::vector<std::size_t> observed;
  std::vector<double> expected;
  std::size_t pooled_count = outside;
  double pooled_prob = std::max(0.0, 1.0 - covered);
  for (int cell = 0; cell < bins * bins; ++cell) {
    const double e = n * probs[static_cast<std::size_t>(cell)];
    if (e >= min_expected) {
      observed.push_back(counts[static_cast<std::size_t>(cell)]);
      expected.push_back(e);
    } else {
      pooled_count += counts[static_cast<std::size_t>(cell)];
      pooled_prob += probs[static_cast<std::size_t>(cell)];
    }
  }
  observed.push_back(pooled_count);
  expected.push_back(n * pooled_prob);

  const stats::ChiSquareResult cs = stats::chi_square_gof(observed, expected);
  report.test_name = "chi_square";
  report.statistic = cs.statistic;
  report.threshold =
      2.0 * boost::math::gamma_q_inv(0.5 * static_cast<double>(cs.dof), significance);
  report.p_value = cs.p_value;
  report.pass = cs.p_value >= significance;
  return report;
}

}  // namespace fplab
