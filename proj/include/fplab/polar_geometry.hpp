#pragma once

#include <cstddef>
#include <string>

#include "fplab/rng.hpp"
#include "fplab/spectral_measure.hpp"

namespace fplab {

// a = v * p with v unitary and p = (a*a)^{1/2} positive semidefinite.
// For singular a the unitary part is completed deterministically from the SVD.
struct PolarPair {
  ComplexMatrix v;
  ComplexMatrix p;
};

PolarPair polar_decompose(const ComplexMatrix& a);

// log det of the derivative of the polar-coordinates map (v,p) -> vp at
// (1, p):  -k^2 log 2 + sum over all ordered eigenvalue pairs (a,b) of
// log(lambda_a + lambda_b). Returns -infinity when p is singular.
// Throws std::domain_error unless p is positive semidefinite (within 1e-9).
double jacobian_dp(const ComplexMatrix& p);

// log det of the derivative of the squaring map p -> p^2/2 on self-adjoint
// matrices. Identical to jacobian_dp by construction — the cancellation of
// the two determinants is the point — and implemented as the same formula.
double jacobian_ds(const ComplexMatrix& p);

// log of the volume of U(k) under the metric <a,b> = Re Tr(a b*):
// (k(k+1)/2) log 2pi - sum_{j=1}^{k-1} log j!.
double volume_ck(int k);

// (1/k^2) volume_ck(k) + (1/2) log k - (3/4 + (1/2) log 2pi); tends to 0 as
// k grows. At k=1 the residual is +0.1689... (positive).
double limck_residual(int k);

// Goodness-of-fit check that polar coordinates carry the Gaussian matrix
// measure to the predicted eigenvalue density of the positive part.
//   k=2: chi-square of the singular-value pairs of unit-variance Ginibre
//        samples against the density proportional to
//        (l1^2 - l2^2)^2 l1 l2 exp(-(l1^2 + l2^2)) on l1 > l2 > 0.
//   k=1: Kolmogorov-Smirnov of |g| against the Rayleigh law 2 r exp(-r^2).
// With shuffle_pairs set (k=2 only), lambda_2 values are re-paired across
// samples before testing; the test must then fail, demonstrating power.
struct PushCheckReport {
  int k = 0;
  std::size_t n_samples = 0;
  std::string test_name;   // "chi_square" or "ks"
  double statistic = 0.0;
  double threshold = 0.0;  // chi-square: critical statistic; ks: critical D
  double p_value = 0.0;    // chi-square upper tail; ks: 0/1 indicator omitted
  bool pass = false;
  double significance = 0.0;
};

PushCheckReport push_measure_check(int k, std::size_t n_samples, RngStream& rng,
                                   bool shuffle_pairs = false);

}  // namespace fplab
