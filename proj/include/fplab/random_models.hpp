#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "fplab/cumulants.hpp"
#include "fplab/rng.hpp"
#include "fplab/spectral_measure.hpp"

namespace fplab {

// k x k matrix of iid complex Gaussian entries with E|g_ij|^2 = sigma2,
// drawn row by row (the draw order is part of the reproducibility contract).
ComplexMatrix ginibre(int k, double sigma2, RngStream& rng);

// Haar-distributed unitary: QR of a Ginibre matrix with the phases of the
// R diagonal folded into Q, which pins down the factorization and makes the
// law exactly rotation invariant.
ComplexMatrix haar_unitary(int k, RngStream& rng);

// Spectral quantiles of mu at levels (i - 1/2)/k, i = 1..k, increasing.
std::vector<double> spectral_quantiles(const SpectralMeasure& mu, int k);

// U diag(quantiles) U* for a Haar unitary U; a point mass at c yields
// exactly c * I without consuming randomness.
ComplexMatrix positive_with_spectrum(const SpectralMeasure& mu, int k,
                                     RngStream& rng);

// u * p with u Haar unitary and p = positive_with_spectrum(mu_b, k). The two
// factors draw from independent child streams of rng, so they can never
// share randomness.
ComplexMatrix rdiag_sample(const SpectralMeasure& mu_b, int k, RngStream& rng);

struct MomentEstimate {
  std::complex<double> mean{0.0, 0.0};
  double standard_error = 0.0;
  std::size_t n_samples = 0;
};

// Mean and standard error of the normalized trace of word(tuple) over the
// sampled tuples; letter symbols index into each tuple, starred letters use
// the adjoint. Throws on an empty sample list.
MomentEstimate mixed_moment_estimate(
    const std::vector<std::vector<ComplexMatrix>>& samples,
    const StarWord& word);

// Streaming test of asymptotic freeness between a Haar unitary u and a fixed
// real diagonal d. Words of length <= order (order <= 6) that strictly
// alternate between the u family (u or u*) and d are traced per sample;
// defect() is the largest |empirical mean - free prediction| where the
// prediction treats u as a Haar unitary *-free from an element with the
// moments of d. Restricting b to its eigenbasis loses no generality:
// conjugating b diagonal replaces u by another Haar unitary.
class FreenessAccumulator {
 public:
  FreenessAccumulator(std::vector<double> diagonal, int order);

  void add(const ComplexMatrix& u);

  // merge of another accumulator over the same diagonal and order
  void merge(const FreenessAccumulator& other);

  std::size_t n_samples() const { return n_samples_; }
  double defect() const;

 private:
  std::vector<double> diag_;
  int order_;
  std::size_t n_samples_ = 0;
  std::vector<std::complex<double>> sums_;       // per word
  std::vector<std::complex<double>> predictions_;  // per word
};

// Batch wrapper over FreenessAccumulator. b_samples must all be the same
// real diagonal matrix (or a single entry broadcast across u_samples).
double freeness_defect(const std::vector<ComplexMatrix>& u_samples,
                       const std::vector<ComplexMatrix>& b_samples, int order);

}  // namespace fplab
