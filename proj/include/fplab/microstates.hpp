#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fplab/cumulants.hpp"
#include "fplab/rng.hpp"
#include "fplab/spectral_measure.hpp"

namespace fplab {

// Microstate set: tuples of k x k matrices whose operator norms are bounded
// by R and whose normalized mixed *-moments up to word length m lie strictly
// within epsilon of the targets. With self_adjoint set the tuple entries are
// self-adjoint and words carry no stars.
struct GammaSpec {
  double R = 0.0;
  int m = 0;
  double epsilon = 0.0;
  int n_vars = 1;
  bool self_adjoint = false;
  // Target mixed moments; must answer every word over the n_vars symbols of
  // length <= max(m, 2) (length-2 moments calibrate the reference Gaussian).
  std::function<std::complex<double>(const StarWord&)> targets;
};

// One-variable non-self-adjoint spec whose targets come from a moment table
// (table order must be >= max(m, 2)).
GammaSpec spec_from_table(const MomentTable& targets, double R, int m,
                          double epsilon);

struct MembershipReport {
  bool member = false;
  // Largest moment deviation |tr(word) - target|, or the operator-norm
  // excess when that is what rules the tuple out.
  double worst_deviation = 0.0;
  std::string worst_word;
};

MembershipReport gamma_membership(const std::vector<ComplexMatrix>& tuple,
                                  const GammaSpec& spec);

enum class VolumeMethod {
  // importance sampling from the moment-matched Gaussian
  plain,
  // multilevel splitting (subset simulation) for sets the plain estimator
  // cannot hit; several independent replicates give the spread
  splitting,
  // certificate check, then plain, escalating to splitting when the plain
  // estimator records no or too few hits
  automatic,
};

struct EntropyEstimate {
  double log_volume = 0.0;
  double standard_error = 0.0;
  double effective_sample_size = 0.0;
  int k = 0;
  // log_volume / k^2 + n_vars log k, or + (n_vars/2) log k for self-adjoint
  // tuples
  double normalized = 0.0;
  // set when the effective sample size fell below 100 (kept as a flag, the
  // estimate itself is still reported)
  bool low_confidence = false;
  std::string method;  // "importance", "splitting", or "certificate"
  bool certified_empty = false;
};

// Deterministic emptiness proof for one-variable non-self-adjoint specs with
// m >= max(k, 4). The windows on tr((zz*)) and tr((zz*)^2) force every
// squared singular value away from zero, hence |det| above a positive bound,
// while the windows on tr(z^j), j <= k, cap |det| through the Newton
// identities; when the cap falls below the bound the set is empty. Returns
// nullopt when the test does not apply or cannot decide.
struct EmptinessCertificate {
  double det_lower_bound = 0.0;  // from the singular-value windows
  double det_upper_bound = 0.0;  // from the power-trace windows
  std::string detail;
};
std::optional<EmptinessCertificate> emptiness_certificate(const GammaSpec& spec,
                                                          int k);

// Lebesgue volume of the microstate set in logarithmic scale, normalized as
// in EntropyEstimate. Requires n_samples >= 10^4 and 2 k^2 n_vars <= 200.
// Lebesgue measure is taken in the coordinates that are orthonormal for
// <a,b> = Re tr(a b*): (Re g_ij, Im g_ij) over all entries for general
// matrices; (x_ii, sqrt2 Re x_ij, sqrt2 Im x_ij), i < j, for self-adjoint
// ones. Zero hits give -infinity with infinite standard error.
EntropyEstimate log_volume_estimate(const GammaSpec& spec, int k,
                                    std::size_t n_samples, RngStream& rng,
                                    VolumeMethod method = VolumeMethod::automatic);

struct ChiCurvePoint {
  int k = 0;
  EntropyEstimate estimate;
};

// log_volume_estimate at each k, on independent child streams of rng.
std::vector<ChiCurvePoint> chi_curve(const GammaSpec& spec,
                                     const std::vector<int>& ks,
                                     std::size_t n_samples, RngStream& rng,
                                     VolumeMethod method = VolumeMethod::automatic);

// (dk) x (dk) matrix assembled from a d x d array of k x k blocks, and its
// exact inverse.
ComplexMatrix block_embed(const std::vector<std::vector<ComplexMatrix>>& blocks);
std::vector<std::vector<ComplexMatrix>> entry_split(const ComplexMatrix& z,
                                                    int d);

// Exact bookkeeping for the d x d amplification identity: lhs is the summed
// entropy of the d^2 free circular entries of variance v/d, rhs_matrix_term
// is d^2 times the entropy of one circular element of variance v, and
// constant = lhs - rhs_matrix_term is the dimensional term, equal to
// -d^2 log d.
struct AmplificationReport {
  int d = 1;
  double v = 1.0;
  double lhs = 0.0;
  double rhs_matrix_term = 0.0;
  double constant = 0.0;
  int sign = 0;  // -1, 0 (d = 1), +1
  double magnitude = 0.0;
  double expected_magnitude = 0.0;  // d^2 log d
  double magnitude_error = 0.0;
  std::string note;
};
AmplificationReport amplification_constant(int d, double v);

}  // namespace fplab
