#pragma once

#include <vector>

#include "fplab/spectral_measure.hpp"

namespace fplab {

// How an entropy value was produced: deterministic measure quadrature, or the
// finite-spectrum pairwise estimator.
enum class EntropyMethod { quadrature, eigenvalue_estimator };

// value may be -infinity: that happens exactly when the input measure carries
// an atom (quadrature path) or the spectrum has a repeated value (estimator
// path). Negative infinity is a value, not an error — callers branch on it
// the same way the theory does.
struct EntropyValue {
  double value = 0.0;
  EntropyMethod method = EntropyMethod::quadrature;
  double error_estimate = 0.0;

  bool is_neg_infinity() const;
};

// 3/4 + (1/2) log(2*pi), evaluated from first principles at full precision.
// This constant shows up in several independent identities below and in the
// polar-geometry normalization; all of them must agree to machine precision,
// which a rounded literal would break.
double entropy_constant();

// Logarithmic energy  E(m) = double integral of log|s-t| dm(s) dm(t).
//
// Grid path: 2-D trapezoid over node pairs, with every cell pair touching
// the diagonal replaced by an exact local integral of the log kernel
// (antiderivative-based, never clipped). Atom path: any atom pairs with
// itself at positive weight, so the energy is -infinity.
EntropyValue log_energy(const SpectralMeasure& m);

// chi^sa of one self-adjoint variable: log_energy(m) + 3/4 + (1/2) log 2pi.
EntropyValue chi_sa_one(const SpectralMeasure& m);

// chi of an R-diagonal element with singular-value distribution mu_b:
// chi_sa_one(pushforward of mu_b under t -> t^2/2) + 3/4 + (1/2) log 2pi.
// Requires support in [0, inf).
EntropyValue chi_rdiag(const SpectralMeasure& mu_b);

// | chi_rdiag(mu_b) - 2 chi_sa_one(dilate(symmetrize(mu_b), 2^{-1/2})) |.
// The two sides agree identically in exact arithmetic; the returned defect
// measures quadrature error only. Atomic input is rejected (both sides are
// -infinity, so the identity check is uninformative).
double chi_symmetric_identity_defect(const SpectralMeasure& mu_b);

// Upper bound for chi of any element y with a prescribed distribution of
// y*y: chi_sa_one(pushforward of mu_yy under t -> t/2) + 3/4 + (1/2) log 2pi.
// The bound is attained exactly by the R-diagonal element with matching
// singular-value law. Requires support in [0, inf).
EntropyValue chi_upper_bound(const SpectralMeasure& mu_yy);

// | [log_energy(pushforward(mu, f)) - log_energy(mu)]
//   - double integral of log|(f(s)-f(t))/(s-t)| dmu(s) dmu(t) |.
// Zero in exact arithmetic for any monotone change of variables; the
// returned value measures quadrature error. mu must be a non-atomic grid
// measure with support in [0, inf).
double changevar_defect(const SpectralMeasure& mu, const FunctionSpec& f);

// Finite-spectrum counterpart of log_energy:
// (1/k^2) * sum over ordered pairs i != j of log|lambda_i - lambda_j|.
// No bias correction is applied (the raw estimator has O(log k / k) bias);
// an exact tie yields -infinity. Requires k >= 2.
EntropyValue log_energy_estimator(const std::vector<double>& eigs);

}  // namespace fplab
