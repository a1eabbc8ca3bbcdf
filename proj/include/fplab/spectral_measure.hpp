#pragma once
// Spectral-measure representation and transport. A measure is either a
// finite list of weighted atoms or a grid density: node values of a
// piecewise-linear density, so the trapezoid rule integrates the measure
// exactly. The two representations are never converted implicitly --
// log-energy is -infinity on atoms and finite on densities, and silent
// conversion would hide that distinction.

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace fplab {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

bool is_self_adjoint(const ComplexMatrix& a, double tol);
bool is_unitary(const ComplexMatrix& a, double tol);
bool is_positive_semidefinite(const ComplexMatrix& a, double tol);

double operator_norm(const ComplexMatrix& a);

struct Atom {
  double location = 0.0;
  double weight = 0.0;
};

class SpectralMeasure {
 public:
  // Atoms: locations need not be pre-sorted; equal (or near-equal, within
  // 1e-12 * max(1,|loc|)) locations are merged so the stored list is
  // strictly increasing. Weights must be positive and sum to 1 within 1e-12.
  static SpectralMeasure from_atoms(std::vector<Atom> atoms);

  // Grid density on uniform nodes over [a, b]; `density` holds node values
  // of the piecewise-linear density. Values must be nonnegative and the
  // trapezoid mass must be 1 within 1e-12 (use normalized() to rescale).
  static SpectralMeasure grid(double a, double b, std::vector<double> density);

  // Grid density on explicit strictly-increasing nodes (used by symmetrize,
  // which needs a gap in the support).
  static SpectralMeasure grid_nodes(std::vector<double> nodes,
                                    std::vector<double> density);

  bool is_atomic() const { return atomic_; }
  const std::vector<Atom>& atoms() const;
  const std::vector<double>& nodes() const;
  const std::vector<double>& density() const;
  std::size_t grid_size() const { return nodes_.size(); }

  double total_mass() const;
  double support_min() const;
  double support_max() const;
  bool nonnegative_support(double tol = 0.0) const { return support_min() >= -tol; }

  // moments \int t^j dm for j = 0..n; atom sums are exact, grid moments
  // integrate t^j against the piecewise-linear density in closed form
  // (no additional quadrature error beyond the representation itself)
  std::vector<double> moments(int n) const;

  // measure of t -> a*t (a != 0); exact in both representations
  SpectralMeasure dilate(double a) const;

  bool is_symmetric(double tol = 1e-12) const;

 private:
  SpectralMeasure() = default;
  bool atomic_ = true;
  std::vector<Atom> atoms_;
  std::vector<double> nodes_;
  std::vector<double> density_;
};

// Closed catalog of monotone C^1 maps of [0, inf); closed so that every
// experiment config serializes and replays exactly. Composition chains are
// themselves catalog members; inverse() stays inside the catalog
// (log_shift is exp_shift's inverse).
class FunctionSpec {
 public:
  // t -> a*t + c with a > 0. Catalog maps must take [0,inf) onto itself
  // with f(0) = 0, so construction rejects c != 0; the offset parameter
  // exists only to make that contract explicit at call sites.
  static FunctionSpec affine(double a, double c = 0.0);
  static FunctionSpec power(double p);              // t -> t^p, p > 0
  static FunctionSpec exp_shift(double s);          // t -> (e^{st} - 1)/s, s > 0
  static FunctionSpec log_shift(double s);          // t -> log(1 + s t)/s, s > 0
  static FunctionSpec compose(const FunctionSpec& outer, const FunctionSpec& inner);

  double operator()(double t) const;
  double derivative(double t) const;
  double inverse_at(double y) const;
  FunctionSpec inverse() const;

  // strictly increasing with f(0) = 0 by construction
  std::string describe() const;

 private:
  struct Stage {
    enum class Kind { Affine, Power, ExpShift, LogShift } kind;
    double param = 1.0;
  };
  std::vector<Stage> stages_;  // applied inner-to-outer
};

// Empirical spectral distribution: atoms at the eigenvalues, weight 1/k
// each. With `self_adjoint` set the matrix must be self-adjoint within
// 1e-10 and the solve is the symmetric one; otherwise a general eigensolve
// is accepted only if the spectrum is real within tolerance (measures here
// live on the real line).
SpectralMeasure esd(const ComplexMatrix& a, bool self_adjoint);

// atoms at the eigenvalues of a*a/2, weight 1/k each
SpectralMeasure singular_square_measure(const ComplexMatrix& a);

// image measure under a catalog map; requires support in [0, inf).
// Atoms map exactly; grid densities are transported mass-exactly by
// cell-averaging the image CDF (the pointwise inverse-derivative density
// breaks down where f' vanishes, e.g. t -> t^2 at 0, so it is not used).
SpectralMeasure pushforward(const SpectralMeasure& m, const FunctionSpec& f);

// even measure with mu_x(A) = (mu_b(A cap [0,inf)) + mu_b(-A cap [0,inf)))/2.
// Accepts a nonnegative-support input, or an already-symmetric input which
// is returned unchanged (making symmetrize idempotent).
SpectralMeasure symmetrize(const SpectralMeasure& mu_b);

std::vector<double> measure_moments(const SpectralMeasure& m, int n);

}  // namespace fplab
