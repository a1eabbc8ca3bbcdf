#include "fplab/spectral_measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace fplab {

namespace {

constexpr double kMassTol = 1e-12;

[[noreturn]] void fail(const std::string& what) {
  throw std::invalid_argument(what);
}

}  // namespace

bool is_self_adjoint(const ComplexMatrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  return (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

bool is_unitary(const ComplexMatrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  ComplexMatrix d = a.adjoint() * a;
  d -= ComplexMatrix::Identity(a.rows(), a.cols());
  return d.cwiseAbs().maxCoeff() <= tol;
}

bool is_positive_semidefinite(const ComplexMatrix& a, double tol) {
  if (!is_self_adjoint(a, tol)) return false;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) return false;
  return es.eigenvalues().minCoeff() >= -tol;
}

double operator_norm(const ComplexMatrix& a) {
  return a.jacobiSvd().singularValues()(0);
}

// ---- SpectralMeasure ------------------------------------------------------

SpectralMeasure SpectralMeasure::from_atoms(std::vector<Atom> atoms) {
  if (atoms.empty()) fail("atom measure needs at least one atom");
  for (const Atom& at : atoms) {
    if (!(at.weight > 0.0)) fail("atom weights must be positive");
    if (!std::isfinite(at.location)) fail("atom locations must be finite");
  }
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& x, const Atom& y) { return x.location < y.location; });
  std::vector<Atom> merged;
  merged.reserve(atoms.size());
  for (const Atom& at : atoms) {
    const double scale = std::max(1.0, std::fabs(at.location));
    if (!merged.empty() && at.location - merged.back().location <= 1e-12 * scale) {
      merged.back().weight += at.weight;
    } else {
      merged.push_back(at);
    }
  }
  double mass = 0.0;
  for (const Atom& at : merged) mass += at.weight;
  if (std::fabs(mass - 1.0) > kMassTol) {
    std::ostringstream os;
    os << "atom weights sum to " << mass << ", expected 1";
    fail(os.str());
  }
  SpectralMeasure m;
  m.atomic_ = true;
  m.atoms_ = std::move(merged);
  return m;
}

SpectralMeasure SpectralMeasure::grid(double a, double b, std::vector<double> density) {
  if (!(a < b)) fail("grid interval must satisfy a < b");
  const std::size_t n = density.size();
  if (n < 2) fail("grid needs at least two nodes");
  std::vector<double> nodes(n);
  for (std::size_t i = 0; i < n; ++i)
    nodes[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  nodes.back() = b;
  return grid_nodes(std::move(nodes), std::move(density));
}

SpectralMeasure SpectralMeasure::grid_nodes(std::vector<double> nodes,
                                            std::vector<double> density) {
  if (nodes.size() != density.size()) fail("node/density length mismatch");
  if (nodes.size() < 2) fail("grid needs at least two nodes");
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
    if (!(nodes[i] < nodes[i + 1])) fail("grid nodes must be strictly increasing");
  double mass = 0.0;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    if (density[i] < 0.0 || !std::isfinite(density[i]))
      fail("grid density must be finite and nonnegative");
    mass += 0.5 * (density[i] + density[i + 1]) * (nodes[i + 1] - nodes[i]);
  }
  if (!std::isfinite(density.back()) || density.back() < 0.0)
    fail("grid density must be finite and nonnegative");
  if (std::fabs(mass - 1.0) > kMassTol) {
    std::ostringstream os;
    os << "grid trapezoid mass is " << mass << ", expected 1";
    fail(os.str());
  }
  SpectralMeasure m;
  m.atomic_ = false;
  m.nodes_ = std::move(nodes);
  m.density_ = std::move(density);
  return m;
}

const std::vector<Atom>& SpectralMeasure::atoms() const {
  if (!atomic_) fail("measure is a grid density, not atomic");
  return atoms_;
}

const std::vector<double>& SpectralMeasure::nodes() const {
  if (atomic_) fail("measure is atomic, not a grid density");
  return nodes_;
}

const std::vector<double>& SpectralMeasure::density() const {
  if (atomic_) fail("measure is atomic, not a grid density");
  return density_;
}

double SpectralMeasure::total_mass() const {
  if (atomic_) {
    double mass = 0.0;
    for (const Atom& at : atoms_) mass += at.weight;
    return mass;
  }
  double mass = 0.0;
  for (std::size_t i = 0; i + 1 < nodes_.size(); ++i)
    mass += 0.5 * (density_[i] + density_[i + 1]) * (nodes_[i + 1] - nodes_[i]);
  return mass;
}

double SpectralMeasure::support_min() const {
  if (atomic_) return atoms_.front().location;
  // leading zero-density cells carry no mass
  for (std::size_t i = 0; i + 1 < nodes_.size(); ++i)
    if (density_[i] > 0.0 || density_[i + 1] > 0.0) return nodes_[i];
  return nodes_.front();
}

double SpectralMeasure::support_max() const {
  if (atomic_) return atoms_.back().location;
  for (std::size_t i = nodes_.size() - 1; i > 0; --i)
    if (density_[i] > 0.0 || density_[i - 1] > 0.0) return nodes_[i];
  return nodes_.back();
}

std::vector<double> SpectralMeasure::moments(int n) const {
  if (n < 0) fail("moment order must be nonnegative");
  std::vector<double> out(static_cast<std::size_t>(n) + 1, 0.0);
  if (atomic_) {
    for (const Atom& at : atoms_) {
      double p = at.weight;
      for (int j = 0; j <= n; ++j) {
        out[static_cast<std::size_t>(j)] += p;
        p *= at.location;
      }
    }
    return out;
  }
  // \int_{t0}^{t1} t^j (alpha + beta t) dt in closed form per cell
  for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) {
    const double t0 = nodes_[i], t1 = nodes_[i + 1];
    const double f0 = density_[i], f1 = density_[i + 1];
    const double beta = (f1 - f0) / (t1 - t0);
    const double alpha = f0 - beta * t0;
    double p0 = t0, p1 = t1;  // running t^{j+1}
    for (int j = 0; j <= n; ++j) {
      const double int_tj = (p1 - p0) / (j + 1);
      const double int_tj1 = (p1 * t1 - p0 * t0) / (j + 2);
      out[static_cast<std::size_t>(j)] += alpha * int_tj + beta * int_tj1;
      p0 *= t0;
      p1 *= t1;
    }
  }
  return out;
}

SpectralMeasure SpectralMeasure::dilate(double a) const {
  if (a == 0.0 || !std::isfinite(a)) fail("dilation factor must be finite and nonzero");
  if (atomic_) {
    std::vector<Atom> out = atoms_;
    for (Atom& at : out) at.location *= a;
    return from_atoms(std::move(out));
  }
  std::vector<double> nodes = nodes_;
  std::vector<double> dens = density_;
  const double inv = 1.0 / std::fabs(a);
  for (double& t : nodes) t *= a;
  for (double& f : dens) f *= inv;
  if (a < 0.0) {
    std::reverse(nodes.begin(), nodes.end());
    std::reverse(dens.begin(), dens.end());
  }
  return grid_nodes(std::move(nodes), std::move(dens));
}

bool SpectralMeasure::is_symmetric(double tol) const {
  if (atomic_) {
    const std::size_t n = atoms_.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Atom& lo = atoms_[i];
      const Atom& hi = atoms_[n - 1 - i];
      if (std::fabs(lo.location + hi.location) > tol) return false;
      if (std::fabs(lo.weight - hi.weight) > tol) return false;
    }
    return true;
  }
  const std::size_t n = nodes_.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (std::fabs(nodes_[i] + nodes_[n - 1 - i]) > tol) return false;
    if (std::fabs(density_[i] - density_[n - 1 - i]) > tol) return false;
  }
  return true;
}

// ---- FunctionSpec ---------------------------------------------------------

FunctionSpec FunctionSpec::affine(double a, double c) {
  if (!(a > 0.0)) fail("affine slope must be positive");
  if (c != 0.0) fail("catalog maps must fix 0: affine offset must be 0");
  FunctionSpec f;
  f.stages_.push_back({Stage::Kind::Affine, a});
  return f;
}

FunctionSpec FunctionSpec::power(double p) {
  if (!(p > 0.0)) fail("power exponent must be positive");
  FunctionSpec f;
  f.stages_.push_back({Stage::Kind::Power, p});
  return f;
}

FunctionSpec FunctionSpec::exp_shift(double s) {
  if (!(s > 0.0)) fail("exp_shift rate must be positive");
  FunctionSpec f;
  f.stages_.push_back({Stage::Kind::ExpShift, s});
  return f;
}

FunctionSpec FunctionSpec::log_shift(double s) {
  if (!(s > 0.0)) fail("log_shift rate must be positive");
  FunctionSpec f;
  f.stages_.push_back({Stage::Kind::LogShift, s});
  return f;
}

FunctionSpec FunctionSpec::compose(const FunctionSpec& outer, const FunctionSpec& inner) {
  FunctionSpec f;
  f.stages_ = inner.stages_;
  f.stages_.insert(f.stages_.end(), outer.stages_.begin(), outer.stages_.end());
  return f;
}

double FunctionSpec::operator()(double t) const {
  double y = t;
  for (const Stage& st : stages_) {
    switch (st.kind) {
      case Stage::Kind::Affine: y *= st.param; break;
      case Stage::Kind::Power: y = std::pow(y, st.param); break;
      case Stage::Kind::ExpShift: y = std::expm1(st.param * y) / st.param; break;
      case Stage::Kind::LogShift: y = std::log1p(st.param * y) / st.param; break;
    }
  }
  return y;
}

double FunctionSpec::derivative(double t) const {
  double y = t;
  double d = 1.0;
  for (const Stage& st : stages_) {
    switch (st.kind) {
      case Stage::Kind::Affine:
        d *= st.param;
        y *= st.param;
        break;
      case Stage::Kind::Power:
        d *= st.param * std::pow(y, st.param - 1.0);
        y = std::pow(y, st.param);
        break;
      case Stage::Kind::ExpShift:
        d *= std::exp(st.param * y);
        y = std::expm1(st.param * y) / st.param;
        break;
      case Stage::Kind::LogShift:
        d /= 1.0 + st.param * y;
        y = std::log1p(st.param * y) / st.param;
        break;
    }
  }
  return d;
}

double FunctionSpec::inverse_at(double y) const {
  double t = y;
  for (auto it = stages_.rbegin(); it != stages_.rend(); ++it) {
    switch (it->kind) {
      case Stage::Kind::Affine: t /= it->param; break;
      case Stage::Kind::Power: t = std::pow(t, 1.0 / it->param); break;
      case Stage::Kind::ExpShift: t = std::log1p(it->param * t) / it->param; break;
      case Stage::Kind::LogShift: t = std::expm1(it->param * t) / it->param; break;
    }
  }
  return t;
}

FunctionSpec FunctionSpec::inverse() const {
  FunctionSpec f;
  for (auto it = stages_.rbegin(); it != stages_.rend(); ++it) {
    Stage st = *it;
    switch (st.kind) {
      case Stage::Kind::Affine: st.param = 1.0 / st.param; break;
      case Stage::Kind::Power: st.param = 1.0 / st.param; break;
      case Stage::Kind::ExpShift: st.kind = Stage::Kind::LogShift; break;
      case Stage::Kind::LogShift: st.kind = Stage::Kind::ExpShift; break;
    }
    f.stages_.push_back(st);
  }
  return f;
}

std::string FunctionSpec::describe() const {
  std::ostringstream os;
  bool first = true;
  for (auto it = stages_.rbegin(); it != stages_.rend(); ++it) {
    if (!first) os << " . ";
    first = false;
    switch (it->kind) {
      case Stage::Kind::Affine: os << "affine(" << it->param << ",0)"; break;
      case Stage::Kind::Power: os << "power(" << it->param << ")"; break;
      case Stage::Kind::ExpShift: os << "exp_shift(" << it->param << ")"; break;
      case Stage::Kind::LogShift: os << "log_shift(" << it->param << ")"; break;
    }
  }
  if (first) os << "identity";
  return os.str();
}

// ---- matrix-to-measure ----------------------------------------------------

namespace {

SpectralMeasure atoms_from_eigenvalues(std::vector<double> vals) {
  std::vector<Atom> atoms;
  const double w = 1.0 / static_cast<double>(vals.size());
  atoms.reserve(vals.size());
  for (double v : vals) atoms.push_back({v, w});
  return SpectralMeasure::from_atoms(std::move(atoms));
}

}  // namespace

SpectralMeasure esd(const ComplexMatrix& a, bool self_adjoint) {
  if (a.rows() != a.cols() || a.rows() < 1) fail("esd needs a square matrix");
  if (self_adjoint) {
    if (!is_self_adjoint(a, 1e-10))
      fail("esd: matrix is not self-adjoint within 1e-10");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a);
    if (es.info() != Eigen::Success) {
      std::ostringstream os;
      os << "esd: eigensolve did not converge (dim " << a.rows() << ", |a|_F "
         << a.norm() << ", |a|_max " << a.cwiseAbs().maxCoeff() << ")";
      throw std::runtime_error(os.str());
    }
    std::vector<double> vals(es.eigenvalues().data(),
                             es.eigenvalues().data() + a.rows());
    return atoms_from_eigenvalues(std::move(vals));
  }
  Eigen::ComplexEigenSolver<ComplexMatrix> es(a, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) {
    std::ostringstream os;
    os << "esd: eigensolve did not converge (dim " << a.rows() << ", |a|_F "
       << a.norm() << ")";
    throw std::runtime_error(os.str());
  }
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  std::vector<double> vals;
  vals.reserve(static_cast<std::size_t>(a.rows()));
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const Complex lambda = es.eigenvalues()(i);
    if (std::fabs(lambda.imag()) > 1e-10 * scale)
      fail("esd: spectrum is not real; only real-spectrum matrices define a "
           "measure on the line");
    vals.push_back(lambda.real());
  }
  return atoms_from_eigenvalues(std::move(vals));
}

SpectralMeasure singular_square_measure(const ComplexMatrix& a) {
  if (a.rows() != a.cols() || a.rows() < 1)
    fail("singular_square_measure needs a square matrix");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a.adjoint() * a,
                                                  Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("singular_square_measure: eigensolve did not converge");
  std::vector<double> vals;
  vals.reserve(static_cast<std::size_t>(a.rows()));
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    vals.push_back(std::max(0.0, es.eigenvalues()(i)) * 0.5);
  return atoms_from_eigenvalues(std::move(vals));
}

// ---- transport ------------------------------------------------------------

SpectralMeasure pushforward(const SpectralMeasure& m, const FunctionSpec& f) {
  if (m.support_min() < 0.0)
    throw std::domain_error("pushforward: support must lie in [0, inf)");
  if (m.is_atomic()) {
    std::vector<Atom> out;
    out.reserve(m.atoms().size());
    for (const Atom& at : m.atoms()) out.push_back({f(at.location), at.weight});
    return SpectralMeasure::from_atoms(std::move(out));
  }
  const std::vector<double>& nodes = m.nodes();
  const std::vector<double>& dens = m.density();
  const std::size_t n = nodes.size();

  // exact cell masses of the piecewise-linear source around each node
  // (integrated between the midpoints that flank it)
  std::vector<double> mids(n + 1);
  mids[0] = nodes.front();
  mids[n] = nodes.back();
  for (std::size_t i = 1; i < n; ++i) mids[i] = 0.5 * (nodes[i - 1] + nodes[i]);
  std::vector<double> masses(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) {
      const double h = nodes[i] - nodes[i - 1];
      const double fm = 0.5 * (dens[i - 1] + dens[i]);
      masses[i] += 0.25 * h * (fm + dens[i]);  // right half of cell i-1
    }
    if (i + 1 < n) {
      const double h = nodes[i + 1] - nodes[i];
      const double fm = 0.5 * (dens[i] + dens[i + 1]);
      masses[i] += 0.25 * h * (dens[i] + fm);  // left half of cell i
    }
  }

  // image nodes are the images of the source nodes, so mesh grading of the
  // source — and any grading the map itself induces, e.g. t^2 clustering
  // image nodes near 0 — carries over to the image; each image node's value
  // is its transported cell mass over the image cell width, which conserves
  // mass cell by cell (a final rescale keeps the unit trapezoid-mass
  // invariant exact)
  std::vector<double> out_nodes(n), out_dens(n), image_mids(n + 1);
  for (std::size_t j = 0; j < n; ++j) out_nodes[j] = f(nodes[j]);
  for (std::size_t j = 0; j <= n; ++j) image_mids[j] = f(mids[j]);
  const bool decreasing = out_nodes.front() > out_nodes.back();
  for (std::size_t j = 0; j < n; ++j) {
    const double width = decreasing ? image_mids[j] - image_mids[j + 1]
                                    : image_mids[j + 1] - image_mids[j];
    if (!(width > 0.0)) fail("pushforward: map is not strictly monotone on the support");
    out_dens[j] = std::max(0.0, masses[j] / width);
  }
  if (decreasing) {
    std::reverse(out_nodes.begin(), out_nodes.end());
    std::reverse(out_dens.begin(), out_dens.end());
  }
  double mass = 0.0;
  for (std::size_t j = 0; j + 1 < n; ++j)
    mass += 0.5 * (out_dens[j] + out_dens[j + 1]) * (out_nodes[j + 1] - out_nodes[j]);
  if (!(mass > 0.0)) fail("pushforward: transported mass vanished");
  const double rescale = 1.0 / mass;
  for (double& v : out_dens) v *= rescale;
  return SpectralMeasure::grid_nodes(std::move(out_nodes), std::move(out_dens));
}

SpectralMeasure symmetrize(const SpectralMeasure& mu_b) {
  if (mu_b.support_min() < 0.0) {
    if (mu_b.is_symmetric(1e-12)) return mu_b;
    throw std::domain_error(
        "symmetrize: support must lie in [0, inf) (or be symmetric already)");
  }
  if (mu_b.is_atomic()) {
    std::vector<Atom> out;
    for (const Atom& at : mu_b.atoms()) {
      if (at.location == 0.0) {
        out.push_back({0.0, at.weight});
      } else {
        out.push_back({-at.location, 0.5 * at.weight});
        out.push_back({at.location, 0.5 * at.weight});
      }
    }
    return SpectralMeasure::from_atoms(std::move(out));
  }
  const std::vector<double>& nodes = mu_b.nodes();
  const std::vector<double>& dens = mu_b.density();
  const std::size_t n = nodes.size();
  const double a = nodes.front();
  std::vector<double> out_nodes, out_dens;
  if (a <= 0.0) {
    // mirror about 0 sharing the node at 0: 2n-1 nodes, exactly even
    out_nodes.reserve(2 * n - 1);
    out_dens.reserve(2 * n - 1);
    for (std::size_t i = n; i-- > 1;) {
      out_nodes.push_back(-nodes[i]);
      out_dens.push_back(0.5 * dens[i]);
    }
    for (std::size_t i = 0; i < n; ++i) {
      out_nodes.push_back(nodes[i]);
      out_dens.push_back(0.5 * dens[i]);
    }
    return SpectralMeasure::grid_nodes(std::move(out_nodes), std::move(out_dens));
  }
  // support [a,b] with a > 0: mirrored halves with an exact zero-density gap
  // bridged by ramp nodes just inside +-a; the ramp carries O(delta) mass
  // which the final rescale absorbs
  const double delta = (nodes[1] - nodes[0]) * 1e-9;
  out_nodes.reserve(2 * n + 2);
  out_dens.reserve(2 * n + 2);
  for (std::size_t i = n; i-- > 0;) {
    out_nodes.push_back(-nodes[i]);
    out_dens.push_back(0.5 * dens[i]);
  }
  out_nodes.push_back(-(a - delta));
  out_dens.push_back(0.0);
  out_nodes.push_back(a - delta);
  out_dens.push_back(0.0);
  for (std::size_t i = 0; i < n; ++i) {
    out_nodes.push_back(nodes[i]);
    out_dens.push_back(0.5 * dens[i]);
  }
  double mass = 0.0;
  for (std::size_t i = 0; i + 1 < out_nodes.size(); ++i)
    mass += 0.5 * (out_dens[i] + out_dens[i + 1]) * (out_nodes[i + 1] - out_nodes[i]);
  for (double& v : out_dens) v /= mass;
  return SpectralMeasure::grid_nodes(std::move(out_nodes), std::move(out_dens));
}

std::vector<double> measure_moments(const SpectralMeasure& m, int n) {
  return m.moments(n);
}

}  // namespace fplab
