#include "fplab/random_models.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fplab {

namespace {

using Complex = std::complex<double>;

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

// One strictly alternating word in the letters {u, u*} and a fixed diagonal
// d. Positions 0..len-1 alternate families starting with start_family
// (0 = u family, 1 = d); star_mask bit j is the star of the j-th u letter.
struct AltWord {
  int len = 0;
  int start_family = 0;
  unsigned star_mask = 0;
  int u_count = 0;
  // d exponent on the cyclic gap that closes the trace (d letters before the
  // first u letter plus those after the last one); gaps between consecutive
  // u letters always carry exactly one d.
  int wrap_power = 0;
};

std::vector<AltWord> alternating_words(int order) {
  std::vector<AltWord> words;
  for (int len = 1; len <= order; ++len) {
    for (int start = 0; start < 2; ++start) {
      AltWord base;
      base.len = len;
      base.start_family = start;
      int u_count = 0;
      for (int t = 0; t < len; ++t) {
        const int family = (start + t) % 2;
        if (family == 0) ++u_count;
      }
      if (u_count == 0 && len > 1) continue;  // cannot happen when alternating
      base.u_count = u_count;
      const int leading_d = (start == 1) ? 1 : 0;
      const int trailing_d = ((start + len - 1) % 2 == 1) ? 1 : 0;
      base.wrap_power = leading_d + trailing_d;
      const unsigned combos = u_count > 0 ? (1u << u_count) : 1u;
      for (unsigned mask = 0; mask < combos; ++mask) {
        AltWord w = base;
        w.star_mask = mask;
        words.push_back(w);
      }
    }
  }
  return words;
}

// Normalized trace of the word against a concrete unitary sample. ua must be
// u.adjoint(); dpow[p] holds the entrywise p-th power of the diagonal.
Complex word_trace(const AltWord& w, const ComplexMatrix& u,
                   const ComplexMatrix& ua,
                   const std::vector<Eigen::VectorXd>& dpow) {
  const int k = static_cast<int>(u.rows());
  const auto u_letter = [&](int j) -> const ComplexMatrix& {
    return (w.star_mask & (1u << j)) ? ua : u;
  };
  switch (w.u_count) {
    case 0:  // the word is the single letter d
      return Complex(dpow[1].sum() / k, 0.0);
    case 1: {
      const ComplexMatrix& m = u_letter(0);
      Complex s(0.0, 0.0);
      for (int i = 0; i < k; ++i) s += m(i, i) * dpow[w.wrap_power](i);
      return s / static_cast<double>(k);
    }
    case 2: {
      // tr(u1 d u2 d^wrap) = sum_ij u1_ij d_j u2_ji d_i^wrap
      const ComplexMatrix& m1 = u_letter(0);
      const ComplexMatrix& m2 = u_letter(1);
      const ComplexMatrix b = m1.cwiseProduct(m2.transpose());
      const Eigen::VectorXcd right = b * dpow[1].cast<Complex>();
      // dot() conjugates its first argument; the weights are real, so this
      // is the plain bilinear sum
      return dpow[w.wrap_power].cast<Complex>().dot(right) /
             static_cast<double>(k);
    }
    case 3: {
      // tr((u1 d)(u2 d)(u3 d^wrap)) via one matrix product
      const ComplexMatrix a = u_letter(0) * dpow[1].asDiagonal();
      const ComplexMatrix b = u_letter(1) * dpow[1].asDiagonal();
      const ComplexMatrix c = u_letter(2) * dpow[w.wrap_power].asDiagonal();
      const ComplexMatrix ab = a * b;
      return ab.cwiseProduct(c.transpose()).sum() / static_cast<double>(k);
    }
    default:
      fail("word_trace: alternating words of order <= 6 have at most 3 unitary letters");
  }
}

// The same word as colored letters for the free-product evaluator.
std::vector<ColoredStarLetter> colored_word(const AltWord& w) {
  std::vector<ColoredStarLetter> out;
  out.reserve(w.len);
  int u_index = 0;
  for (int t = 0; t < w.len; ++t) {
    const int family = (w.start_family + t) % 2;
    if (family == 0) {
      out.push_back({0, (w.star_mask & (1u << u_index)) != 0});
      ++u_index;
    } else {
      out.push_back({1, false});
    }
  }
  return out;
}

}  // namespace

ComplexMatrix ginibre(int k, double sigma2, RngStream& rng) {
  if (k <= 0) fail("ginibre: k must be positive");
  if (!(sigma2 > 0.0)) fail("ginibre: sigma2 must be positive");
  ComplexMatrix g(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) g(i, j) = rng.complex_gaussian(sigma2);
  }
  return g;
}

ComplexMatrix haar_unitary(int k, RngStream& rng) {
  const ComplexMatrix g = ginibre(k, 1.0, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(k, k);
  const ComplexMatrix& r = qr.matrixQR();
  for (int i = 0; i < k; ++i) {
    const Complex rii = r(i, i);
    const double mag = std::abs(rii);
    q.col(i) *= mag > 0.0 ? rii / mag : Complex(1.0, 0.0);
  }
  return q;
}

std::vector<double> spectral_quantiles(const SpectralMeasure& mu, int k) {
  if (k <= 0) fail("spectral_quantiles: k must be positive");
  std::vector<double> q(k);

  if (mu.is_atomic()) {
    const auto& atoms = mu.atoms();
    std::size_t a = 0;
    double cum = atoms.front().weight;
    for (int i = 0; i < k; ++i) {
      const double level = (i + 0.5) / k;
      while (cum < level && a + 1 < atoms.size()) {
        ++a;
        cum += atoms[a].weight;
      }
      q[i] = atoms[a].location;
    }
    return q;
  }

  const auto& nodes = mu.nodes();
  const auto& dens = mu.density();
  const std::size_t n = nodes.size();
  std::vector<double> cdf(n, 0.0);
  for (std::size_t j = 1; j < n; ++j) {
    cdf[j] = cdf[j - 1] +
             0.5 * (dens[j - 1] + dens[j]) * (nodes[j] - nodes[j - 1]);
  }
  const double total = cdf.back();
  std::size_t cell = 0;
  for (int i = 0; i < k; ++i) {
    const double level = (i + 0.5) / k * total;
    while (cell + 2 < n && cdf[cell + 1] < level) ++cell;
    const double h = nodes[cell + 1] - nodes[cell];
    const double f0 = dens[cell];
    const double f1 = dens[cell + 1];
    const double m = std::max(0.0, level - cdf[cell]);
    // F(xi) = f0 xi + (f1 - f0) xi^2 / (2h) on [0, h]; the citardauq root is
    // stable for every sign of the quadratic coefficient
    const double a2 = (f1 - f0) / (2.0 * h);
    const double disc = std::max(0.0, f0 * f0 + 4.0 * a2 * m);
    const double denom = f0 + std::sqrt(disc);
    double xi = denom > 0.0 ? 2.0 * m / denom : 0.0;
    xi = std::clamp(xi, 0.0, h);
    q[i] = nodes[cell] + xi;
  }
  return q;
}

ComplexMatrix positive_with_spectrum(const SpectralMeasure& mu, int k,
                                     RngStream& rng) {
  if (k <= 0) fail("positive_with_spectrum: k must be positive");
  if (!mu.nonnegative_support(1e-12)) {
    fail("positive_with_spectrum: the measure must be supported on [0, inf)");
  }
  if (mu.is_atomic() && mu.atoms().size() == 1) {
    return mu.atoms().front().location * ComplexMatrix::Identity(k, k);
  }
  const std::vector<double> q = spectral_quantiles(mu, k);
  const ComplexMatrix u = haar_unitary(k, rng);
  Eigen::VectorXd d(k);
  for (int i = 0; i < k; ++i) d(i) = q[i];
  ComplexMatrix p = u * d.asDiagonal() * u.adjoint();
  // exact Hermitian symmetrization of the floating-point product
  p = 0.5 * (p + p.adjoint()).eval();
  return p;
}

ComplexMatrix rdiag_sample(const SpectralMeasure& mu_b, int k, RngStream& rng) {
  RngStream u_rng(rng.seed(),
                  RngStream::child_stream(rng.stream_id(), 1));
  RngStream p_rng(rng.seed(),
                  RngStream::child_stream(rng.stream_id(), 2));
  const ComplexMatrix u = haar_unitary(k, u_rng);
  const ComplexMatrix p = positive_with_spectrum(mu_b, k, p_rng);
  return u * p;
}

MomentEstimate mixed_moment_estimate(
    const std::vector<std::vector<ComplexMatrix>>& samples,
    const StarWord& word) {
  if (samples.empty()) fail("mixed_moment_estimate: no samples given");
  Complex sum(0.0, 0.0);
  double sum_sq = 0.0;  // of |value|^2
  std::vector<Complex> values;
  values.reserve(samples.size());
  for (const auto& tuple : samples) {
    if (tuple.empty()) fail("mixed_moment_estimate: empty tuple");
    const int k = static_cast<int>(tuple.front().rows());
    ComplexMatrix prod = ComplexMatrix::Identity(k, k);
    for (const auto& letter : word) {
      if (letter.symbol < 0 ||
          letter.symbol >= static_cast<int>(tuple.size())) {
        fail("mixed_moment_estimate: word symbol outside the tuple");
      }
      const ComplexMatrix& m = tuple[letter.symbol];
      if (m.rows() != k || m.cols() != k) {
        fail("mixed_moment_estimate: matrices must share one square size");
      }
      if (letter.starred) {
        prod = prod * m.adjoint();
      } else {
        prod = prod * m;
      }
    }
    const Complex v = prod.trace() / static_cast<double>(k);
    values.push_back(v);
    sum += v;
  }
  const std::size_t n = values.size();
  MomentEstimate est;
  est.n_samples = n;
  est.mean = sum / static_cast<double>(n);
  if (n > 1) {
    for (const Complex& v : values) sum_sq += std::norm(v - est.mean);
    est.standard_error = std::sqrt(sum_sq / (static_cast<double>(n - 1) *
                                             static_cast<double>(n)));
  }
  return est;
}

FreenessAccumulator::FreenessAccumulator(std::vector<double> diagonal,
                                         int order)
    : diag_(std::move(diagonal)), order_(order) {
  if (order_ < 1 || order_ > 6) {
    fail("freeness: order must be in [1, 6]");
  }
  if (diag_.empty()) fail("freeness: empty diagonal");

  const int k = static_cast<int>(diag_.size());
  // moments of the diagonal, exact
  std::vector<double> mom(order_ + 1, 0.0);
  mom[0] = 1.0;
  for (int j = 1; j <= order_; ++j) {
    double s = 0.0;
    for (double d : diag_) s += std::pow(d, j);
    mom[j] = s / k;
  }
  const MomentTable d_table(
      order_, [&mom](const StarWord& w) { return Complex(mom[w.size()], 0.0); });
  const CumulantTable kd = moments_to_cumulants(d_table);
  const CumulantTable ku = moments_to_cumulants(haar_unitary_table(order_));

  const auto words = alternating_words(order_);
  sums_.assign(words.size(), Complex(0.0, 0.0));
  predictions_.resize(words.size());
  for (std::size_t w = 0; w < words.size(); ++w) {
    predictions_[w] = free_product_moment(ku, kd, colored_word(words[w]));
  }
}

void FreenessAccumulator::add(const ComplexMatrix& u) {
  const int k = static_cast<int>(diag_.size());
  if (u.rows() != k || u.cols() != k) {
    fail("freeness: unitary size does not match the diagonal");
  }
  std::vector<Eigen::VectorXd> dpow(3);
  dpow[0] = Eigen::VectorXd::Ones(k);
  dpow[1] = Eigen::Map<const Eigen::VectorXd>(diag_.data(), k);
  dpow[2] = dpow[1].cwiseProduct(dpow[1]);
  const ComplexMatrix ua = u.adjoint();
  const auto words = alternating_words(order_);
  for (std::size_t w = 0; w < words.size(); ++w) {
    sums_[w] += word_trace(words[w], u, ua, dpow);
  }
  ++n_samples_;
}

void FreenessAccumulator::merge(const FreenessAccumulator& other) {
  if (other.order_ != order_ || other.diag_ != diag_) {
    fail("freeness: accumulators disagree on diagonal or order");
  }
  for (std::size_t w = 0; w < sums_.size(); ++w) sums_[w] += other.sums_[w];
  n_samples_ += other.n_samples_;
}

double FreenessAccumulator::defect() const {
  if (n_samples_ == 0) {
    throw std::logic_error("freeness: defect requested before any sample");
  }
  double worst = 0.0;
  for (std::size_t w = 0; w < sums_.size(); ++w) {
    const Complex mean = sums_[w] / static_cast<double>(n_samples_);
    worst = std::max(worst, std::abs(mean - predictions_[w]));
  }
  return worst;
}

double freeness_defect(const std::vector<ComplexMatrix>& u_samples,
                       const std::vector<ComplexMatrix>& b_samples,
                       int order) {
  if (u_samples.empty()) fail("freeness_defect: no unitary samples");
  if (b_samples.empty()) fail("freeness_defect: no b samples");
  if (b_samples.size() != 1 && b_samples.size() != u_samples.size()) {
    fail("freeness_defect: b_samples must have one entry or match u_samples");
  }

  const auto diagonal_of = [](const ComplexMatrix& b) {
    const int k = static_cast<int>(b.rows());
    if (b.cols() != k) fail("freeness_defect: b must be square");
    double scale = 1.0;
    for (int i = 0; i < k; ++i) scale = std::max(scale, std::abs(b(i, i)));
    std::vector<double> d(k);
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) {
        if (i != j && std::abs(b(i, j)) > 1e-12 * scale) {
          fail("freeness_defect: b must be diagonal (conjugate it into its "
               "eigenbasis first; this replaces u by another Haar unitary "
               "and changes no mixed moment's law)");
        }
      }
      if (std::abs(b(i, i).imag()) > 1e-12 * scale) {
        fail("freeness_defect: b must be real diagonal");
      }
      d[i] = b(i, i).real();
    }
    return d;
  };

  const std::vector<double> d0 = diagonal_of(b_samples.front());
  for (std::size_t s = 1; s < b_samples.size(); ++s) {
    if (diagonal_of(b_samples[s]) != d0) {
      fail("freeness_defect: all b samples must share one diagonal");
    }
  }

  FreenessAccumulator acc(d0, order);
  for (const auto& u : u_samples) acc.add(u);
  return acc.defect();
}

}  // namespace fplab
