#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "fplab/cumulants.hpp"
#include "fplab/laws.hpp"
#include "fplab/random_models.hpp"
#include "fplab/rng.hpp"
#include "fplab/spectral_measure.hpp"

using fplab::ComplexMatrix;
using fplab::RngStream;
using fplab::SpectralMeasure;
using Complex = std::complex<double>;

TEST_CASE("haar_unitary samples are unitary and deterministic per stream") {
  RngStream rng(601, 0);
  for (int k : {1, 2, 16, 64}) {
    const ComplexMatrix u = fplab::haar_unitary(k, rng);
    CHECK((u.adjoint() * u - ComplexMatrix::Identity(k, k))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
  }
  RngStream a(602, 3), b(602, 3);
  CHECK(fplab::haar_unitary(8, a) == fplab::haar_unitary(8, b));
}

TEST_CASE("haar distribution is invariant under left translation") {
  // tau-moments of u and v u agree for fixed unitary v: compare the mean
  // normalized trace over matched sample sets
  const int k = 8;
  const int n = 4000;
  RngStream rng(603, 0);
  RngStream rng_fixed(603, 1);
  const ComplexMatrix v = fplab::haar_unitary(k, rng_fixed);
  Complex mean_u = 0.0, mean_vu = 0.0;
  for (int i = 0; i < n; ++i) {
    const ComplexMatrix u = fplab::haar_unitary(k, rng);
    mean_u += u.trace() / static_cast<double>(k);
    mean_vu += (v * u).trace() / static_cast<double>(k);
  }
  CHECK(std::abs(mean_u / static_cast<double>(n)) < 0.02);
  CHECK(std::abs(mean_vu / static_cast<double>(n)) < 0.02);
}

TEST_CASE("ginibre second moments match the variance parameter") {
  const int k = 32;
  const int n = 200;
  const double sigma2 = 1.0 / k;  // normalized so tau(g g*) ~ 1
  RngStream rng(604, 0);
  double second = 0.0;
  for (int i = 0; i < n; ++i) {
    const ComplexMatrix g = fplab::ginibre(k, sigma2, rng);
    second += (g * g.adjoint()).trace().real() / k;
  }
  CHECK(second / n == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("spectral_quantiles reproduce atomic spectra exactly") {
  const SpectralMeasure two =
      fplab::SpectralMeasure::from_atoms({{1.0, 0.5}, {3.0, 0.5}});
  const std::vector<double> q = fplab::spectral_quantiles(two, 4);
  REQUIRE(q.size() == 4);
  CHECK(q[0] == doctest::Approx(1.0));
  CHECK(q[1] == doctest::Approx(1.0));
  CHECK(q[2] == doctest::Approx(3.0));
  CHECK(q[3] == doctest::Approx(3.0));
}

TEST_CASE("quantile spectra converge to the law's moments") {
  const SpectralMeasure qc = fplab::laws::quarter_circle(4096);
  const std::vector<double> q = fplab::spectral_quantiles(qc, 512);
  double m2 = 0.0, m4 = 0.0;
  for (double x : q) {
    m2 += x * x;
    m4 += x * x * x * x;
  }
  CHECK(m2 / q.size() == doctest::Approx(1.0).epsilon(0.01));
  CHECK(m4 / q.size() == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("positive_with_spectrum carries exactly the quantile spectrum") {
  const SpectralMeasure qc = fplab::laws::quarter_circle(2048);
  RngStream rng(605, 0);
  const int k = 16;
  const ComplexMatrix p = fplab::positive_with_spectrum(qc, k, rng);
  const SpectralMeasure spec = fplab::esd(p, true);
  const std::vector<double> q = fplab::spectral_quantiles(qc, k);
  REQUIRE(static_cast<int>(spec.atoms().size()) <= k);
  // eigenvalues of p sorted equal the quantiles within solver tolerance
  std::vector<double> eigs;
  for (const auto& a : spec.atoms()) {
    const int copies = static_cast<int>(std::lround(a.weight * k));
    for (int c = 0; c < copies; ++c) eigs.push_back(a.location);
  }
  REQUIRE(eigs.size() == q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    CHECK(eigs[i] == doctest::Approx(q[i]).epsilon(1e-10));
  }
}

TEST_CASE("mixed_moment_estimate evaluates word traces exactly") {
  ComplexMatrix a(2, 2);
  a << Complex(1.0, 0.0), Complex(0.0, 1.0), Complex(2.0, 0.0),
      Complex(0.0, -1.0);
  const std::vector<std::vector<ComplexMatrix>> samples = {{a}};
  const fplab::StarWord w = fplab::word_from_string("zZ");
  const fplab::MomentEstimate est = fplab::mixed_moment_estimate(samples, w);
  const Complex direct = (a * a.adjoint()).trace() / 2.0;
  CHECK(std::abs(est.mean - direct) < 1e-14);
  CHECK(est.standard_error == 0.0);  // single sample
}

TEST_CASE("rdiag samples reproduce free mixed moments") {
  const SpectralMeasure qc = fplab::laws::quarter_circle(2048);
  const int k = 16;
  const std::size_t n = 50;
  std::vector<std::vector<ComplexMatrix>> samples;
  for (std::size_t i = 0; i < n; ++i) {
    RngStream rng(606, RngStream::child_stream(0, i));
    samples.push_back({fplab::rdiag_sample(qc, k, rng)});
  }
  // prediction built from the exact sampled spectrum (the k quantiles)
  std::vector<fplab::Atom> atoms;
  for (double q : fplab::spectral_quantiles(qc, k)) {
    atoms.push_back({q, 1.0 / k});
  }
  const fplab::MomentTable predicted = fplab::haar_multiply(
      fplab::measure_table(2, fplab::SpectralMeasure::from_atoms(atoms)));
  for (const char* text : {"z", "zz", "zZ"}) {
    const fplab::StarWord w = fplab::word_from_string(text);
    const fplab::MomentEstimate est = fplab::mixed_moment_estimate(samples, w);
    CHECK(std::abs(est.mean - predicted.at(w)) <
          0.05 + 5.0 * est.standard_error);
  }
}

TEST_CASE("freeness defect decreases with matrix size") {
  const SpectralMeasure qc = fplab::laws::quarter_circle(2048);
  const std::size_t n = 400;
  auto defect_at = [&](int k, std::uint64_t stream) {
    fplab::FreenessAccumulator acc(fplab::spectral_quantiles(qc, k), 4);
    RngStream rng(607, stream);
    for (std::size_t i = 0; i < n; ++i) acc.add(fplab::haar_unitary(k, rng));
    return acc.defect();
  };
  const double d8 = defect_at(8, 0);
  const double d32 = defect_at(32, 1);
  CHECK(d32 < 0.05);
  CHECK(d32 < d8);
}

TEST_CASE("freeness accumulators merge exactly") {
  const SpectralMeasure qc = fplab::laws::quarter_circle(1024);
  const int k = 8;
  fplab::FreenessAccumulator whole(fplab::spectral_quantiles(qc, k), 4);
  fplab::FreenessAccumulator part_a(fplab::spectral_quantiles(qc, k), 4);
  fplab::FreenessAccumulator part_b(fplab::spectral_quantiles(qc, k), 4);
  RngStream rng_whole(608, 0);
  RngStream rng_split(608, 0);
  for (int i = 0; i < 10; ++i) whole.add(fplab::haar_unitary(k, rng_whole));
  for (int i = 0; i < 6; ++i) part_a.add(fplab::haar_unitary(k, rng_split));
  for (int i = 0; i < 4; ++i) part_b.add(fplab::haar_unitary(k, rng_split));
  part_a.merge(part_b);
  CHECK(part_a.n_samples() == whole.n_samples());
  CHECK(part_a.defect() == doctest::Approx(whole.defect()).epsilon(1e-14));
}
