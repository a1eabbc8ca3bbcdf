#include <doctest.h>

#include <cmath>
#include <limits>

#include "fplab/experiments.hpp"
#include "fplab/polar_geometry.hpp"
#include "fplab/random_models.hpp"
#include "fplab/rng.hpp"

using fplab::ComplexMatrix;
using fplab::RngStream;

namespace {

ComplexMatrix random_positive(int k, RngStream& rng) {
  const ComplexMatrix g = fplab::ginibre(k, 1.0, rng);
  ComplexMatrix p = g * g.adjoint();
  p += 0.1 * ComplexMatrix::Identity(k, k);
  return p;
}

}  // namespace

TEST_CASE("both analytic Jacobian formulas agree exactly") {
  RngStream rng(501, 0);
  for (int k : {1, 2, 3, 5, 8}) {
    for (int rep = 0; rep < 5; ++rep) {
      const ComplexMatrix p = random_positive(k, rng);
      CHECK(fplab::jacobian_dp(p) == fplab::jacobian_ds(p));
    }
  }
}

TEST_CASE("k = 1 Jacobian has the closed form -log 2 + log 2r") {
  ComplexMatrix p(1, 1);
  for (double r : {0.3, 1.0, 4.5}) {
    p(0, 0) = r;
    CHECK(fplab::jacobian_ds(p) ==
          doctest::Approx(-std::log(2.0) + std::log(2.0 * r)).epsilon(1e-14));
  }
}

TEST_CASE("analytic Jacobian matches central finite differences") {
  RngStream rng(502, 0);
  for (int k : {1, 2, 3}) {
    for (int rep = 0; rep < 5; ++rep) {
      const ComplexMatrix p = random_positive(k, rng);
      const ComplexMatrix u = fplab::haar_unitary(k, rng);
      const double analytic = fplab::jacobian_ds(p);
      const double fd = fplab::experiments::fd_log_jacobian(u, p);
      CHECK(std::abs(fd - analytic) / std::max(1.0, std::abs(analytic)) < 1e-4);
    }
  }
}

TEST_CASE("the Jacobian depends only on the spectrum of the positive part") {
  RngStream rng(503, 0);
  const int k = 4;
  const ComplexMatrix p = random_positive(k, rng);
  const ComplexMatrix u = fplab::haar_unitary(k, rng);
  const ComplexMatrix conj = u * p * u.adjoint();
  CHECK(fplab::jacobian_ds(conj) ==
        doctest::Approx(fplab::jacobian_ds(p)).epsilon(1e-10));
}

TEST_CASE("a singular positive part sends the Jacobian to minus infinity") {
  ComplexMatrix p = ComplexMatrix::Zero(2, 2);
  p(0, 0) = 1.0;
  CHECK(fplab::jacobian_ds(p) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("unitary-group volumes match closed forms at small k") {
  CHECK(fplab::volume_ck(1) == doctest::Approx(std::log(2.0 * M_PI)).epsilon(1e-12));
  CHECK(fplab::volume_ck(2) ==
        doctest::Approx(3.0 * std::log(2.0 * M_PI)).epsilon(1e-12));
}

TEST_CASE("the normalized volume residual decays toward zero") {
  const double r1 = fplab::limck_residual(1);
  CHECK(r1 == doctest::Approx(0.1689).epsilon(1e-3));
  double prev = std::numeric_limits<double>::infinity();
  for (int k : {1, 10, 100, 1000, 10000}) {
    const double r = std::abs(fplab::limck_residual(k));
    CHECK(r < prev);
    prev = r;
  }
  CHECK(prev < 0.01);
}

TEST_CASE("polar decomposition reconstructs the input") {
  RngStream rng(504, 0);
  for (int k : {1, 2, 5}) {
    const ComplexMatrix a = fplab::ginibre(k, 1.0, rng);
    const fplab::PolarPair vp = fplab::polar_decompose(a);
    CHECK((vp.v * vp.p - a).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((vp.v.adjoint() * vp.v - ComplexMatrix::Identity(k, k))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
    // p = (a* a)^{1/2} is positive semidefinite Hermitian
    CHECK((vp.p - vp.p.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
  }

  // the worked 1 x 1 example: diag(-2) = (-1) * (2)
  ComplexMatrix a(1, 1);
  a << -2.0;
  const fplab::PolarPair vp = fplab::polar_decompose(a);
  CHECK(vp.v(0, 0).real() == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(vp.p(0, 0).real() == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("polar coordinates push the Gaussian to the predicted density") {
  RngStream rng_main(505, 0);
  const fplab::PushCheckReport rep =
      fplab::push_measure_check(2, 20000, rng_main);
  CHECK(rep.pass);
  CHECK(rep.test_name == "chi_square");

  RngStream rng_ctrl(505, 1);
  const fplab::PushCheckReport ctrl =
      fplab::push_measure_check(2, 20000, rng_ctrl, true);
  CHECK_FALSE(ctrl.pass);

  RngStream rng_ks(505, 2);
  const fplab::PushCheckReport ks =
      fplab::push_measure_check(1, 20000, rng_ks);
  CHECK(ks.pass);
  CHECK(ks.test_name == "ks");
}
