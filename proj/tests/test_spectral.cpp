#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "fplab/laws.hpp"
#include "fplab/rng.hpp"
#include "fplab/spectral_measure.hpp"

using fplab::Atom;
using fplab::ComplexMatrix;
using fplab::FunctionSpec;
using fplab::SpectralMeasure;

TEST_CASE("atomic and grid measures normalize to total mass one") {
  const SpectralMeasure a =
      SpectralMeasure::from_atoms({{0.0, 0.25}, {1.0, 0.75}});
  CHECK(a.moments(0)[0] == doctest::Approx(1.0).epsilon(1e-14));

  const SpectralMeasure u = fplab::laws::uniform(-1.0, 2.0, 512);
  CHECK(u.moments(0)[0] == doctest::Approx(1.0).epsilon(1e-12));
  const auto& nodes = u.nodes();
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    CHECK(nodes[i] > nodes[i - 1]);
  }
}

TEST_CASE("moments of standard laws match closed forms") {
  const auto sc = fplab::laws::semicircle(1.0, 4096).moments(4);
  CHECK(sc[1] == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(sc[2] == doctest::Approx(1.0).epsilon(1e-6));   // variance
  CHECK(sc[4] == doctest::Approx(2.0).epsilon(1e-5));   // Catalan C_2

  const auto qc = fplab::laws::quarter_circle(4096).moments(4);
  CHECK(qc[2] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(qc[4] == doctest::Approx(2.0).epsilon(1e-5));

  const auto arc = fplab::laws::arcsine(4096).moments(4);
  CHECK(arc[2] == doctest::Approx(2.0).epsilon(1e-5));  // tau((u+u*)^2)
  CHECK(arc[4] == doctest::Approx(6.0).epsilon(1e-4));  // tau((u+u*)^4)

  const auto mp = fplab::laws::marchenko_pastur(1.0, 4096).moments(3);
  CHECK(mp[1] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(mp[2] == doctest::Approx(2.0).epsilon(1e-5));
  CHECK(mp[3] == doctest::Approx(5.0).epsilon(1e-4));   // Catalan numbers
}

TEST_CASE("pushforward under catalog maps acts on atoms exactly") {
  const SpectralMeasure a =
      SpectralMeasure::from_atoms({{0.5, 0.5}, {2.0, 0.5}});
  const SpectralMeasure b = pushforward(a, FunctionSpec::affine(3.0));
  REQUIRE(b.is_atomic());
  CHECK(b.atoms()[0].location == doctest::Approx(1.5));
  CHECK(b.atoms()[1].location == doctest::Approx(6.0));
  // catalog maps must fix 0, so a nonzero offset is rejected
  CHECK_THROWS_AS(FunctionSpec::affine(3.0, 1.0), std::invalid_argument);
}

TEST_CASE("pushforward preserves moments through the change of variables") {
  const SpectralMeasure u = fplab::laws::uniform(0.25, 1.75, 4096);

  // power(2): int t^2 du = int s d(push u)
  const SpectralMeasure sq = pushforward(u, FunctionSpec::power(2.0));
  CHECK(sq.moments(1)[1] == doctest::Approx(u.moments(2)[2]).epsilon(1e-8));

  // affine: mean scales linearly
  const SpectralMeasure sh = pushforward(u, FunctionSpec::affine(2.0));
  CHECK(sh.moments(1)[1] ==
        doctest::Approx(2.0 * u.moments(1)[1]).epsilon(1e-10));

  // compose(power(2), affine(2)) = (2t)^2
  const SpectralMeasure comp = pushforward(
      u, FunctionSpec::compose(FunctionSpec::power(2.0),
                               FunctionSpec::affine(2.0)));
  CHECK(comp.moments(1)[1] ==
        doctest::Approx(4.0 * u.moments(2)[2]).epsilon(1e-8));

  // the inverse of exp_shift undoes it (and equals log_shift)
  const SpectralMeasure round =
      pushforward(pushforward(u, FunctionSpec::exp_shift(0.5)),
                  FunctionSpec::exp_shift(0.5).inverse());
  CHECK(round.moments(1)[1] == doctest::Approx(u.moments(1)[1]).epsilon(1e-6));
  const FunctionSpec inv = FunctionSpec::exp_shift(0.5).inverse();
  const FunctionSpec direct = FunctionSpec::log_shift(0.5);
  for (double t : {0.1, 0.7, 2.3}) {
    CHECK(inv(t) == doctest::Approx(direct(t)).epsilon(1e-13));
    CHECK(inv.derivative(t) ==
          doctest::Approx(direct.derivative(t)).epsilon(1e-13));
    CHECK(inv.inverse_at(inv(t)) == doctest::Approx(t).epsilon(1e-10));
  }
}

TEST_CASE("dilate scales moments homogeneously") {
  const SpectralMeasure qc = fplab::laws::quarter_circle(2048);
  const SpectralMeasure d = qc.dilate(3.0);
  CHECK(d.moments(2)[2] == doctest::Approx(9.0 * qc.moments(2)[2]).epsilon(1e-10));
  CHECK(d.moments(1)[1] == doctest::Approx(3.0 * qc.moments(1)[1]).epsilon(1e-10));
}

TEST_CASE("symmetrize halves the mass to each side and is idempotent") {
  const SpectralMeasure qc = fplab::laws::quarter_circle(2048);
  const SpectralMeasure s = symmetrize(qc);
  CHECK(s.moments(1)[1] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(s.moments(2)[2] == doctest::Approx(qc.moments(2)[2]).epsilon(1e-10));

  const SpectralMeasure ss = symmetrize(s);
  REQUIRE(ss.nodes().size() == s.nodes().size());
  for (std::size_t i = 0; i < s.nodes().size(); ++i) {
    CHECK(ss.nodes()[i] == s.nodes()[i]);
    CHECK(ss.density()[i] == s.density()[i]);
  }

  const SpectralMeasure atoms =
      SpectralMeasure::from_atoms({{0.5, 0.25}, {1.5, 0.75}});
  const SpectralMeasure sa = symmetrize(atoms);
  REQUIRE(sa.is_atomic());
  CHECK(sa.moments(1)[1] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(sa.moments(2)[2] ==
        doctest::Approx(atoms.moments(2)[2]).epsilon(1e-15));
}

TEST_CASE("empirical spectral distribution of a fixed matrix") {
  ComplexMatrix h(2, 2);
  h << 3.0, 0.0, 0.0, -1.0;
  const SpectralMeasure mu = fplab::esd(h, true);
  REQUIRE(mu.is_atomic());
  REQUIRE(mu.atoms().size() == 2);
  CHECK(mu.atoms()[0].location == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(mu.atoms()[1].location == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(mu.atoms()[0].weight == doctest::Approx(0.5));

  // non-self-adjoint path: a general eigensolve is accepted when the
  // spectrum is real, so diag(-2) yields the eigenvalue atom at -2
  ComplexMatrix a(1, 1);
  a << -2.0;
  const SpectralMeasure sv = fplab::esd(a, false);
  REQUIRE(sv.is_atomic());
  CHECK(sv.atoms()[0].location == doctest::Approx(-2.0).epsilon(1e-14));
}

TEST_CASE("measure_moments agrees with the member function") {
  const SpectralMeasure u = fplab::laws::uniform(0.0, 1.0, 1024);
  const auto a = fplab::measure_moments(u, 3);
  const auto b = u.moments(3);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-14));
  }
}

TEST_CASE("law lookup by name matches the direct constructors") {
  const SpectralMeasure direct = fplab::laws::uniform(0.0, 2.0, 256);
  const SpectralMeasure named = fplab::laws::by_name("uniform", {0.0, 2.0}, 256);
  REQUIRE(named.nodes().size() == direct.nodes().size());
  CHECK(named.nodes()[100] == direct.nodes()[100]);
  CHECK_THROWS_AS(fplab::laws::by_name("no_such_law", {}, 64),
                  std::invalid_argument);
}
