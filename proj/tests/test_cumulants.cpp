#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "fplab/cumulants.hpp"
#include "fplab/laws.hpp"
#include "fplab/serialize.hpp"
#include "fplab/spectral_measure.hpp"

using fplab::CumulantTable;
using fplab::MomentTable;
using fplab::StarLetter;
using fplab::StarWord;
using Complex = std::complex<double>;

namespace {

double table_max_diff(const MomentTable& a, const MomentTable& b) {
  double worst = 0.0;
  for (int len = 1; len <= a.order(); ++len) {
    for (unsigned mask = 0; mask < (1u << len); ++mask) {
      worst = std::max(worst, std::abs(a.at(len, mask) - b.at(len, mask)));
    }
  }
  return worst;
}

StarWord word(const std::string& text) { return fplab::word_from_string(text); }

}  // namespace

TEST_CASE("non-crossing partition counts are the Catalan numbers") {
  const int catalan[] = {1, 1, 2, 5, 14, 42, 132};
  for (int n = 1; n <= 6; ++n) {
    CHECK(static_cast<int>(fplab::enumerate_nc(n).size()) == catalan[n]);
  }
}

TEST_CASE("semicircular cumulants vanish beyond order two") {
  const MomentTable m = fplab::semicircular_table(6, 0.0, 1.0);
  const CumulantTable c = fplab::moments_to_cumulants(m);
  CHECK(std::abs(c.at(word("zz")) - 1.0) < 1e-12);
  for (const char* w : {"x", "xxx", "xxxx", "xxxxx", "xxxxxx"}) {
    StarWord sw;
    for (const char* p = w; *p; ++p) sw.push_back({0, false});
    CHECK(std::abs(c.at(sw)) < 1e-12);
  }
  // semicircle moments are the Catalan numbers
  CHECK(std::abs(m.at(word("zzzz")) - 2.0) < 1e-12);
  CHECK(std::abs(m.at(word("zzzzzz")) - 5.0) < 1e-12);
}

TEST_CASE("circular cumulants are the two alternating pair cumulants") {
  const CumulantTable c =
      fplab::moments_to_cumulants(fplab::circular_table(6, 1.0));
  CHECK(std::abs(c.at(word("zZ")) - 1.0) < 1e-12);
  CHECK(std::abs(c.at(word("Zz")) - 1.0) < 1e-12);
  CHECK(std::abs(c.at(word("zz"))) < 1e-12);
  CHECK(std::abs(c.at(word("zzZ"))) < 1e-12);
  CHECK(std::abs(c.at(word("zZzZ"))) < 1e-12);
}

TEST_CASE("circular *-moments count bipartite non-crossing pairings") {
  const MomentTable m = fplab::circular_table(8, 1.0);
  // tau((zz*)^n) = Catalan(n)
  CHECK(std::abs(m.at(word("zZ")) - 1.0) < 1e-12);
  CHECK(std::abs(m.at(word("zZzZ")) - 2.0) < 1e-12);
  CHECK(std::abs(m.at(word("zZzZzZ")) - 5.0) < 1e-12);
  CHECK(std::abs(m.at(word("zZzZzZzZ")) - 14.0) < 1e-12);
  // odd or unbalanced words vanish
  CHECK(std::abs(m.at(word("z"))) < 1e-12);
  CHECK(std::abs(m.at(word("zzZ"))) < 1e-12);
  CHECK(std::abs(m.at(word("zzzz"))) < 1e-12);
  // tau(z^2 (z*)^2) = 1: only one non-crossing bipartite pairing
  CHECK(std::abs(m.at(word("zzZZ")) - 1.0) < 1e-12);
}

TEST_CASE("brute-force moment-cumulant recursion check at order four") {
  // tau(zz*zz*) = sum over NC({1..4}) of products of cumulants; with only
  // the two alternating pair cumulants alive this is kappa(z z*) kappa(z z*)
  // [blocks {12}{34}] + kappa(z z*) kappa(z* z) [blocks {14}{23}] = 2
  const CumulantTable c =
      fplab::moments_to_cumulants(fplab::circular_table(4, 1.0));
  const Complex k12 = c.at(word("zZ"));
  const Complex k21 = c.at(word("Zz"));
  const Complex expected = k12 * k12 + k12 * k21;
  CHECK(std::abs(fplab::circular_table(4, 1.0).at(word("zZzZ")) - expected) <
        1e-12);
}

TEST_CASE("moment-cumulant round trips are exact across the corpus") {
  const std::vector<MomentTable> corpus = {
      fplab::circular_table(6, 1.0),
      fplab::circular_table(6, 0.25),
      fplab::haar_unitary_table(6),
      fplab::semicircular_table(6, 0.0, 1.0),
      fplab::elliptic_table(6, 0.5),
      fplab::point_table(6, Complex(0.7, 0.2)),
      fplab::shifted_circular_table(6, Complex(0.5, 0.0), 1.0),
      fplab::measure_table(6, fplab::laws::arcsine(2048)),
  };
  for (const MomentTable& m : corpus) {
    CHECK(table_max_diff(
              fplab::cumulants_to_moments(fplab::moments_to_cumulants(m)), m) <
          1e-12);
  }
}

TEST_CASE("Haar unitary table has vanishing powers and unit alternations") {
  const MomentTable h = fplab::haar_unitary_table(6);
  CHECK(std::abs(h.at(word("z"))) < 1e-15);
  CHECK(std::abs(h.at(word("zz"))) < 1e-15);
  CHECK(std::abs(h.at(word("zzz"))) < 1e-15);
  CHECK(std::abs(h.at(word("zZ")) - 1.0) < 1e-15);
  CHECK(std::abs(h.at(word("zZzZ")) - 1.0) < 1e-15);
}

TEST_CASE("R-diagonality detector classifies the ten-table corpus") {
  const auto qc = fplab::laws::quarter_circle(2048);
  const auto mp = fplab::laws::marchenko_pastur(1.0, 2048);
  const std::vector<std::pair<bool, MomentTable>> corpus = {
      {true, fplab::circular_table(6, 1.0)},
      {true, fplab::circular_table(6, 0.25)},
      {true, fplab::haar_unitary_table(6)},
      {true, fplab::haar_multiply(fplab::measure_table(6, qc))},
      {true, fplab::haar_multiply(fplab::measure_table(6, mp))},
      {false, fplab::point_table(6, Complex(0.7, 0.2))},
      {false, fplab::shifted_circular_table(6, Complex(0.5, 0.0), 1.0)},
      {false, fplab::elliptic_table(6, 0.5)},
      {false, fplab::semicircular_table(6, 0.0, 1.0)},
      {false, fplab::measure_table(6, fplab::laws::arcsine(2048))},
  };
  for (const auto& [expected, table] : corpus) {
    const fplab::RDiagonalReport rep = fplab::is_r_diagonal(table, 1e-9);
    CHECK(rep.r_diagonal == expected);
    if (!expected) CHECK(rep.worst_magnitude > 1e-9);
  }
}

TEST_CASE("detector agreement with the Haar-multiply fixed point") {
  const std::vector<MomentTable> corpus = {
      fplab::circular_table(6, 1.0),
      fplab::haar_unitary_table(6),
      fplab::elliptic_table(6, 0.5),
      fplab::semicircular_table(6, 0.0, 1.0),
      fplab::point_table(6, Complex(0.7, 0.2)),
  };
  for (const MomentTable& m : corpus) {
    const bool by_detector = fplab::is_r_diagonal(m, 1e-9).r_diagonal;
    const bool by_fixed_point =
        table_max_diff(fplab::haar_multiply(m), m) < 1e-9;
    CHECK(by_detector == by_fixed_point);
  }
}

TEST_CASE("haar_multiply fixes R-diagonal tables and preserves tau((zz*)^n)") {
  const MomentTable circ = fplab::circular_table(6, 1.0);
  CHECK(table_max_diff(fplab::haar_multiply(circ), circ) < 1e-12);
  const MomentTable haar = fplab::haar_unitary_table(6);
  CHECK(table_max_diff(fplab::haar_multiply(haar), haar) < 1e-12);

  // on any input the *-distribution of |z|^2 powers is untouched
  const MomentTable ell = fplab::elliptic_table(6, 0.5);
  const MomentTable mult = fplab::haar_multiply(ell);
  CHECK(std::abs(mult.at(word("zZ")) - ell.at(word("zZ"))) < 1e-12);
  CHECK(std::abs(mult.at(word("zZzZ")) - ell.at(word("zZzZ"))) < 1e-12);
  CHECK(std::abs(mult.at(word("zZzZzZ")) - ell.at(word("zZzZzZ"))) <
        1e-12);
  // and the output is R-diagonal
  CHECK(fplab::is_r_diagonal(mult, 1e-9).r_diagonal);
}

TEST_CASE("free product moments recover the anticommutator spectrum data") {
  // tau((u b)(u b)*) with u Haar and b = quarter-circle positive part is
  // tau(b^2) = 1; computed through the colored free-product evaluator
  const fplab::MomentTable qc_moments =
      fplab::measure_table(4, fplab::laws::quarter_circle(2048));
  const CumulantTable haar =
      fplab::moments_to_cumulants(fplab::haar_unitary_table(4));
  const CumulantTable qc = fplab::moments_to_cumulants(qc_moments);
  const std::vector<fplab::ColoredStarLetter> zzstar = {
      {0, false}, {1, false}, {1, false}, {0, true}};
  // u b b u*: u is unitary, so the word collapses to b b and the mixed
  // moment must reproduce the quadrature table's own entry exactly
  const Complex v = fplab::free_product_moment(haar, qc, zzstar);
  const Complex bb = qc_moments.at(fplab::word_from_string("zz"));
  CHECK(std::abs(v - bb) < 1e-12);
  CHECK(std::abs(v - Complex(1.0, 0.0)) < 1e-5);
}

TEST_CASE("gamma_split balances the rotated real and imaginary parts") {
  const fplab::GammaSplit g = fplab::gamma_split(fplab::elliptic_table(2, 0.5));
  CHECK(g.purely_imaginary);
  CHECK(g.tau_xx == doctest::Approx(g.tau_yy).epsilon(1e-10));
  CHECK(std::abs(g.rotated_second_moment.real()) < 1e-10);
  // X and Y carry the whole variance: tau_xx + tau_yy = tau(zz*) = 1
  CHECK(g.tau_xx + g.tau_yy == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("moment tables survive the CSV round trip bit for bit") {
  const MomentTable m = fplab::elliptic_table(4, 0.5);
  const std::string csv = fplab::table_to_csv(m);
  const MomentTable back = fplab::table_from_csv(csv);
  REQUIRE(back.order() == m.order());
  CHECK(table_max_diff(back, m) == 0.0);
  CHECK(fplab::table_to_csv(back) == csv);
}

TEST_CASE("word round trip through text") {
  for (const char* text : {"z", "Z", "zZz", "ZZzz"}) {
    CHECK(fplab::word_to_string(fplab::word_from_string(text)) == text);
  }
}
