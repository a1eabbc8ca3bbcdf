#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fplab {

// One letter of a *-word: which symbol, and whether it carries a star.
struct StarLetter {
  int symbol = 0;
  bool starred = false;

  friend bool operator==(const StarLetter& a, const StarLetter& b) {
    return a.symbol == b.symbol && a.starred == b.starred;
  }
};

// A *-word; the empty word is the unit.
using StarWord = std::vector<StarLetter>;

// Render a word as text. Symbol i prints as names[i]; a starred letter is
// printed with its first character uppercased ("z" -> "Z").
std::string word_to_string(const StarWord& w,
                           const std::vector<std::string>& names = {"z"});

// Parse a single-symbol word over the alphabet {z, Z} ('Z' = starred).
StarWord word_from_string(const std::string& text);

// A partition of {0,...,n-1} into non-crossing blocks. Blocks are sorted by
// their smallest element and each block lists its elements in increasing
// order.
struct NCPartition {
  std::vector<std::vector<int>> blocks;
};

// All non-crossing partitions of {0,...,n-1}, 1 <= n <= 10. The result is
// cached; the returned reference stays valid for the program lifetime.
const std::vector<NCPartition>& enumerate_nc(int n);

namespace detail {

// Dense storage for values indexed by single-symbol *-words of length
// <= order. A word of length len maps to a bitmask whose bit j is the
// star flag of letter j.
class StarTableStorage {
 public:
  explicit StarTableStorage(int order);

  int order() const { return order_; }

  std::complex<double> at(int len, unsigned mask) const;
  std::complex<double> at(const StarWord& w) const;
  void set_raw(int len, unsigned mask, std::complex<double> v);

  static unsigned word_mask(const StarWord& w);
  static StarWord word_from_mask(int len, unsigned mask);

 protected:
  void check_word(int len, unsigned mask) const;

  int order_;
  std::vector<std::vector<std::complex<double>>> values_;  // [len][mask]
};

}  // namespace detail

// Mixed *-moments of a single element z under a tracial state. Values are
// stored densely for every word of length <= order. Construction closes each
// value over its symmetry orbit (cyclic rotations share the value, the
// star-reversed word gets the conjugate) and rejects inconsistent input;
// the empty word always has value exactly 1.
class MomentTable : public detail::StarTableStorage {
 public:
  // Fills the table by evaluating `values` once per symmetry orbit (on the
  // lexicographically smallest representative) and closing the orbit. When
  // an orbit is star-reversal symmetric the value is projected to its real
  // part, which every tracial *-moment table satisfies exactly.
  MomentTable(int order,
              const std::function<std::complex<double>(const StarWord&)>& values);

  // Builds from explicit entries. Every word of length <= order must be
  // reachable from the given entries by symmetry closure; entries that land
  // on the same slot must agree within an absolute/relative 1e-9 tolerance.
  static MomentTable from_entries(
      int order,
      const std::vector<std::pair<StarWord, std::complex<double>>>& entries);

  // Largest violation of trace symmetry / star compatibility; construction
  // keeps this at 0 by design, so this is a diagnostic for tests.
  double symmetry_defect() const;

 private:
  explicit MomentTable(int order) : StarTableStorage(order) {}
};

// Free cumulants of a single element, same dense layout as MomentTable.
class CumulantTable : public detail::StarTableStorage {
 public:
  explicit CumulantTable(int order) : StarTableStorage(order) {}
};

// Moment-cumulant transforms over the lattice of non-crossing partitions.
// Both directions are exact recursions; order <= 10.
CumulantTable moments_to_cumulants(const MomentTable& m);
MomentTable cumulants_to_moments(const CumulantTable& c);

// Verdict of the R-diagonality test.
struct RDiagonalReport {
  bool r_diagonal = true;
  // Largest |free cumulant| on a word that R-diagonality requires to vanish
  // (anything that is not an even-length strict z / z* alternation).
  double worst_magnitude = 0.0;
  StarWord worst_word;
};

// An element is reported R-diagonal when every free cumulant outside the
// even alternating family has magnitude < tol.
RDiagonalReport is_r_diagonal(const MomentTable& m, double tol);

class SpectralMeasure;

// Standard moment tables.
MomentTable circular_table(int order, double variance = 1.0);
MomentTable haar_unitary_table(int order);
MomentTable semicircular_table(int order, double mean, double variance);
MomentTable point_table(int order, std::complex<double> c);
MomentTable elliptic_table(int order, double rho);
MomentTable shifted_circular_table(int order, std::complex<double> shift,
                                   double variance = 1.0);
// Self-adjoint element distributed according to mu (stars are immaterial).
MomentTable measure_table(int order, const SpectralMeasure& mu);

// *-moments of u z for u a Haar unitary *-free from z. The result is a
// moment table of the same order (order <= 8). R-diagonal elements are
// exactly the fixed points of this map, and tau((w w*)^n) is preserved for
// every n.
MomentTable haar_multiply(const MomentTable& m);

// Letter of a two-family word for the free-product evaluator.
struct ColoredStarLetter {
  int family = 0;  // 0 or 1
  bool starred = false;
};

// Mixed moment of a word in two *-free families, each described by its free
// cumulant table. Blocks are monochromatic (mixed free cumulants vanish);
// evaluated by the first-block interval recursion with memoization.
std::complex<double> free_product_moment(const CumulantTable& family0,
                                         const CumulantTable& family1,
                                         const std::vector<ColoredStarLetter>& word);

// Second-order data of the rotated real/imaginary parts
//   X = (g z + (g z)*)/2,  Y = (g z - (g z)*)/(2i),  g = gamma on the circle.
struct GammaSplit {
  std::complex<double> gamma;
  double tau_xx = 0.0;
  double tau_yy = 0.0;
  double tau_xy = 0.0;
  // gamma^2 tau(z^2); the automatic gamma makes this purely imaginary.
  std::complex<double> rotated_second_moment;
  bool purely_imaginary = false;
};

// With gamma omitted, picks the rotation that makes gamma^2 tau(z^2) purely
// imaginary, which equalizes tau(X^2) and tau(Y^2).
GammaSplit gamma_split(const MomentTable& m,
                       std::optional<std::complex<double>> gamma = std::nullopt);

}  // namespace fplab
