#include "fplab/cumulants.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "fplab/spectral_measure.hpp"

namespace fplab {

namespace {

using Complex = std::complex<double>;

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

// Cyclic left rotation by r of the star flags of a word of length len.
unsigned rotate_mask(unsigned mask, int r, int len) {
  if (len == 0) return 0;
  unsigned out = 0;
  for (int j = 0; j < len; ++j) {
    if (mask & (1u << ((j + r) % len))) out |= 1u << j;
  }
  return out;
}

// Star flags of the star-reversed word (w_1 ... w_len)* = w_len* ... w_1*.
unsigned reverse_star_mask(unsigned mask, int len) {
  unsigned out = 0;
  for (int j = 0; j < len; ++j) {
    if (!(mask & (1u << (len - 1 - j)))) out |= 1u << j;
  }
  return out;
}

// Symmetry orbit of a word: slots whose value equals the representative's
// value (conjugated = false) or its complex conjugate (conjugated = true).
// self_conjugate is set when some slot is reached both ways, forcing a real
// value on the whole orbit.
struct Orbit {
  std::vector<std::pair<unsigned, bool>> slots;
  bool self_conjugate = false;
};

Orbit orbit_of(int len, unsigned mask) {
  Orbit orbit;
  std::map<unsigned, bool> flag;
  auto add = [&](unsigned m, bool conjugated) {
    auto it = flag.find(m);
    if (it == flag.end()) {
      flag.emplace(m, conjugated);
      orbit.slots.emplace_back(m, conjugated);
    } else if (it->second != conjugated) {
      orbit.self_conjugate = true;
    }
  };
  for (int r = 0; r < std::max(len, 1); ++r) add(rotate_mask(mask, r, len), false);
  const unsigned rs = reverse_star_mask(mask, len);
  for (int r = 0; r < std::max(len, 1); ++r) add(rotate_mask(rs, r, len), true);
  return orbit;
}

// Bits of `mask` at the positions listed in `block`, packed in block order.
unsigned submask(unsigned mask, const std::vector<int>& block) {
  unsigned out = 0;
  for (size_t j = 0; j < block.size(); ++j) {
    if (mask & (1u << block[j])) out |= 1u << j;
  }
  return out;
}

using BlockList = std::vector<std::vector<int>>;

// All non-crossing partitions of the ordered element list `elems`,
// enumerated by the block containing the first element; the chosen block
// splits the remaining elements into independent gaps.
std::vector<BlockList> nc_of(const std::vector<int>& elems) {
  if (elems.empty()) return {BlockList{}};
  std::vector<BlockList> out;
  const int r = static_cast<int>(elems.size()) - 1;
  for (unsigned pick = 0; pick < (1u << r); ++pick) {
    std::vector<int> block = {elems[0]};
    std::vector<std::vector<int>> gaps;
    std::vector<int> gap;
    for (int j = 0; j < r; ++j) {
      if (pick & (1u << j)) {
        gaps.push_back(gap);
        gap.clear();
        block.push_back(elems[1 + j]);
      } else {
        gap.push_back(elems[1 + j]);
      }
    }
    gaps.push_back(gap);

    std::vector<BlockList> partial = {BlockList{block}};
    for (const auto& g : gaps) {
      if (g.empty()) continue;
      const auto sub = nc_of(g);
      std::vector<BlockList> next;
      next.reserve(partial.size() * sub.size());
      for (const auto& p : partial) {
        for (const auto& q : sub) {
          BlockList merged = p;
          merged.insert(merged.end(), q.begin(), q.end());
          next.push_back(std::move(merged));
        }
      }
      partial = std::move(next);
    }
    for (auto& p : partial) out.push_back(std::move(p));
  }
  return out;
}

std::vector<NCPartition> build_nc(int n) {
  std::vector<int> elems(n);
  for (int i = 0; i < n; ++i) elems[i] = i;
  std::vector<NCPartition> result;
  for (auto& blocks : nc_of(elems)) {
    std::sort(blocks.begin(), blocks.end(),
              [](const std::vector<int>& a, const std::vector<int>& b) {
                return a.front() < b.front();
              });
    result.push_back(NCPartition{std::move(blocks)});
  }
  return result;
}

// Star-flag masks of the two even-length strict alternations z z* z z* ...
// and z* z z* z ...
bool is_even_alternation(int len, unsigned mask) {
  if (len % 2 != 0 || len == 0) return false;
  unsigned odd_bits = 0, even_bits = 0;
  for (int j = 0; j < len; ++j) {
    if (j % 2 == 1) {
      odd_bits |= 1u << j;
    } else {
      even_bits |= 1u << j;
    }
  }
  return mask == odd_bits || mask == even_bits;
}

}  // namespace

std::string word_to_string(const StarWord& w, const std::vector<std::string>& names) {
  std::string out;
  for (const auto& letter : w) {
    std::string name;
    if (letter.symbol >= 0 && letter.symbol < static_cast<int>(names.size())) {
      name = names[letter.symbol];
    } else {
      name = "s" + std::to_string(letter.symbol);
    }
    if (name.empty()) fail("word_to_string: empty symbol name");
    if (letter.starred) name[0] = static_cast<char>(std::toupper(name[0]));
    out += name;
  }
  return out;
}

StarWord word_from_string(const std::string& text) {
  StarWord w;
  for (char c : text) {
    if (c == 'z') {
      w.push_back({0, false});
    } else if (c == 'Z') {
      w.push_back({0, true});
    } else {
      fail(std::string("word_from_string: unexpected character '") + c + "'");
    }
  }
  return w;
}

const std::vector<NCPartition>& enumerate_nc(int n) {
  if (n < 1 || n > 10) fail("enumerate_nc: n must be in [1, 10]");
  static std::array<std::vector<NCPartition>, 11> cache;
  static std::array<std::once_flag, 11> flags;
  std::call_once(flags[n], [n] { cache[n] = build_nc(n); });
  return cache[n];
}

namespace detail {

StarTableStorage::StarTableStorage(int order) : order_(order) {
  if (order < 0 || order > 10) fail("star table: order must be in [0, 10]");
  values_.resize(order + 1);
  for (int len = 0; len <= order; ++len) {
    values_[len].assign(1u << len, Complex(0.0, 0.0));
  }
}

void StarTableStorage::check_word(int len, unsigned mask) const {
  if (len < 0 || len > order_) fail("star table: word length exceeds table order");
  if (mask >= (1u << len)) fail("star table: star mask out of range");
}

Complex StarTableStorage::at(int len, unsigned mask) const {
  check_word(len, mask);
  return values_[len][mask];
}

Complex StarTableStorage::at(const StarWord& w) const {
  for (const auto& letter : w) {
    if (letter.symbol != 0) fail("star table: words must use the single symbol 0");
  }
  return at(static_cast<int>(w.size()), word_mask(w));
}

void StarTableStorage::set_raw(int len, unsigned mask, Complex v) {
  check_word(len, mask);
  values_[len][mask] = v;
}

unsigned StarTableStorage::word_mask(const StarWord& w) {
  unsigned mask = 0;
  for (size_t j = 0; j < w.size(); ++j) {
    if (w[j].starred) mask |= 1u << j;
  }
  return mask;
}

StarWord StarTableStorage::word_from_mask(int len, unsigned mask) {
  StarWord w(len);
  for (int j = 0; j < len; ++j) {
    w[j] = StarLetter{0, (mask & (1u << j)) != 0};
  }
  return w;
}

}  // namespace detail

MomentTable::MomentTable(int order,
                         const std::function<Complex(const StarWord&)>& values)
    : StarTableStorage(order) {
  if (!values) fail("moment table: missing value generator");
  const Complex unit = values(StarWord{});
  if (std::abs(unit - Complex(1.0, 0.0)) > 1e-9) {
    fail("moment table: the empty word must have moment 1");
  }
  values_[0][0] = Complex(1.0, 0.0);
  for (int len = 1; len <= order; ++len) {
    std::vector<char> seen(1u << len, 0);
    for (unsigned mask = 0; mask < (1u << len); ++mask) {
      if (seen[mask]) continue;
      const Orbit orbit = orbit_of(len, mask);
      Complex v = values(word_from_mask(len, mask));
      if (orbit.self_conjugate) v = Complex(v.real(), 0.0);
      for (const auto& [slot, conjugated] : orbit.slots) {
        values_[len][slot] = conjugated ? std::conj(v) : v;
        seen[slot] = 1;
      }
    }
  }
}

MomentTable MomentTable::from_entries(
    int order, const std::vector<std::pair<StarWord, Complex>>& entries) {
  MomentTable table(order);
  std::vector<std::vector<char>> seen(order + 1);
  for (int len = 0; len <= order; ++len) seen[len].assign(1u << len, 0);
  table.values_[0][0] = Complex(1.0, 0.0);
  seen[0][0] = 1;

  for (const auto& [word, value] : entries) {
    const int len = static_cast<int>(word.size());
    if (len > order) fail("moment table: entry word longer than table order");
    for (const auto& letter : word) {
      if (letter.symbol != 0) fail("moment table: words must use the single symbol 0");
    }
    const unsigned mask = word_mask(word);
    Complex v = value;
    if (len == 0) {
      if (std::abs(v - Complex(1.0, 0.0)) > 1e-9) {
        fail("moment table: the empty word must have moment 1");
      }
      continue;
    }
    const Orbit orbit = orbit_of(len, mask);
    if (orbit.self_conjugate) {
      if (std::abs(v.imag()) > 1e-9 * std::max(1.0, std::abs(v))) {
        fail("moment table: word '" + word_to_string(word) +
             "' must have a real value");
      }
      v = Complex(v.real(), 0.0);
    }
    for (const auto& [slot, conjugated] : orbit.slots) {
      const Complex want = conjugated ? std::conj(v) : v;
      if (seen[len][slot]) {
        if (std::abs(table.values_[len][slot] - want) >
            1e-9 * std::max(1.0, std::abs(want))) {
          fail("moment table: entries violate trace symmetry or star "
               "compatibility near word '" +
               word_to_string(word) + "'");
        }
      } else {
        table.values_[len][slot] = want;
        seen[len][slot] = 1;
      }
    }
  }

  for (int len = 1; len <= order; ++len) {
    for (unsigned mask = 0; mask < (1u << len); ++mask) {
      if (!seen[len][mask]) {
        fail("moment table: no entry determines word '" +
             word_to_string(word_from_mask(len, mask)) + "'");
      }
    }
  }
  return table;
}

double MomentTable::symmetry_defect() const {
  double worst = 0.0;
  for (int len = 1; len <= order_; ++len) {
    for (unsigned mask = 0; mask < (1u << len); ++mask) {
      const Complex v = values_[len][mask];
      for (int r = 0; r < len; ++r) {
        worst = std::max(worst,
                         std::abs(v - values_[len][rotate_mask(mask, r, len)]));
      }
      worst = std::max(
          worst,
          std::abs(v - std::conj(values_[len][reverse_star_mask(mask, len)])));
    }
  }
  return worst;
}

CumulantTable moments_to_cumulants(const MomentTable& m) {
  const int order = m.order();
  CumulantTable c(order);
  for (int len = 1; len <= order; ++len) {
    const auto& partitions = enumerate_nc(len);
    for (unsigned mask = 0; mask < (1u << len); ++mask) {
      Complex v = m.at(len, mask);
      for (const auto& p : partitions) {
        if (p.blocks.size() == 1) continue;
        Complex prod(1.0, 0.0);
        for (const auto& block : p.blocks) {
          prod *= c.at(static_cast<int>(block.size()), submask(mask, block));
          if (prod == Complex(0.0, 0.0)) break;
        }
        v -= prod;
      }
      c.set_raw(len, mask, v);
    }
  }
  return c;
}

MomentTable cumulants_to_moments(const CumulantTable& c) {
  return MomentTable(c.order(), [&c](const StarWord& w) -> Complex {
    if (w.empty()) return Complex(1.0, 0.0);
    const int len = static_cast<int>(w.size());
    const unsigned mask = detail::StarTableStorage::word_mask(w);
    Complex v(0.0, 0.0);
    for (const auto& p : enumerate_nc(len)) {
      Complex prod(1.0, 0.0);
      for (const auto& block : p.blocks) {
        prod *= c.at(static_cast<int>(block.size()), submask(mask, block));
        if (prod == Complex(0.0, 0.0)) break;
      }
      v += prod;
    }
    return v;
  });
}

RDiagonalReport is_r_diagonal(const MomentTable& m, double tol) {
  if (!(tol > 0.0)) fail("is_r_diagonal: tolerance must be positive");
  const CumulantTable c = moments_to_cumulants(m);
  RDiagonalReport report;
  for (int len = 1; len <= m.order(); ++len) {
    for (unsigned mask = 0; mask < (1u << len); ++mask) {
      if (is_even_alternation(len, mask)) continue;
      const double mag = std::abs(c.at(len, mask));
      if (mag > report.worst_magnitude) {
        report.worst_magnitude = mag;
        report.worst_word = detail::StarTableStorage::word_from_mask(len, mask);
      }
    }
  }
  report.r_diagonal = report.worst_magnitude < tol;
  return report;
}

MomentTable circular_table(int order, double variance) {
  if (!(variance > 0.0)) fail("circular_table: variance must be positive");
  CumulantTable c(order);
  if (order >= 2) {
    c.set_raw(2, 0b01u, Complex(variance, 0.0));
    c.set_raw(2, 0b10u, Complex(variance, 0.0));
  }
  return cumulants_to_moments(c);
}

MomentTable haar_unitary_table(int order) {
  return MomentTable(order, [](const StarWord& w) -> Complex {
    int balance = 0;
    for (const auto& letter : w) balance += letter.starred ? -1 : 1;
    return balance == 0 ? Complex(1.0, 0.0) : Complex(0.0, 0.0);
  });
}

MomentTable semicircular_table(int order, double mean, double variance) {
  if (!(variance > 0.0)) fail("semicircular_table: variance must be positive");
  CumulantTable c(order);
  if (order >= 1) {
    for (unsigned mask = 0; mask < 2u; ++mask) {
      c.set_raw(1, mask, Complex(mean, 0.0));
    }
  }
  if (order >= 2) {
    for (unsigned mask = 0; mask < 4u; ++mask) {
      c.set_raw(2, mask, Complex(variance, 0.0));
    }
  }
  return cumulants_to_moments(c);
}

MomentTable point_table(int order, Complex value) {
  return MomentTable(order, [value](const StarWord& w) -> Complex {
    Complex prod(1.0, 0.0);
    for (const auto& letter : w) prod *= letter.starred ? std::conj(value) : value;
    return prod;
  });
}

MomentTable elliptic_table(int order, double rho) {
  CumulantTable c(order);
  if (order >= 2) {
    c.set_raw(2, 0b00u, Complex(rho, 0.0));
    c.set_raw(2, 0b11u, Complex(rho, 0.0));
    c.set_raw(2, 0b01u, Complex(1.0, 0.0));
    c.set_raw(2, 0b10u, Complex(1.0, 0.0));
  }
  return cumulants_to_moments(c);
}

MomentTable shifted_circular_table(int order, Complex shift, double variance) {
  if (!(variance > 0.0)) fail("shifted_circular_table: variance must be positive");
  CumulantTable c(order);
  if (order >= 1) {
    c.set_raw(1, 0b0u, shift);
    c.set_raw(1, 0b1u, std::conj(shift));
  }
  if (order >= 2) {
    c.set_raw(2, 0b01u, Complex(variance, 0.0));
    c.set_raw(2, 0b10u, Complex(variance, 0.0));
  }
  return cumulants_to_moments(c);
}

MomentTable measure_table(int order, const SpectralMeasure& mu) {
  const std::vector<double> mom = measure_moments(mu, order);
  return MomentTable(order, [&mom](const StarWord& w) -> Complex {
    return Complex(mom[w.size()], 0.0);
  });
}

std::complex<double> free_product_moment(
    const CumulantTable& family0, const CumulantTable& family1,
    const std::vector<ColoredStarLetter>& word) {
  const int n = static_cast<int>(word.size());
  if (n == 0) return Complex(1.0, 0.0);
  int count0 = 0, count1 = 0;
  for (const auto& letter : word) {
    if (letter.family == 0) {
      ++count0;
    } else if (letter.family == 1) {
      ++count1;
    } else {
      fail("free_product_moment: letter family must be 0 or 1");
    }
  }
  if (count0 > family0.order() || count1 > family1.order()) {
    fail("free_product_moment: a family appears more often than its cumulant "
         "table order allows");
  }

  std::vector<std::optional<Complex>> memo((n + 1) * (n + 1));
  std::function<Complex(int, int)> moment = [&](int s, int e) -> Complex {
    if (s >= e) return Complex(1.0, 0.0);
    auto& slot = memo[s * (n + 1) + e];
    if (slot) return *slot;

    const int fam = word[s].family;
    const CumulantTable& kt = fam == 0 ? family0 : family1;
    std::vector<int> candidates;
    for (int i = s + 1; i < e; ++i) {
      if (word[i].family == fam) candidates.push_back(i);
    }

    Complex total(0.0, 0.0);
    // DFS over the block containing position s: positions are chosen in
    // increasing order; every gap between consecutive chosen positions is an
    // independent sub-word.
    std::function<void(int, int, unsigned, size_t, Complex)> extend =
        [&](int last, int blen, unsigned bmask, size_t next, Complex acc) {
          const Complex kappa = kt.at(blen, bmask);
          if (kappa != Complex(0.0, 0.0)) {
            total += kappa * acc * moment(last + 1, e);
          }
          for (size_t j = next; j < candidates.size(); ++j) {
            const int p = candidates[j];
            const Complex gap = moment(last + 1, p);
            if (gap == Complex(0.0, 0.0)) continue;
            extend(p, blen + 1,
                   bmask | (word[p].starred ? (1u << blen) : 0u), j + 1,
                   acc * gap);
          }
        };
    extend(s, 1, word[s].starred ? 1u : 0u, 0, Complex(1.0, 0.0));

    slot = total;
    return total;
  };
  return moment(0, n);
}

MomentTable haar_multiply(const MomentTable& m) {
  if (m.order() > 8) fail("haar_multiply: order must be <= 8");
  const CumulantTable kz = moments_to_cumulants(m);
  const CumulantTable ku = moments_to_cumulants(haar_unitary_table(m.order()));
  return MomentTable(m.order(), [&](const StarWord& w) -> Complex {
    if (w.empty()) return Complex(1.0, 0.0);
    std::vector<ColoredStarLetter> expanded;
    expanded.reserve(2 * w.size());
    for (const auto& letter : w) {
      if (!letter.starred) {
        expanded.push_back({0, false});  // u
        expanded.push_back({1, false});  // z
      } else {
        expanded.push_back({1, true});  // z*
        expanded.push_back({0, true});  // u*
      }
    }
    return free_product_moment(ku, kz, expanded);
  });
}

GammaSplit gamma_split(const MomentTable& m,
                       std::optional<std::complex<double>> gamma) {
  if (m.order() < 2) fail("gamma_split: table order must be at least 2");
  const Complex t_zz = m.at(2, 0b00u);   // tau(z z)
  const Complex t_zzs = m.at(2, 0b10u);  // tau(z z*)

  Complex g;
  if (gamma.has_value()) {
    g = *gamma;
    if (std::abs(std::abs(g) - 1.0) > 1e-9) {
      fail("gamma_split: gamma must lie on the unit circle");
    }
  } else if (std::abs(t_zz) == 0.0) {
    g = Complex(1.0, 0.0);
  } else {
    const double theta = 0.5 * (M_PI / 2.0 - std::arg(t_zz));
    g = std::polar(1.0, theta);
  }

  const Complex rotated = g * g * t_zz;
  GammaSplit split;
  split.gamma = g;
  split.rotated_second_moment = rotated;
  split.tau_xx = 0.5 * t_zzs.real() + 0.5 * rotated.real();
  split.tau_yy = 0.5 * t_zzs.real() - 0.5 * rotated.real();
  split.tau_xy = 0.5 * rotated.imag();
  split.purely_imaginary =
      std::abs(rotated.real()) <= 1e-12 * std::max(1.0, std::abs(rotated));
  return split;
}

}  // namespace fplab
