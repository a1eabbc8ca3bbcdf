#include "fplab/serialize.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fplab {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) lines.push_back(cur);
  return lines;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_double(const std::string& s) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0' || errno == ERANGE) {
    fail("serialize: cannot parse number '" + s + "'");
  }
  return v;
}

std::uint64_t parse_u64(const std::string& s) {
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0' || errno == ERANGE) {
    fail("serialize: cannot parse integer '" + s + "'");
  }
  return static_cast<std::uint64_t>(v);
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string measure_to_csv(const SpectralMeasure& mu) {
  std::string out;
  if (mu.is_atomic()) {
    out = "location,weight\n";
    for (const Atom& atom : mu.atoms()) {
      out += format_double(atom.location);
      out += ',';
      out += format_double(atom.weight);
      out += '\n';
    }
    return out;
  }
  const auto& nodes = mu.nodes();
  const auto& density = mu.density();
  const std::size_t n = nodes.size();
  const double span = std::abs(nodes.back() - nodes.front());
  for (std::size_t i = 0; i < n; ++i) {
    const double lerp =
        n > 1 ? nodes.front() + (nodes.back() - nodes.front()) *
                                    static_cast<double>(i) /
                                    static_cast<double>(n - 1)
              : nodes.front();
    if (std::abs(nodes[i] - lerp) > 1e-12 * std::max(1.0, span)) {
      fail("serialize: the grid CSV form covers uniformly spaced nodes only; "
           "this measure uses a graded mesh");
    }
  }
  out += format_double(nodes.front());
  out += '\n';
  out += format_double(nodes.back());
  out += '\n';
  out += std::to_string(nodes.size());
  out += '\n';
  for (double d : density) {
    out += format_double(d);
    out += '\n';
  }
  return out;
}

SpectralMeasure measure_from_csv(const std::string& text) {
  const auto lines = split_lines(text);
  if (lines.empty()) fail("serialize: empty measure file");
  if (lines.front() == "location,weight") {
    std::vector<Atom> atoms;
    for (std::size_t i = 1; i < lines.size(); ++i) {
      if (lines[i].empty()) continue;
      const auto fields = split_fields(lines[i]);
      if (fields.size() != 2) fail("serialize: atom rows need two fields");
      atoms.push_back({parse_double(fields[0]), parse_double(fields[1])});
    }
    return SpectralMeasure::from_atoms(atoms);
  }
  if (lines.size() < 3) fail("serialize: grid measure needs a 3-line header");
  const double a = parse_double(lines[0]);
  const double b = parse_double(lines[1]);
  const std::uint64_t n = parse_u64(lines[2]);
  if (lines.size() < 3 + n) fail("serialize: grid measure is missing density rows");
  std::vector<double> nodes(n), density(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    nodes[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    density[i] = parse_double(lines[3 + i]);
  }
  if (n >= 1) nodes[0] = a;       // endpoints survive save/load/save exactly
  if (n >= 2) nodes[n - 1] = b;
  return SpectralMeasure::grid_nodes(nodes, density);
}

std::string table_to_csv(const MomentTable& table) {
  std::string out = "word,re,im\n";
  for (int len = 1; len <= table.order(); ++len) {
    const std::uint32_t masks = 1u << len;
    for (std::uint32_t mask = 0; mask < masks; ++mask) {
      const StarWord w = detail::StarTableStorage::word_from_mask(len, mask);
      const std::complex<double> v = table.at(w);
      out += word_to_string(w);
      out += ',';
      out += format_double(v.real());
      out += ',';
      out += format_double(v.imag());
      out += '\n';
    }
  }
  return out;
}

MomentTable table_from_csv(const std::string& text) {
  const auto lines = split_lines(text);
  if (lines.empty() || lines.front() != "word,re,im") {
    fail("serialize: moment-table files start with a 'word,re,im' header");
  }
  std::vector<std::pair<StarWord, std::complex<double>>> entries;
  int order = 0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto fields = split_fields(lines[i]);
    if (fields.size() != 3) fail("serialize: table rows need three fields");
    StarWord w = word_from_string(fields[0]);
    if (w.empty()) fail("serialize: the empty word is implicit, not a row");
    order = std::max(order, static_cast<int>(w.size()));
    entries.emplace_back(
        std::move(w),
        std::complex<double>(parse_double(fields[1]), parse_double(fields[2])));
  }
  if (order == 0) fail("serialize: moment-table file has no word rows");
  return MomentTable::from_entries(order, entries);
}

std::string samples_to_csv(const SampleDump& dump) {
  std::string out = "k,seed,stream_id\n";
  out += std::to_string(dump.k);
  out += ',';
  out += std::to_string(dump.seed);
  out += ',';
  out += std::to_string(dump.stream_id);
  out += '\n';
  for (const ComplexMatrix& m : dump.samples) {
    if (m.rows() != dump.k || m.cols() != dump.k) {
      fail("serialize: sample matrices must all be k x k");
    }
    std::string row;
    for (int i = 0; i < dump.k; ++i) {
      for (int j = 0; j < dump.k; ++j) {
        if (!row.empty()) row += ',';
        row += format_double(m(i, j).real());
        row += ',';
        row += format_double(m(i, j).imag());
      }
    }
    out += row;
    out += '\n';
  }
  return out;
}

SampleDump samples_from_csv(const std::string& text) {
  const auto lines = split_lines(text);
  if (lines.size() < 2 || lines.front() != "k,seed,stream_id") {
    fail("serialize: sample dumps start with a 'k,seed,stream_id' header");
  }
  const auto head = split_fields(lines[1]);
  if (head.size() != 3) fail("serialize: sample-dump header row needs three fields");
  SampleDump dump;
  dump.k = static_cast<int>(parse_u64(head[0]));
  dump.seed = parse_u64(head[1]);
  dump.stream_id = parse_u64(head[2]);
  if (dump.k < 1) fail("serialize: sample dump k must be positive");
  const std::size_t per_row = 2u * dump.k * dump.k;
  for (std::size_t r = 2; r < lines.size(); ++r) {
    if (lines[r].empty()) continue;
    const auto fields = split_fields(lines[r]);
    if (fields.size() != per_row) {
      fail("serialize: sample rows need 2*k*k fields");
    }
    ComplexMatrix m(dump.k, dump.k);
    std::size_t f = 0;
    for (int i = 0; i < dump.k; ++i) {
      for (int j = 0; j < dump.k; ++j) {
        const double re = parse_double(fields[f++]);
        const double im = parse_double(fields[f++]);
        m(i, j) = {re, im};
      }
    }
    dump.samples.push_back(std::move(m));
  }
  return dump;
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("serialize: cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail("serialize: cannot open '" + path + "' for writing");
  out << text;
  if (!out) fail("serialize: short write to '" + path + "'");
}

}  // namespace fplab
