#pragma once

// Plain-text persistence: CSV forms for spectral measures, moment tables and
// matrix sample dumps, plus the hash used to fingerprint experiment configs.
// Every number is written with 17 significant digits so that load(save(x))
// reproduces x bit for bit.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "fplab/cumulants.hpp"
#include "fplab/spectral_measure.hpp"

namespace fplab {

// Shortest decimal that round-trips the double exactly (printf %.17g).
std::string format_double(double x);

// Spectral measures use one of two layouts, detected on load:
//   atomic: a "location,weight" header row, then one row per atom;
//   grid:   three single-number header lines (left end, right end, node
//           count), then one density value per line.
std::string measure_to_csv(const SpectralMeasure& mu);
SpectralMeasure measure_from_csv(const std::string& text);

// Moment tables: a "word,re,im" header row, then one row per word of length
// 1..order over the alphabet {z, Z} ('Z' = starred), in length-major order.
// The empty word is pinned to 1 and not written.
std::string table_to_csv(const MomentTable& table);
MomentTable table_from_csv(const std::string& text);

// Matrix sample dumps: a "k,seed,stream_id" header row, one row of those
// three values, then one row per matrix holding its k*k entries in row-major
// order with real and imaginary parts interleaved.
struct SampleDump {
  int k = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  std::vector<ComplexMatrix> samples;
};
std::string samples_to_csv(const SampleDump& dump);
SampleDump samples_from_csv(const std::string& text);

// FNV-1a 64-bit hash; fingerprints canonical config strings.
std::uint64_t fnv1a64(std::string_view data);
std::string hash_hex(std::uint64_t h);

// Whole-file text helpers (throw std::runtime_error on I/O failure).
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace fplab
