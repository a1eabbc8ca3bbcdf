#pragma once
// Data-parallel inner loops shared by the quadrature and spectral code:
// pairwise log-distance sums and weighted log-kernel rows. Each kernel has
// a portable scalar reference implementation and (on x86-64) an AVX2
// variant selected once at startup. Variants agree to ~1e-12 relative on
// sums, not bit-for-bit; within one process the selected backend is fixed,
// so results do not depend on worker count or call order.
//
// Environment override: FPLAB_SIMD=scalar forces the reference path,
// FPLAB_SIMD=avx2 requests the vector path (ignored if unsupported).

#include <cstddef>

namespace fplab::kernels {

// sum over ordered pairs i < j of log|x[i] - x[j]|; -inf on ties.
double sum_log_abs_diff_pairs(const double* x, std::size_t n);

// sum over all ordered pairs (a,b), including a == b, of log(x[a] + x[b]);
// -inf when a zero sum occurs (two zero entries paired).
double sum_log_plus_all(const double* x, std::size_t n);

// sum_j w[j] * log|s - t[j]|; caller guarantees s != t[j] or accepts -inf.
double weighted_log_row(double s, const double* t, const double* w, std::size_t n);

// name of the active backend ("scalar" or "avx2"), fixed for process lifetime.
const char* backend_name();

// Reference implementations, always available (used by equivalence tests).
namespace scalar {
double sum_log_abs_diff_pairs(const double* x, std::size_t n);
double sum_log_plus_all(const double* x, std::size_t n);
double weighted_log_row(double s, const double* t, const double* w, std::size_t n);
}  // namespace scalar

// AVX2 implementations; null function table entries when unsupported.
namespace avx2 {
bool available();
double sum_log_abs_diff_pairs(const double* x, std::size_t n);
double sum_log_plus_all(const double* x, std::size_t n);
double weighted_log_row(double s, const double* t, const double* w, std::size_t n);
}  // namespace avx2

}  // namespace fplab::kernels
