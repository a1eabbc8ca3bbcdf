#include "fplab/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>

namespace fplab::kernels {

namespace scalar {

double sum_log_abs_diff_pairs(const double* x, std::size_t n) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    double row = 0.0;
    const double xi = x[i];
    for (std::size_t j = i + 1; j < n; ++j) row += std::log(std::fabs(xi - x[j]));
    total += row;
  }
  return total;
}

double sum_log_plus_all(const double* x, std::size_t n) {
  double total = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    double row = 0.0;
    const double xa = x[a];
    for (std::size_t b = 0; b < n; ++b) row += std::log(xa + x[b]);
    total += row;
  }
  return total;
}

double weighted_log_row(double s, const double* t, const double* w, std::size_t n) {
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) acc += w[j] * std::log(std::fabs(s - t[j]));
  return acc;
}

}  // namespace scalar

namespace {

enum class Backend { Scalar, Avx2 };

Backend select_backend() {
  const char* env = std::getenv("FPLAB_SIMD");
  if (env != nullptr) {
    if (std::strcmp(env, "scalar") == 0) return Backend::Scalar;
    if (std::strcmp(env, "avx2") == 0)
      return avx2::available() ? Backend::Avx2 : Backend::Scalar;
  }
  return avx2::available() ? Backend::Avx2 : Backend::Scalar;
}

Backend active_backend() {
  static const Backend b = select_backend();
  return b;
}

}  // namespace

const char* backend_name() {
  return active_backend() == Backend::Avx2 ? "avx2" : "scalar";
}

double sum_log_abs_diff_pairs(const double* x, std::size_t n) {
  return active_backend() == Backend::Avx2 ? avx2::sum_log_abs_diff_pairs(x, n)
                                           : scalar::sum_log_abs_diff_pairs(x, n);
}

double sum_log_plus_all(const double* x, std::size_t n) {
  return active_backend() == Backend::Avx2 ? avx2::sum_log_plus_all(x, n)
                                           : scalar::sum_log_plus_all(x, n);
}

double weighted_log_row(double s, const double* t, const double* w, std::size_t n) {
  return active_backend() == Backend::Avx2 ? avx2::weighted_log_row(s, t, w, n)
                                           : scalar::weighted_log_row(s, t, w, n);
}

}  // namespace fplab::kernels
