#pragma once

// Data-parallel inner loops. Every kernel has a scalar reference version and,
// where the build and CPU allow it, an AVX2/FMA version. The active table is
// picked once at first use; EDEEN_SIMD=scalar forces the reference path.

#include <cstddef>
#include <string_view>

namespace edeen::kernels {

enum class Isa { Scalar, Avx2 };

struct KernelTable {
  Isa isa;
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // sum_i (a_i - b_i)^2
  double (*squared_distance)(const double* a, const double* b, std::size_t n);
  // y += x
  void (*add)(const double* x, double* y, std::size_t n);
};

const KernelTable& scalar_table() noexcept;
/// nullptr when the AVX2 variant was not compiled in.
const KernelTable* avx2_table() noexcept;
bool cpu_supports_avx2() noexcept;

/// The table used by the library. Stable for the life of the process.
const KernelTable& active() noexcept;

std::string_view isa_name(Isa isa) noexcept;

inline double dot(const double* a, const double* b, std::size_t n) {
  return active().dot(a, b, n);
}
inline void axpy(double alpha, const double* x, double* y, std::size_t n) {
  active().axpy(alpha, x, y, n);
}
inline double squared_distance(const double* a, const double* b, std::size_t n) {
  return active().squared_distance(a, b, n);
}
inline void add(const double* x, double* y, std::size_t n) { active().add(x, y, n); }

}  // namespace edeen::kernels
