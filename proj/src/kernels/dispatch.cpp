#include <cstdlib>
#include <string_view>

#include "edeen/kernels.hpp"

namespace edeen::kernels {

#ifdef EDEEN_HAVE_AVX2
const KernelTable* avx2_table_impl() noexcept;
#endif

const KernelTable* avx2_table() noexcept {
#ifdef EDEEN_HAVE_AVX2
  return avx2_table_impl();
#else
  return nullptr;
#endif
}

bool cpu_supports_avx2() noexcept {
#if defined(__GNUC__) && (defined(__x86_64__) || defined(__i386__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {

const KernelTable& select() noexcept {
  if (const char* env = std::getenv("EDEEN_SIMD"); env && std::string_view(env) == "scalar")
    return scalar_table();
  if (const KernelTable* t = avx2_table(); t && cpu_supports_avx2()) return *t;
  return scalar_table();
}

}  // namespace

const KernelTable& active() noexcept {
  static const KernelTable& table = select();
  return table;
}

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar:
      return "scalar";
    case Isa::Avx2:
      return "avx2";
  }
  return "unknown";
}

}  // namespace edeen::kernels
