#include "mlpr/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace mlpr::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(MLPR_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const KernelTable* pick_default() {
  if (const char* env = std::getenv("MLPR_SIMD")) {
    const std::string_view name{env};
    for (Isa isa : {Isa::Scalar, Isa::Avx2, Isa::Neon}) {
      if (name == isa_name(isa) && isa_available(isa)) return &table_for(isa);
    }
  }
  if (isa_available(Isa::Avx2)) return &table_for(Isa::Avx2);
  if (isa_available(Isa::Neon)) return &table_for(Isa::Neon);
  return &detail::scalar_table;
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{pick_default()};
  return slot;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2: return cpu_has_avx2();
    case Isa::Neon:
#if defined(MLPR_HAVE_NEON_TU)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table_for(Isa isa) {
  if (!isa_available(isa)) {
    throw std::invalid_argument("kernel ISA not available: " + std::string(isa_name(isa)));
  }
  switch (isa) {
#if defined(MLPR_HAVE_AVX2_TU)
    case Isa::Avx2: return detail::avx2_table;
#endif
#if defined(MLPR_HAVE_NEON_TU)
    case Isa::Neon: return detail::neon_table;
#endif
    default: return detail::scalar_table;
  }
}

const KernelTable& active() { return *active_slot().load(std::memory_order_acquire); }

void set_active(Isa isa) { active_slot().store(&table_for(isa), std::memory_order_release); }

}  // namespace mlpr::kernels
