#include <atomic>
#include <cstdlib>
#include <cstring>

#include "kleinian/simd/kernels.hpp"

namespace kleinian::simd {

namespace {

Isa initial_isa() {
  const char* env = std::getenv("KLEINIAN_SIMD");
  if (env && std::strcmp(env, "scalar") == 0) return Isa::Scalar;
  return cpu_has_avx2() && avx2_kernels() ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

const char* to_string(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

const KernelTable& kernels() {
  return active_isa() == Isa::Avx2 ? *avx2_kernels() : scalar_kernels();
}

void set_isa(Isa isa) {
  if (isa == Isa::Avx2 && !(cpu_has_avx2() && avx2_kernels())) isa = Isa::Scalar;
  current().store(isa, std::memory_order_relaxed);
}

}  // namespace kleinian::simd
