#include <atomic>
#include <cstdlib>
#include <string>

#include "fluxnet/core/errors.hpp"
#include "fluxnet/nn/kernels.hpp"

namespace fluxnet::nn::kernels {

#ifdef FLUXNET_HAVE_AVX2
const KernelTable& avx2_kernel_table();
#endif

const KernelTable* avx2_kernels() {
#ifdef FLUXNET_HAVE_AVX2
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &avx2_kernel_table() : nullptr;
#else
  return nullptr;
#endif
}

namespace {

const KernelTable* automatic() {
  const char* env = std::getenv("FLUXNET_SIMD");
  if (env != nullptr && std::string(env) == "scalar") return &scalar_kernels();
  if (const KernelTable* t = avx2_kernels()) return t;
  return &scalar_kernels();
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{automatic()};
  return table;
}

}  // namespace

const KernelTable& active_kernels() { return *current().load(std::memory_order_acquire); }

void select_kernels(std::string_view name) {
  const KernelTable* table = nullptr;
  if (name == "scalar") {
    table = &scalar_kernels();
  } else if (name == "avx2") {
    table = avx2_kernels();
    if (table == nullptr) throw ConfigError("avx2 kernels are not available on this machine");
  } else if (name == "auto") {
    table = automatic();
  } else {
    throw ConfigError("unknown kernel set '" + std::string(name) + "'");
  }
  current().store(table, std::memory_order_release);
}

}  // namespace fluxnet::nn::kernels
