#pragma once

#include <cstddef>
#include <string_view>

namespace fluxnet::nn::kernels {

/// Inner loops of the dense network. Every entry has a scalar reference
/// implementation; vector variants must agree with it to rounding.
struct KernelTable {
  const char* name;

  /// C[i, j] += sum_p A(i, p) * B[p, j], p in [0, k), with
  /// A(i, p) = a[i * a_rs + p * a_cs]; B and C row-major.
  /// Each C entry accumulates in increasing p.
  void (*gemm)(std::size_t m, std::size_t n, std::size_t k, const double* a, std::size_t a_rs,
               std::size_t a_cs, const double* b, std::size_t ldb, double* c, std::size_t ldc);

  /// out[j] += sum over rows of x[r, j], rows in increasing order.
  void (*column_sums)(std::size_t rows, std::size_t cols, const double* x, double* out);

  void (*tanh_forward)(std::size_t n, const double* z, double* y);
  /// g *= 1 - y^2, with y = tanh(z).
  void (*tanh_backward)(std::size_t n, const double* y, double* g);
  void (*relu_forward)(std::size_t n, const double* z, double* y);
  /// g = 0 where y <= 0.
  void (*relu_backward)(std::size_t n, const double* y, double* g);

  /// One Adam step: m, v moment updates, then
  /// p -= lr * (m / bc1) / (sqrt(v / bc2) + eps), bc = 1 - beta^t.
  void (*adam_update)(std::size_t n, double* p, const double* g, double* m, double* v, double lr,
                      double beta1, double beta2, double eps, double bc1, double bc2);
};

const KernelTable& scalar_kernels();

/// AVX2+FMA table, or nullptr when not compiled in or not supported by the CPU.
const KernelTable* avx2_kernels();

/// Table chosen at first use: AVX2 when available unless the environment
/// variable FLUXNET_SIMD=scalar is set.
const KernelTable& active_kernels();

/// Override the dispatch ("scalar", "avx2" or "auto"); throws ConfigError for
/// unknown names or an unavailable variant.
void select_kernels(std::string_view name);

}  // namespace fluxnet::nn::kernels
