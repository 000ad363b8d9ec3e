#include <cmath>

#include "fluxnet/nn/kernels.hpp"

namespace fluxnet::nn::kernels {

namespace {

void gemm(std::size_t m, std::size_t n, std::size_t k, const double* a, std::size_t a_rs,
          std::size_t a_cs, const double* b, std::size_t ldb, double* c, std::size_t ldc) {
  for (std::size_t i = 0; i < m; ++i) {
    double* ci = c + i * ldc;
    for (std::size_t j = 0; j < n; ++j) {
      double acc = ci[j];
      for (std::size_t p = 0; p < k; ++p) acc += a[i * a_rs + p * a_cs] * b[p * ldb + j];
      ci[j] = acc;
    }
  }
}

void column_sums(std::size_t rows, std::size_t cols, const double* x, double* out) {
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t j = 0; j < cols; ++j) out[j] += x[r * cols + j];
}

void tanh_forward(std::size_t n, const double* z, double* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] = std::tanh(z[i]);
}

void tanh_backward(std::size_t n, const double* y, double* g) {
  for (std::size_t i = 0; i < n; ++i) g[i] *= 1.0 - y[i] * y[i];
}

void relu_forward(std::size_t n, const double* z, double* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] = z[i] > 0.0 ? z[i] : 0.0;
}

void relu_backward(std::size_t n, const double* y, double* g) {
  for (std::size_t i = 0; i < n; ++i)
    if (!(y[i] > 0.0)) g[i] = 0.0;
}

void adam_update(std::size_t n, double* p, const double* g, double* m, double* v, double lr,
                 double beta1, double beta2, double eps, double bc1, double bc2) {
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * (g[i] * g[i]);
    p[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + eps);
  }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar",      gemm,               column_sums,
                                 tanh_forward,  tanh_backward, relu_forward, relu_backward,
                                 adam_update};
  return table;
}

}  // namespace fluxnet::nn::kernels
