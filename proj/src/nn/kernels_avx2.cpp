// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include <cmath>
#include <cstdint>

#include "fluxnet/nn/kernels.hpp"

namespace fluxnet::nn::kernels {

namespace {

inline __m256i tail_mask(std::size_t remaining) {
  const std::int64_t r = static_cast<std::int64_t>(remaining);
  return _mm256_set_epi64x(r > 3 ? -1 : 0, r > 2 ? -1 : 0, r > 1 ? -1 : 0, r > 0 ? -1 : 0);
}

template <bool Masked>
inline __m256d load(const double* p, __m256i mask) {
  if constexpr (Masked) return _mm256_maskload_pd(p, mask);
  else return _mm256_loadu_pd(p);
}

template <bool Masked>
inline void store(double* p, __m256d v, __m256i mask) {
  if constexpr (Masked) _mm256_maskstore_pd(p, mask, v);
  else _mm256_storeu_pd(p, v);
}

// R rows x V vectors of C held in registers across the whole k loop.
// Only the last vector may be partial (Masked).
template <int R, int V, bool Masked>
inline void gemm_tile(std::size_t k, const double* a, std::size_t a_rs, std::size_t a_cs,
                      const double* b, std::size_t ldb, double* c, std::size_t ldc,
                      __m256i mask) {
  const __m256i full = _mm256_set1_epi64x(-1);
  __m256d acc[R][V];
  for (int r = 0; r < R; ++r) {
    for (int v = 0; v < V; ++v) {
      acc[r][v] = v == V - 1 ? load<Masked>(c + r * ldc + 4 * v, mask)
                             : load<false>(c + r * ldc + 4 * v, full);
    }
  }
  for (std::size_t p = 0; p < k; ++p) {
    const double* bp = b + p * ldb;
    __m256d bv[V];
    for (int v = 0; v < V; ++v)
      bv[v] = v == V - 1 ? load<Masked>(bp + 4 * v, mask) : load<false>(bp + 4 * v, full);
    for (int r = 0; r < R; ++r) {
      const __m256d ar = _mm256_broadcast_sd(a + r * a_rs + p * a_cs);
      for (int v = 0; v < V; ++v) acc[r][v] = _mm256_fmadd_pd(ar, bv[v], acc[r][v]);
    }
  }
  for (int r = 0; r < R; ++r) {
    for (int v = 0; v < V; ++v) {
      if (v == V - 1) store<Masked>(c + r * ldc + 4 * v, acc[r][v], mask);
      else store<false>(c + r * ldc + 4 * v, acc[r][v], full);
    }
  }
}

template <int R>
inline void gemm_rows(std::size_t n, std::size_t k, const double* a, std::size_t a_rs,
                      std::size_t a_cs, const double* b, std::size_t ldb, double* c,
                      std::size_t ldc) {
  const __m256i full = _mm256_set1_epi64x(-1);
  std::size_t j = 0;
  for (; j + 8 <= n; j += 8) gemm_tile<R, 2, false>(k, a, a_rs, a_cs, b + j, ldb, c + j, ldc, full);
  for (; j + 4 <= n; j += 4) gemm_tile<R, 1, false>(k, a, a_rs, a_cs, b + j, ldb, c + j, ldc, full);
  if (j < n) gemm_tile<R, 1, true>(k, a, a_rs, a_cs, b + j, ldb, c + j, ldc, tail_mask(n - j));
}

void gemm(std::size_t m, std::size_t n, std::size_t k, const double* a, std::size_t a_rs,
          std::size_t a_cs, const double* b, std::size_t ldb, double* c, std::size_t ldc) {
  std::size_t i = 0;
  for (; i + 4 <= m; i += 4) gemm_rows<4>(n, k, a + i * a_rs, a_rs, a_cs, b, ldb, c + i * ldc, ldc);
  for (; i < m; ++i) gemm_rows<1>(n, k, a + i * a_rs, a_rs, a_cs, b, ldb, c + i * ldc, ldc);
}

void column_sums(std::size_t rows, std::size_t cols, const double* x, double* out) {
  std::size_t j = 0;
  for (; j + 4 <= cols; j += 4) {
    __m256d acc = _mm256_loadu_pd(out + j);
    for (std::size_t r = 0; r < rows; ++r) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + r * cols + j));
    _mm256_storeu_pd(out + j, acc);
  }
  for (; j < cols; ++j) {
    double acc = out[j];
    for (std::size_t r = 0; r < rows; ++r) acc += x[r * cols + j];
    out[j] = acc;
  }
}

// exp(y) for y in [0, 709]: Cody-Waite reduction by ln 2, degree-13 Taylor
// polynomial on |r| <= ln(2)/2, exponent assembled from the integer bits.
inline __m256d exp_pd(__m256d y) {
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634074);
  const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
  const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);
  const __m256d n = _mm256_round_pd(_mm256_mul_pd(y, log2e), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, ln2_hi, y);
  r = _mm256_fnmadd_pd(n, ln2_lo, r);

  static constexpr double kInvFact[] = {
      1.0 / 6227020800.0, 1.0 / 479001600.0, 1.0 / 39916800.0, 1.0 / 3628800.0,
      1.0 / 362880.0,     1.0 / 40320.0,     1.0 / 5040.0,      1.0 / 720.0,
      1.0 / 120.0,        1.0 / 24.0,        1.0 / 6.0,         0.5,
      1.0,                1.0};
  __m256d poly = _mm256_set1_pd(kInvFact[0]);
  for (std::size_t i = 1; i < sizeof(kInvFact) / sizeof(double); ++i)
    poly = _mm256_fmadd_pd(poly, r, _mm256_set1_pd(kInvFact[i]));

  const __m128i n32 = _mm256_cvtpd_epi32(n);
  __m256i bits = _mm256_add_epi64(_mm256_cvtepi32_epi64(n32), _mm256_set1_epi64x(1023));
  bits = _mm256_slli_epi64(bits, 52);
  return _mm256_mul_pd(poly, _mm256_castsi256_pd(bits));
}

// tanh: rational approximation x + x^3 P(x^2)/Q(x^2) for |x| < 0.625,
// 1 - 2 / (exp(2|x|) + 1) above, saturated to 1 beyond |x| = 22.
inline __m256d tanh_pd(__m256d x) {
  const __m256d sign_bit = _mm256_set1_pd(-0.0);
  const __m256d ax = _mm256_andnot_pd(sign_bit, x);
  const __m256d one = _mm256_set1_pd(1.0);

  const __m256d s = _mm256_mul_pd(ax, ax);
  __m256d p = _mm256_set1_pd(-9.64399179425052238628E-1);
  p = _mm256_fmadd_pd(p, s, _mm256_set1_pd(-9.92877231001918586564E1));
  p = _mm256_fmadd_pd(p, s, _mm256_set1_pd(-1.61468768441708447952E3));
  __m256d q = _mm256_add_pd(s, _mm256_set1_pd(1.12811678491632931402E2));
  q = _mm256_fmadd_pd(q, s, _mm256_set1_pd(2.23548839060100448583E3));
  q = _mm256_fmadd_pd(q, s, _mm256_set1_pd(4.84406305325125486048E3));
  const __m256d small = _mm256_fmadd_pd(_mm256_mul_pd(ax, s), _mm256_div_pd(p, q), ax);

  // operand order keeps NaN inputs NaN
  const __m256d clamped = _mm256_min_pd(_mm256_set1_pd(22.0), ax);
  const __m256d e = exp_pd(_mm256_add_pd(clamped, clamped));
  __m256d large = _mm256_sub_pd(one, _mm256_div_pd(_mm256_set1_pd(2.0), _mm256_add_pd(e, one)));

  const __m256d use_small = _mm256_cmp_pd(ax, _mm256_set1_pd(0.625), _CMP_LT_OQ);
  return _mm256_or_pd(_mm256_blendv_pd(large, small, use_small), _mm256_and_pd(x, sign_bit));
}

void tanh_forward(std::size_t n, const double* z, double* y) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(y + i, tanh_pd(_mm256_loadu_pd(z + i)));
  if (i < n) {
    const __m256i mask = tail_mask(n - i);
    _mm256_maskstore_pd(y + i, mask, tanh_pd(_mm256_maskload_pd(z + i, mask)));
  }
}

void tanh_backward(std::size_t n, const double* y, double* g) {
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d yv = _mm256_loadu_pd(y + i);
    const __m256d d = _mm256_fnmadd_pd(yv, yv, one);
    _mm256_storeu_pd(g + i, _mm256_mul_pd(_mm256_loadu_pd(g + i), d));
  }
  for (; i < n; ++i) g[i] *= 1.0 - y[i] * y[i];
}

void relu_forward(std::size_t n, const double* z, double* y) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d zv = _mm256_loadu_pd(z + i);
    _mm256_storeu_pd(y + i, _mm256_and_pd(zv, _mm256_cmp_pd(zv, zero, _CMP_GT_OQ)));
  }
  for (; i < n; ++i) y[i] = z[i] > 0.0 ? z[i] : 0.0;
}

void relu_backward(std::size_t n, const double* y, double* g) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d keep = _mm256_cmp_pd(_mm256_loadu_pd(y + i), zero, _CMP_GT_OQ);
    _mm256_storeu_pd(g + i, _mm256_and_pd(_mm256_loadu_pd(g + i), keep));
  }
  for (; i < n; ++i)
    if (!(y[i] > 0.0)) g[i] = 0.0;
}

void adam_update(std::size_t n, double* p, const double* g, double* m, double* v, double lr,
                 double beta1, double beta2, double eps, double bc1, double bc2) {
  const __m256d b1 = _mm256_set1_pd(beta1), c1 = _mm256_set1_pd(1.0 - beta1);
  const __m256d b2 = _mm256_set1_pd(beta2), c2 = _mm256_set1_pd(1.0 - beta2);
  const __m256d vbc1 = _mm256_set1_pd(bc1), vbc2 = _mm256_set1_pd(bc2);
  const __m256d veps = _mm256_set1_pd(eps), vlr = _mm256_set1_pd(lr);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d gv = _mm256_loadu_pd(g + i);
    const __m256d mv = _mm256_add_pd(_mm256_mul_pd(b1, _mm256_loadu_pd(m + i)), _mm256_mul_pd(c1, gv));
    const __m256d vv = _mm256_add_pd(_mm256_mul_pd(b2, _mm256_loadu_pd(v + i)),
                                     _mm256_mul_pd(c2, _mm256_mul_pd(gv, gv)));
    _mm256_storeu_pd(m + i, mv);
    _mm256_storeu_pd(v + i, vv);
    const __m256d den = _mm256_add_pd(_mm256_sqrt_pd(_mm256_div_pd(vv, vbc2)), veps);
    const __m256d step = _mm256_div_pd(_mm256_mul_pd(vlr, _mm256_div_pd(mv, vbc1)), den);
    _mm256_storeu_pd(p + i, _mm256_sub_pd(_mm256_loadu_pd(p + i), step));
  }
  for (; i < n; ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * (g[i] * g[i]);
    p[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + eps);
  }
}

}  // namespace

const KernelTable& avx2_kernel_table() {
  static const KernelTable table{"avx2",        gemm,               column_sums,
                                 tanh_forward,  tanh_backward, relu_forward, relu_backward,
                                 adam_update};
  return table;
}

}  // namespace fluxnet::nn::kernels
