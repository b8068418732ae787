// AVX2+FMA kernel variant. Per output element the accumulation chains use
// the same term order as the scalar reference (ascending k), fused instead
// of separate multiply/add; the batched and per-sample entry points share
// the exact chain, which is what makes streaming generation reproduce the
// batched forward bitwise.

#include "internal.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define MBG_X86 1
#include <immintrin.h>
#else
#define MBG_X86 0
#endif

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <vector>

namespace mbg::kernels::detail {

#if MBG_X86

namespace {

inline float hsum8(__m256 v) {
  __m128 lo = _mm256_castps256_ps128(v);
  __m128 hi = _mm256_extractf128_ps(v, 1);
  lo = _mm_add_ps(lo, hi);
  lo = _mm_add_ps(lo, _mm_movehl_ps(lo, lo));
  lo = _mm_add_ss(lo, _mm_shuffle_ps(lo, lo, 1));
  return _mm_cvtss_f32(lo);
}

inline double hsum4(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  lo = _mm_add_sd(lo, _mm_unpackhi_pd(lo, lo));
  return _mm_cvtsd_f64(lo);
}

inline float hmax8(__m256 v) {
  __m128 lo = _mm256_castps256_ps128(v);
  __m128 hi = _mm256_extractf128_ps(v, 1);
  lo = _mm_max_ps(lo, hi);
  lo = _mm_max_ps(lo, _mm_movehl_ps(lo, lo));
  lo = _mm_max_ss(lo, _mm_shuffle_ps(lo, lo, 1));
  return _mm_cvtss_f32(lo);
}

// exp with ~1 ulp accuracy over the clamped range (Cody-Waite reduction,
// degree-5 polynomial). Inputs are clamped to keep 2^n finite and normal.
constexpr float kExpHi = 88.3762626647950f;
constexpr float kExpLo = -87.3365478515625f;
constexpr float kLog2E = 1.44269504088896341f;
constexpr float kC1 = 0.693359375f;
constexpr float kC2 = -2.12194440e-4f;
constexpr float kP0 = 1.9875691500e-4f;
constexpr float kP1 = 1.3981999507e-3f;
constexpr float kP2 = 8.3334519073e-3f;
constexpr float kP3 = 4.1665795894e-2f;
constexpr float kP4 = 1.6666665459e-1f;
constexpr float kP5 = 5.0000001201e-1f;

inline __m256 exp256(__m256 x) {
  x = _mm256_min_ps(_mm256_max_ps(x, _mm256_set1_ps(kExpLo)),
                    _mm256_set1_ps(kExpHi));
  __m256 fx = _mm256_fmadd_ps(x, _mm256_set1_ps(kLog2E), _mm256_set1_ps(0.5f));
  fx = _mm256_floor_ps(fx);
  x = _mm256_fnmadd_ps(fx, _mm256_set1_ps(kC1), x);
  x = _mm256_fnmadd_ps(fx, _mm256_set1_ps(kC2), x);
  const __m256 z = _mm256_mul_ps(x, x);
  __m256 y = _mm256_set1_ps(kP0);
  y = _mm256_fmadd_ps(y, x, _mm256_set1_ps(kP1));
  y = _mm256_fmadd_ps(y, x, _mm256_set1_ps(kP2));
  y = _mm256_fmadd_ps(y, x, _mm256_set1_ps(kP3));
  y = _mm256_fmadd_ps(y, x, _mm256_set1_ps(kP4));
  y = _mm256_fmadd_ps(y, x, _mm256_set1_ps(kP5));
  y = _mm256_fmadd_ps(y, z, x);
  y = _mm256_add_ps(y, _mm256_set1_ps(1.0f));
  const __m256i n = _mm256_cvttps_epi32(fx);
  const __m256i pow2n =
      _mm256_slli_epi32(_mm256_add_epi32(n, _mm256_set1_epi32(127)), 23);
  return _mm256_mul_ps(y, _mm256_castsi256_ps(pow2n));
}

// scalar twin of exp256, used for vector tails so every element goes through
// the same polynomial
inline float exp_poly(float xin) {
  float x = std::min(std::max(xin, kExpLo), kExpHi);
  float fx = std::floor(std::fma(x, kLog2E, 0.5f));
  x = std::fma(fx, -kC1, x);
  x = std::fma(fx, -kC2, x);
  const float z = x * x;
  float y = kP0;
  y = std::fma(y, x, kP1);
  y = std::fma(y, x, kP2);
  y = std::fma(y, x, kP3);
  y = std::fma(y, x, kP4);
  y = std::fma(y, x, kP5);
  y = std::fma(y, z, x);
  y += 1.0f;
  const int n = static_cast<int>(fx);
  float pow2n;
  std::uint32_t bits = static_cast<std::uint32_t>(n + 127) << 23;
  __builtin_memcpy(&pow2n, &bits, 4);
  return y * pow2n;
}

inline float tanh_poly(float x) {
  const float a = std::fabs(x);
  const float e = exp_poly(2.0f * a);
  const float t = 1.0f - 2.0f / (e + 1.0f);
  return x < 0.0f ? -t : t;
}

inline float sigmoid_poly(float x) {
  const float em = exp_poly(-std::fabs(x));
  const float sp = 1.0f / (1.0f + em);
  return x >= 0.0f ? sp : 1.0f - sp;
}

void gemm_acc_f(float* c, const float* w, const float* x, std::size_t m,
                std::size_t k, std::size_t t) {
  // row pairs share the streamed X tiles; position chunks keep the active
  // X slice cache-resident across row passes. Per element the chain stays
  // an ascending-j FMA sequence.
  constexpr std::size_t kChunk = 4096;
  for (std::size_t u0 = 0; u0 < t; u0 += kChunk) {
    const std::size_t u1 = std::min(t, u0 + kChunk);
    const std::size_t t32 = u0 + ((u1 - u0) & ~std::size_t(31));
    const std::size_t t8 = u0 + ((u1 - u0) & ~std::size_t(7));
    std::size_t i = 0;
    for (; i + 2 <= m; i += 2) {
      float* c0 = c + i * t;
      float* c1 = c0 + t;
      const float* w0 = w + i * k;
      const float* w1 = w0 + k;
      std::size_t u = u0;
      for (; u < t32; u += 32) {
        __m256 a00 = _mm256_loadu_ps(c0 + u);
        __m256 a01 = _mm256_loadu_ps(c0 + u + 8);
        __m256 a02 = _mm256_loadu_ps(c0 + u + 16);
        __m256 a03 = _mm256_loadu_ps(c0 + u + 24);
        __m256 a10 = _mm256_loadu_ps(c1 + u);
        __m256 a11 = _mm256_loadu_ps(c1 + u + 8);
        __m256 a12 = _mm256_loadu_ps(c1 + u + 16);
        __m256 a13 = _mm256_loadu_ps(c1 + u + 24);
        for (std::size_t j = 0; j < k; ++j) {
          const float* xp = x + j * t + u;
          const __m256 x0 = _mm256_loadu_ps(xp);
          const __m256 x1 = _mm256_loadu_ps(xp + 8);
          const __m256 x2 = _mm256_loadu_ps(xp + 16);
          const __m256 x3 = _mm256_loadu_ps(xp + 24);
          const __m256 wv0 = _mm256_set1_ps(w0[j]);
          a00 = _mm256_fmadd_ps(wv0, x0, a00);
          a01 = _mm256_fmadd_ps(wv0, x1, a01);
          a02 = _mm256_fmadd_ps(wv0, x2, a02);
          a03 = _mm256_fmadd_ps(wv0, x3, a03);
          const __m256 wv1 = _mm256_set1_ps(w1[j]);
          a10 = _mm256_fmadd_ps(wv1, x0, a10);
          a11 = _mm256_fmadd_ps(wv1, x1, a11);
          a12 = _mm256_fmadd_ps(wv1, x2, a12);
          a13 = _mm256_fmadd_ps(wv1, x3, a13);
        }
        _mm256_storeu_ps(c0 + u, a00);
        _mm256_storeu_ps(c0 + u + 8, a01);
        _mm256_storeu_ps(c0 + u + 16, a02);
        _mm256_storeu_ps(c0 + u + 24, a03);
        _mm256_storeu_ps(c1 + u, a10);
        _mm256_storeu_ps(c1 + u + 8, a11);
        _mm256_storeu_ps(c1 + u + 16, a12);
        _mm256_storeu_ps(c1 + u + 24, a13);
      }
      for (; u < t8; u += 8) {
        __m256 a0 = _mm256_loadu_ps(c0 + u);
        __m256 a1 = _mm256_loadu_ps(c1 + u);
        for (std::size_t j = 0; j < k; ++j) {
          const __m256 xv = _mm256_loadu_ps(x + j * t + u);
          a0 = _mm256_fmadd_ps(_mm256_set1_ps(w0[j]), xv, a0);
          a1 = _mm256_fmadd_ps(_mm256_set1_ps(w1[j]), xv, a1);
        }
        _mm256_storeu_ps(c0 + u, a0);
        _mm256_storeu_ps(c1 + u, a1);
      }
      for (; u < u1; ++u) {
        float a0 = c0[u];
        float a1 = c1[u];
        for (std::size_t j = 0; j < k; ++j) {
          const float xv = x[j * t + u];
          a0 = std::fma(w0[j], xv, a0);
          a1 = std::fma(w1[j], xv, a1);
        }
        c0[u] = a0;
        c1[u] = a1;
      }
    }
    for (; i < m; ++i) {
      float* crow = c + i * t;
      const float* wrow = w + i * k;
      std::size_t u = u0;
      for (; u < t8; u += 8) {
        __m256 a0 = _mm256_loadu_ps(crow + u);
        for (std::size_t j = 0; j < k; ++j) {
          a0 = _mm256_fmadd_ps(_mm256_set1_ps(wrow[j]),
                               _mm256_loadu_ps(x + j * t + u), a0);
        }
        _mm256_storeu_ps(crow + u, a0);
      }
      for (; u < u1; ++u) {
        float a = crow[u];
        for (std::size_t j = 0; j < k; ++j)
          a = std::fma(wrow[j], x[j * t + u], a);
        crow[u] = a;
      }
    }
  }
}

void gemm_acc2_f(float* c1, float* c2, const float* w1, const float* w2,
                 const float* x, std::size_t m, std::size_t k,
                 std::size_t t) {
  constexpr std::size_t kChunk = 2048;
  for (std::size_t u0 = 0; u0 < t; u0 += kChunk) {
    const std::size_t u1 = std::min(t, u0 + kChunk);
    const std::size_t t16 = u0 + ((u1 - u0) & ~std::size_t(15));
    for (std::size_t i = 0; i + 2 <= m; i += 2) {
      float* c1a = c1 + i * t;
      float* c1b = c1a + t;
      float* c2a = c2 + i * t;
      float* c2b = c2a + t;
      const float* w1a = w1 + i * k;
      const float* w1b = w1a + k;
      const float* w2a = w2 + i * k;
      const float* w2b = w2a + k;
      std::size_t u = u0;
      for (; u < t16; u += 16) {
        __m256 a10 = _mm256_loadu_ps(c1a + u);
        __m256 a11 = _mm256_loadu_ps(c1a + u + 8);
        __m256 b10 = _mm256_loadu_ps(c1b + u);
        __m256 b11 = _mm256_loadu_ps(c1b + u + 8);
        __m256 a20 = _mm256_loadu_ps(c2a + u);
        __m256 a21 = _mm256_loadu_ps(c2a + u + 8);
        __m256 b20 = _mm256_loadu_ps(c2b + u);
        __m256 b21 = _mm256_loadu_ps(c2b + u + 8);
        for (std::size_t j = 0; j < k; ++j) {
          const float* xp = x + j * t + u;
          const __m256 x0 = _mm256_loadu_ps(xp);
          const __m256 x1 = _mm256_loadu_ps(xp + 8);
          const __m256 wa1 = _mm256_set1_ps(w1a[j]);
          a10 = _mm256_fmadd_ps(wa1, x0, a10);
          a11 = _mm256_fmadd_ps(wa1, x1, a11);
          const __m256 wb1 = _mm256_set1_ps(w1b[j]);
          b10 = _mm256_fmadd_ps(wb1, x0, b10);
          b11 = _mm256_fmadd_ps(wb1, x1, b11);
          const __m256 wa2 = _mm256_set1_ps(w2a[j]);
          a20 = _mm256_fmadd_ps(wa2, x0, a20);
          a21 = _mm256_fmadd_ps(wa2, x1, a21);
          const __m256 wb2 = _mm256_set1_ps(w2b[j]);
          b20 = _mm256_fmadd_ps(wb2, x0, b20);
          b21 = _mm256_fmadd_ps(wb2, x1, b21);
        }
        _mm256_storeu_ps(c1a + u, a10);
        _mm256_storeu_ps(c1a + u + 8, a11);
        _mm256_storeu_ps(c1b + u, b10);
        _mm256_storeu_ps(c1b + u + 8, b11);
        _mm256_storeu_ps(c2a + u, a20);
        _mm256_storeu_ps(c2a + u + 8, a21);
        _mm256_storeu_ps(c2b + u, b20);
        _mm256_storeu_ps(c2b + u + 8, b21);
      }
      for (; u < u1; ++u) {
        float r1a = c1a[u], r1b = c1b[u], r2a = c2a[u], r2b = c2b[u];
        for (std::size_t j = 0; j < k; ++j) {
          const float xv = x[j * t + u];
          r1a = std::fma(w1a[j], xv, r1a);
          r1b = std::fma(w1b[j], xv, r1b);
          r2a = std::fma(w2a[j], xv, r2a);
          r2b = std::fma(w2b[j], xv, r2b);
        }
        c1a[u] = r1a;
        c1b[u] = r1b;
        c2a[u] = r2a;
        c2b[u] = r2b;
      }
    }
  }
  if (m % 2 != 0) {
    const std::size_t i = m - 1;
    gemm_acc_f(c1 + i * t, w1 + i * k, x, 1, k, t);
    gemm_acc_f(c2 + i * t, w2 + i * k, x, 1, k, t);
  }
}

void gemm_bt2_acc_f(float* dw1, float* dw2, const float* dy1,
                    const float* dy2, const float* x, std::size_t m,
                    std::size_t k, std::size_t t) {
  constexpr std::size_t kChunk = 8192;
  std::vector<float> acc1(m * k, 0.0f), acc2v(m * k, 0.0f);
  for (std::size_t u0 = 0; u0 < t; u0 += kChunk) {
    const std::size_t u1 = std::min(t, u0 + kChunk);
    const std::size_t t8 = u0 + ((u1 - u0) & ~std::size_t(7));
    for (std::size_t i = 0; i < m; ++i) {
      const float* ya = dy1 + i * t;
      const float* yb = dy2 + i * t;
      std::size_t j = 0;
      for (; j + 4 <= k; j += 4) {
        const float* x0 = x + j * t;
        const float* x1 = x0 + t;
        const float* x2 = x1 + t;
        const float* x3 = x2 + t;
        __m256 sa0 = _mm256_setzero_ps(), sa1 = _mm256_setzero_ps();
        __m256 sa2 = _mm256_setzero_ps(), sa3 = _mm256_setzero_ps();
        __m256 sb0 = _mm256_setzero_ps(), sb1 = _mm256_setzero_ps();
        __m256 sb2 = _mm256_setzero_ps(), sb3 = _mm256_setzero_ps();
        std::size_t u = u0;
        for (; u < t8; u += 8) {
          const __m256 a = _mm256_loadu_ps(ya + u);
          const __m256 b = _mm256_loadu_ps(yb + u);
          const __m256 v0 = _mm256_loadu_ps(x0 + u);
          const __m256 v1 = _mm256_loadu_ps(x1 + u);
          const __m256 v2 = _mm256_loadu_ps(x2 + u);
          const __m256 v3 = _mm256_loadu_ps(x3 + u);
          sa0 = _mm256_fmadd_ps(a, v0, sa0);
          sa1 = _mm256_fmadd_ps(a, v1, sa1);
          sa2 = _mm256_fmadd_ps(a, v2, sa2);
          sa3 = _mm256_fmadd_ps(a, v3, sa3);
          sb0 = _mm256_fmadd_ps(b, v0, sb0);
          sb1 = _mm256_fmadd_ps(b, v1, sb1);
          sb2 = _mm256_fmadd_ps(b, v2, sb2);
          sb3 = _mm256_fmadd_ps(b, v3, sb3);
        }
        float ra0 = hsum8(sa0), ra1 = hsum8(sa1);
        float ra2 = hsum8(sa2), ra3 = hsum8(sa3);
        float rb0 = hsum8(sb0), rb1 = hsum8(sb1);
        float rb2 = hsum8(sb2), rb3 = hsum8(sb3);
        for (; u < u1; ++u) {
          const float a = ya[u], b = yb[u];
          ra0 = std::fma(a, x0[u], ra0);
          ra1 = std::fma(a, x1[u], ra1);
          ra2 = std::fma(a, x2[u], ra2);
          ra3 = std::fma(a, x3[u], ra3);
          rb0 = std::fma(b, x0[u], rb0);
          rb1 = std::fma(b, x1[u], rb1);
          rb2 = std::fma(b, x2[u], rb2);
          rb3 = std::fma(b, x3[u], rb3);
        }
        acc1[i * k + j] += ra0;
        acc1[i * k + j + 1] += ra1;
        acc1[i * k + j + 2] += ra2;
        acc1[i * k + j + 3] += ra3;
        acc2v[i * k + j] += rb0;
        acc2v[i * k + j + 1] += rb1;
        acc2v[i * k + j + 2] += rb2;
        acc2v[i * k + j + 3] += rb3;
      }
      for (; j < k; ++j) {
        const float* xr = x + j * t;
        __m256 s0 = _mm256_setzero_ps();
        __m256 s1 = _mm256_setzero_ps();
        std::size_t u = u0;
        for (; u < t8; u += 8) {
          const __m256 v = _mm256_loadu_ps(xr + u);
          s0 = _mm256_fmadd_ps(_mm256_loadu_ps(ya + u), v, s0);
          s1 = _mm256_fmadd_ps(_mm256_loadu_ps(yb + u), v, s1);
        }
        float r0 = hsum8(s0), r1 = hsum8(s1);
        for (; u < u1; ++u) {
          r0 = std::fma(ya[u], xr[u], r0);
          r1 = std::fma(yb[u], xr[u], r1);
        }
        acc1[i * k + j] += r0;
        acc2v[i * k + j] += r1;
      }
    }
  }
  for (std::size_t p = 0; p < m * k; ++p) dw1[p] += acc1[p];
  for (std::size_t p = 0; p < m * k; ++p) dw2[p] += acc2v[p];
}

void gemm_at_acc_f(float* dx, const float* w, const float* dy, std::size_t m,
                   std::size_t k, std::size_t t, std::size_t ws) {
  constexpr std::size_t kChunk = 4096;
  for (std::size_t u0 = 0; u0 < t; u0 += kChunk) {
    const std::size_t u1 = std::min(t, u0 + kChunk);
    const std::size_t t32 = u0 + ((u1 - u0) & ~std::size_t(31));
    const std::size_t t8 = u0 + ((u1 - u0) & ~std::size_t(7));
    std::size_t i = 0;
    for (; i + 2 <= k; i += 2) {
      float* d0 = dx + i * t;
      float* d1 = d0 + t;
      std::size_t u = u0;
      for (; u < t32; u += 32) {
        __m256 a00 = _mm256_loadu_ps(d0 + u);
        __m256 a01 = _mm256_loadu_ps(d0 + u + 8);
        __m256 a02 = _mm256_loadu_ps(d0 + u + 16);
        __m256 a03 = _mm256_loadu_ps(d0 + u + 24);
        __m256 a10 = _mm256_loadu_ps(d1 + u);
        __m256 a11 = _mm256_loadu_ps(d1 + u + 8);
        __m256 a12 = _mm256_loadu_ps(d1 + u + 16);
        __m256 a13 = _mm256_loadu_ps(d1 + u + 24);
        for (std::size_t j = 0; j < m; ++j) {
          const float* dyp = dy + j * t + u;
          const __m256 y0 = _mm256_loadu_ps(dyp);
          const __m256 y1 = _mm256_loadu_ps(dyp + 8);
          const __m256 y2 = _mm256_loadu_ps(dyp + 16);
          const __m256 y3 = _mm256_loadu_ps(dyp + 24);
          const __m256 w0 = _mm256_set1_ps(w[j * ws + i]);
          a00 = _mm256_fmadd_ps(w0, y0, a00);
          a01 = _mm256_fmadd_ps(w0, y1, a01);
          a02 = _mm256_fmadd_ps(w0, y2, a02);
          a03 = _mm256_fmadd_ps(w0, y3, a03);
          const __m256 w1 = _mm256_set1_ps(w[j * ws + i + 1]);
          a10 = _mm256_fmadd_ps(w1, y0, a10);
          a11 = _mm256_fmadd_ps(w1, y1, a11);
          a12 = _mm256_fmadd_ps(w1, y2, a12);
          a13 = _mm256_fmadd_ps(w1, y3, a13);
        }
        _mm256_storeu_ps(d0 + u, a00);
        _mm256_storeu_ps(d0 + u + 8, a01);
        _mm256_storeu_ps(d0 + u + 16, a02);
        _mm256_storeu_ps(d0 + u + 24, a03);
        _mm256_storeu_ps(d1 + u, a10);
        _mm256_storeu_ps(d1 + u + 8, a11);
        _mm256_storeu_ps(d1 + u + 16, a12);
        _mm256_storeu_ps(d1 + u + 24, a13);
      }
      for (; u < t8; u += 8) {
        __m256 a0 = _mm256_loadu_ps(d0 + u);
        __m256 a1 = _mm256_loadu_ps(d1 + u);
        for (std::size_t j = 0; j < m; ++j) {
          const __m256 yv = _mm256_loadu_ps(dy + j * t + u);
          a0 = _mm256_fmadd_ps(_mm256_set1_ps(w[j * ws + i]), yv, a0);
          a1 = _mm256_fmadd_ps(_mm256_set1_ps(w[j * ws + i + 1]), yv, a1);
        }
        _mm256_storeu_ps(d0 + u, a0);
        _mm256_storeu_ps(d1 + u, a1);
      }
      for (; u < u1; ++u) {
        float a0 = d0[u];
        float a1 = d1[u];
        for (std::size_t j = 0; j < m; ++j) {
          const float yv = dy[j * t + u];
          a0 = std::fma(w[j * ws + i], yv, a0);
          a1 = std::fma(w[j * ws + i + 1], yv, a1);
        }
        d0[u] = a0;
        d1[u] = a1;
      }
    }
    for (; i < k; ++i) {
      float* dxrow = dx + i * t;
      std::size_t u = u0;
      for (; u < t8; u += 8) {
        __m256 a0 = _mm256_loadu_ps(dxrow + u);
        for (std::size_t j = 0; j < m; ++j) {
          a0 = _mm256_fmadd_ps(_mm256_set1_ps(w[j * ws + i]),
                               _mm256_loadu_ps(dy + j * t + u), a0);
        }
        _mm256_storeu_ps(dxrow + u, a0);
      }
      for (; u < u1; ++u) {
        float a = dxrow[u];
        for (std::size_t j = 0; j < m; ++j)
          a = std::fma(w[j * ws + i], dy[j * t + u], a);
        dxrow[u] = a;
      }
    }
  }
}

void gemm_bt_acc_f(float* dw, const float* dy, const float* x, std::size_t m,
                   std::size_t k, std::size_t t) {
  // per (i, j) the reduction is a fixed 8-lane FMA chain over ascending
  // positions, summed lane-wise and then horizontally; register tiles and
  // chunking only change which chains run together, not their order
  constexpr std::size_t kChunk = 8192;
  std::vector<float> acc(m * k, 0.0f);
  for (std::size_t u0 = 0; u0 < t; u0 += kChunk) {
    const std::size_t u1 = std::min(t, u0 + kChunk);
    const std::size_t t8 = u0 + ((u1 - u0) & ~std::size_t(7));
    std::size_t i = 0;
    for (; i + 2 <= m; i += 2) {
      const float* y0 = dy + i * t;
      const float* y1 = y0 + t;
      std::size_t j = 0;
      for (; j + 4 <= k; j += 4) {
        const float* x0 = x + j * t;
        const float* x1 = x0 + t;
        const float* x2 = x1 + t;
        const float* x3 = x2 + t;
        __m256 s00 = _mm256_setzero_ps(), s01 = _mm256_setzero_ps();
        __m256 s02 = _mm256_setzero_ps(), s03 = _mm256_setzero_ps();
        __m256 s10 = _mm256_setzero_ps(), s11 = _mm256_setzero_ps();
        __m256 s12 = _mm256_setzero_ps(), s13 = _mm256_setzero_ps();
        std::size_t u = u0;
        for (; u < t8; u += 8) {
          const __m256 a = _mm256_loadu_ps(y0 + u);
          const __m256 b = _mm256_loadu_ps(y1 + u);
          const __m256 v0 = _mm256_loadu_ps(x0 + u);
          const __m256 v1 = _mm256_loadu_ps(x1 + u);
          const __m256 v2 = _mm256_loadu_ps(x2 + u);
          const __m256 v3 = _mm256_loadu_ps(x3 + u);
          s00 = _mm256_fmadd_ps(a, v0, s00);
          s01 = _mm256_fmadd_ps(a, v1, s01);
          s02 = _mm256_fmadd_ps(a, v2, s02);
          s03 = _mm256_fmadd_ps(a, v3, s03);
          s10 = _mm256_fmadd_ps(b, v0, s10);
          s11 = _mm256_fmadd_ps(b, v1, s11);
          s12 = _mm256_fmadd_ps(b, v2, s12);
          s13 = _mm256_fmadd_ps(b, v3, s13);
        }
        float r00 = hsum8(s00), r01 = hsum8(s01);
        float r02 = hsum8(s02), r03 = hsum8(s03);
        float r10 = hsum8(s10), r11 = hsum8(s11);
        float r12 = hsum8(s12), r13 = hsum8(s13);
        for (; u < u1; ++u) {
          const float a = y0[u], b = y1[u];
          r00 = std::fma(a, x0[u], r00);
          r01 = std::fma(a, x1[u], r01);
          r02 = std::fma(a, x2[u], r02);
          r03 = std::fma(a, x3[u], r03);
          r10 = std::fma(b, x0[u], r10);
          r11 = std::fma(b, x1[u], r11);
          r12 = std::fma(b, x2[u], r12);
          r13 = std::fma(b, x3[u], r13);
        }
        float* arow0 = acc.data() + i * k + j;
        float* arow1 = arow0 + k;
        arow0[0] += r00;
        arow0[1] += r01;
        arow0[2] += r02;
        arow0[3] += r03;
        arow1[0] += r10;
        arow1[1] += r11;
        arow1[2] += r12;
        arow1[3] += r13;
      }
      for (; j < k; ++j) {
        const float* xr = x + j * t;
        __m256 s0 = _mm256_setzero_ps();
        __m256 s1 = _mm256_setzero_ps();
        std::size_t u = u0;
        for (; u < t8; u += 8) {
          const __m256 v = _mm256_loadu_ps(xr + u);
          s0 = _mm256_fmadd_ps(_mm256_loadu_ps(y0 + u), v, s0);
          s1 = _mm256_fmadd_ps(_mm256_loadu_ps(y1 + u), v, s1);
        }
        float r0 = hsum8(s0), r1 = hsum8(s1);
        for (; u < u1; ++u) {
          r0 = std::fma(y0[u], xr[u], r0);
          r1 = std::fma(y1[u], xr[u], r1);
        }
        acc[i * k + j] += r0;
        acc[(i + 1) * k + j] += r1;
      }
    }
    for (; i < m; ++i) {
      const float* yr = dy + i * t;
      for (std::size_t j = 0; j < k; ++j) {
        const float* xr = x + j * t;
        __m256 s0 = _mm256_setzero_ps();
        std::size_t u = u0;
        for (; u < t8; u += 8)
          s0 = _mm256_fmadd_ps(_mm256_loadu_ps(yr + u),
                               _mm256_loadu_ps(xr + u), s0);
        float r = hsum8(s0);
        for (; u < u1; ++u) r = std::fma(yr[u], xr[u], r);
        acc[i * k + j] += r;
      }
    }
  }
  for (std::size_t p = 0; p < m * k; ++p) dw[p] += acc[p];
}

void gemm_xt_acc_f(float* c, const float* x, const float* wt, std::size_t k,
                   std::size_t t, std::size_t n, std::size_t xs) {
  const std::size_t n32 = n & ~std::size_t(31);
  const std::size_t n8 = n & ~std::size_t(7);
  for (std::size_t tau = 0; tau < t; ++tau) {
    float* crow = c + tau * n;
    std::size_t u = 0;
    for (; u < n32; u += 32) {
      __m256 a0 = _mm256_loadu_ps(crow + u);
      __m256 a1 = _mm256_loadu_ps(crow + u + 8);
      __m256 a2 = _mm256_loadu_ps(crow + u + 16);
      __m256 a3 = _mm256_loadu_ps(crow + u + 24);
      for (std::size_t j = 0; j < k; ++j) {
        const __m256 xv = _mm256_set1_ps(x[j * xs + tau]);
        const float* wp = wt + j * n + u;
        a0 = _mm256_fmadd_ps(xv, _mm256_loadu_ps(wp), a0);
        a1 = _mm256_fmadd_ps(xv, _mm256_loadu_ps(wp + 8), a1);
        a2 = _mm256_fmadd_ps(xv, _mm256_loadu_ps(wp + 16), a2);
        a3 = _mm256_fmadd_ps(xv, _mm256_loadu_ps(wp + 24), a3);
      }
      _mm256_storeu_ps(crow + u, a0);
      _mm256_storeu_ps(crow + u + 8, a1);
      _mm256_storeu_ps(crow + u + 16, a2);
      _mm256_storeu_ps(crow + u + 24, a3);
    }
    for (; u < n8; u += 8) {
      __m256 a0 = _mm256_loadu_ps(crow + u);
      for (std::size_t j = 0; j < k; ++j) {
        a0 = _mm256_fmadd_ps(_mm256_set1_ps(x[j * xs + tau]),
                             _mm256_loadu_ps(wt + j * n + u), a0);
      }
      _mm256_storeu_ps(crow + u, a0);
    }
    for (; u < n; ++u) {
      float a = crow[u];
      for (std::size_t j = 0; j < k; ++j)
        a = std::fma(x[j * xs + tau], wt[j * n + u], a);
      crow[u] = a;
    }
  }
}

void gemm_xt_in_acc_f(float* dx, const float* dy, const float* wt,
                      std::size_t k, std::size_t t, std::size_t n,
                      std::size_t xs) {
  const std::size_t n32 = n & ~std::size_t(31);
  const std::size_t n8 = n & ~std::size_t(7);
  for (std::size_t tau = 0; tau < t; ++tau) {
    const float* dyrow = dy + tau * n;
    for (std::size_t i = 0; i < k; ++i) {
      const float* wrow = wt + i * n;
      __m256 s0 = _mm256_setzero_ps();
      __m256 s1 = _mm256_setzero_ps();
      __m256 s2 = _mm256_setzero_ps();
      __m256 s3 = _mm256_setzero_ps();
      std::size_t u = 0;
      for (; u < n32; u += 32) {
        s0 = _mm256_fmadd_ps(_mm256_loadu_ps(wrow + u),
                             _mm256_loadu_ps(dyrow + u), s0);
        s1 = _mm256_fmadd_ps(_mm256_loadu_ps(wrow + u + 8),
                             _mm256_loadu_ps(dyrow + u + 8), s1);
        s2 = _mm256_fmadd_ps(_mm256_loadu_ps(wrow + u + 16),
                             _mm256_loadu_ps(dyrow + u + 16), s2);
        s3 = _mm256_fmadd_ps(_mm256_loadu_ps(wrow + u + 24),
                             _mm256_loadu_ps(dyrow + u + 24), s3);
      }
      for (; u < n8; u += 8) {
        s0 = _mm256_fmadd_ps(_mm256_loadu_ps(wrow + u),
                             _mm256_loadu_ps(dyrow + u), s0);
      }
      float acc = hsum8(_mm256_add_ps(_mm256_add_ps(s0, s1),
                                      _mm256_add_ps(s2, s3)));
      for (; u < n; ++u) acc = std::fma(wrow[u], dyrow[u], acc);
      dx[i * xs + tau] += acc;
    }
  }
}

void ger_rows_acc_f(float* dwt, const float* x, const float* dy, std::size_t k,
                    std::size_t t, std::size_t n) {
  // output strips stay in registers per position chunk; dY slices stay
  // cache-resident across the k rows of one chunk
  constexpr std::size_t kChunk = 1024;
  constexpr std::size_t kStrip = 32;  // 4 ymm accumulators
  const std::size_t n_strips = n / kStrip;
  for (std::size_t u0 = 0; u0 < t; u0 += kChunk) {
    const std::size_t u1 = std::min(t, u0 + kChunk);
    for (std::size_t i = 0; i < k; ++i) {
      float* dwrow = dwt + i * n;
      const float* xrow = x + i * t;
      for (std::size_t sidx = 0; sidx < n_strips; ++sidx) {
        const std::size_t v = sidx * kStrip;
        __m256 a0 = _mm256_loadu_ps(dwrow + v);
        __m256 a1 = _mm256_loadu_ps(dwrow + v + 8);
        __m256 a2 = _mm256_loadu_ps(dwrow + v + 16);
        __m256 a3 = _mm256_loadu_ps(dwrow + v + 24);
        for (std::size_t tau = u0; tau < u1; ++tau) {
          const __m256 xv = _mm256_set1_ps(xrow[tau]);
          const float* dyp = dy + tau * n + v;
          a0 = _mm256_fmadd_ps(xv, _mm256_loadu_ps(dyp), a0);
          a1 = _mm256_fmadd_ps(xv, _mm256_loadu_ps(dyp + 8), a1);
          a2 = _mm256_fmadd_ps(xv, _mm256_loadu_ps(dyp + 16), a2);
          a3 = _mm256_fmadd_ps(xv, _mm256_loadu_ps(dyp + 24), a3);
        }
        _mm256_storeu_ps(dwrow + v, a0);
        _mm256_storeu_ps(dwrow + v + 8, a1);
        _mm256_storeu_ps(dwrow + v + 16, a2);
        _mm256_storeu_ps(dwrow + v + 24, a3);
      }
      for (std::size_t v = n_strips * kStrip; v < n; ++v) {
        float a = dwrow[v];
        for (std::size_t tau = u0; tau < u1; ++tau)
          a = std::fma(xrow[tau], dy[tau * n + v], a);
        dwrow[v] = a;
      }
    }
  }
}

void matvec_t_acc_f(float* out, const float* wt, const float* x, std::size_t k,
                    std::size_t m) {
  const std::size_t m32 = m & ~std::size_t(31);
  const std::size_t m8 = m & ~std::size_t(7);
  std::size_t u = 0;
  for (; u < m32; u += 32) {
    __m256 a0 = _mm256_loadu_ps(out + u);
    __m256 a1 = _mm256_loadu_ps(out + u + 8);
    __m256 a2 = _mm256_loadu_ps(out + u + 16);
    __m256 a3 = _mm256_loadu_ps(out + u + 24);
    for (std::size_t j = 0; j < k; ++j) {
      const __m256 xv = _mm256_set1_ps(x[j]);
      const float* wp = wt + j * m + u;
      a0 = _mm256_fmadd_ps(xv, _mm256_loadu_ps(wp), a0);
      a1 = _mm256_fmadd_ps(xv, _mm256_loadu_ps(wp + 8), a1);
      a2 = _mm256_fmadd_ps(xv, _mm256_loadu_ps(wp + 16), a2);
      a3 = _mm256_fmadd_ps(xv, _mm256_loadu_ps(wp + 24), a3);
    }
    _mm256_storeu_ps(out + u, a0);
    _mm256_storeu_ps(out + u + 8, a1);
    _mm256_storeu_ps(out + u + 16, a2);
    _mm256_storeu_ps(out + u + 24, a3);
  }
  for (; u < m8; u += 8) {
    __m256 a0 = _mm256_loadu_ps(out + u);
    for (std::size_t j = 0; j < k; ++j) {
      a0 = _mm256_fmadd_ps(_mm256_set1_ps(x[j]),
                           _mm256_loadu_ps(wt + j * m + u), a0);
    }
    _mm256_storeu_ps(out + u, a0);
  }
  for (; u < m; ++u) {
    float a = out[u];
    for (std::size_t j = 0; j < k; ++j) a = std::fma(x[j], wt[j * m + u], a);
    out[u] = a;
  }
}

float dot_f(const float* a, const float* b, std::size_t n) {
  const std::size_t n32 = n & ~std::size_t(31);
  const std::size_t n8 = n & ~std::size_t(7);
  __m256 s0 = _mm256_setzero_ps();
  __m256 s1 = _mm256_setzero_ps();
  __m256 s2 = _mm256_setzero_ps();
  __m256 s3 = _mm256_setzero_ps();
  std::size_t u = 0;
  for (; u < n32; u += 32) {
    s0 = _mm256_fmadd_ps(_mm256_loadu_ps(a + u), _mm256_loadu_ps(b + u), s0);
    s1 = _mm256_fmadd_ps(_mm256_loadu_ps(a + u + 8),
                         _mm256_loadu_ps(b + u + 8), s1);
    s2 = _mm256_fmadd_ps(_mm256_loadu_ps(a + u + 16),
                         _mm256_loadu_ps(b + u + 16), s2);
    s3 = _mm256_fmadd_ps(_mm256_loadu_ps(a + u + 24),
                         _mm256_loadu_ps(b + u + 24), s3);
  }
  for (; u < n8; u += 8) {
    s0 = _mm256_fmadd_ps(_mm256_loadu_ps(a + u), _mm256_loadu_ps(b + u), s0);
  }
  float acc =
      hsum8(_mm256_add_ps(_mm256_add_ps(s0, s1), _mm256_add_ps(s2, s3)));
  for (; u < n; ++u) acc = std::fma(a[u], b[u], acc);
  return acc;
}

void axpy_f(float* y, float a, const float* x, std::size_t n) {
  const __m256 av = _mm256_set1_ps(a);
  const std::size_t n8 = n & ~std::size_t(7);
  std::size_t u = 0;
  for (; u < n8; u += 8) {
    _mm256_storeu_ps(
        y + u, _mm256_fmadd_ps(av, _mm256_loadu_ps(x + u), _mm256_loadu_ps(y + u)));
  }
  for (; u < n; ++u) y[u] = std::fma(a, x[u], y[u]);
}

void gated_act_f(float* tv, float* sv, float* uv, const float* zf,
                 const float* zg, std::size_t n) {
  const std::size_t n8 = n & ~std::size_t(7);
  const __m256 one = _mm256_set1_ps(1.0f);
  const __m256 two = _mm256_set1_ps(2.0f);
  const __m256 sign_mask = _mm256_set1_ps(-0.0f);
  std::size_t u = 0;
  for (; u < n8; u += 8) {
    // tanh(z) = sign(z) * (1 - 2 / (exp(2|z|) + 1))
    const __m256 f = _mm256_loadu_ps(zf + u);
    const __m256 af = _mm256_andnot_ps(sign_mask, f);
    const __m256 ef = exp256(_mm256_mul_ps(two, af));
    __m256 th = _mm256_sub_ps(one, _mm256_div_ps(two, _mm256_add_ps(ef, one)));
    th = _mm256_or_ps(th, _mm256_and_ps(sign_mask, f));
    // sigmoid(z) = 1/(1+exp(-|z|)) reflected for negative z
    const __m256 g = _mm256_loadu_ps(zg + u);
    const __m256 ag = _mm256_andnot_ps(sign_mask, g);
    const __m256 eg = exp256(_mm256_sub_ps(_mm256_setzero_ps(), ag));
    const __m256 sp = _mm256_div_ps(one, _mm256_add_ps(one, eg));
    const __m256 neg = _mm256_cmp_ps(g, _mm256_setzero_ps(), _CMP_LT_OQ);
    const __m256 sg = _mm256_blendv_ps(sp, _mm256_sub_ps(one, sp), neg);
    _mm256_storeu_ps(tv + u, th);
    _mm256_storeu_ps(sv + u, sg);
    _mm256_storeu_ps(uv + u, _mm256_mul_ps(th, sg));
  }
  for (; u < n; ++u) {
    const float th = tanh_poly(zf[u]);
    const float sg = sigmoid_poly(zg[u]);
    tv[u] = th;
    sv[u] = sg;
    uv[u] = th * sg;
  }
}

void vexp_f(float* out, const float* in, std::size_t n) {
  const std::size_t n8 = n & ~std::size_t(7);
  std::size_t u = 0;
  for (; u < n8; u += 8)
    _mm256_storeu_ps(out + u, exp256(_mm256_loadu_ps(in + u)));
  for (; u < n; ++u) out[u] = exp_poly(in[u]);
}

// double-precision GEMM family, 4-lane
void gemm_acc_d(double* c, const double* w, const double* x, std::size_t m,
                std::size_t k, std::size_t t) {
  const std::size_t t16 = t & ~std::size_t(15);
  const std::size_t t4 = t & ~std::size_t(3);
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = c + i * t;
    const double* wrow = w + i * k;
    std::size_t u = 0;
    for (; u < t16; u += 16) {
      __m256d a0 = _mm256_loadu_pd(crow + u);
      __m256d a1 = _mm256_loadu_pd(crow + u + 4);
      __m256d a2 = _mm256_loadu_pd(crow + u + 8);
      __m256d a3 = _mm256_loadu_pd(crow + u + 12);
      for (std::size_t j = 0; j < k; ++j) {
        const __m256d wv = _mm256_set1_pd(wrow[j]);
        const double* xp = x + j * t + u;
        a0 = _mm256_fmadd_pd(wv, _mm256_loadu_pd(xp), a0);
        a1 = _mm256_fmadd_pd(wv, _mm256_loadu_pd(xp + 4), a1);
        a2 = _mm256_fmadd_pd(wv, _mm256_loadu_pd(xp + 8), a2);
        a3 = _mm256_fmadd_pd(wv, _mm256_loadu_pd(xp + 12), a3);
      }
      _mm256_storeu_pd(crow + u, a0);
      _mm256_storeu_pd(crow + u + 4, a1);
      _mm256_storeu_pd(crow + u + 8, a2);
      _mm256_storeu_pd(crow + u + 12, a3);
    }
    for (; u < t4; u += 4) {
      __m256d a0 = _mm256_loadu_pd(crow + u);
      for (std::size_t j = 0; j < k; ++j) {
        a0 = _mm256_fmadd_pd(_mm256_set1_pd(wrow[j]),
                             _mm256_loadu_pd(x + j * t + u), a0);
      }
      _mm256_storeu_pd(crow + u, a0);
    }
    for (; u < t; ++u) {
      double a = crow[u];
      for (std::size_t j = 0; j < k; ++j) a = std::fma(wrow[j], x[j * t + u], a);
      crow[u] = a;
    }
  }
}

void gemm_at_acc_d(double* dx, const double* w, const double* dy,
                   std::size_t m, std::size_t k, std::size_t t,
                   std::size_t ws) {
  const std::size_t t4 = t & ~std::size_t(3);
  for (std::size_t i = 0; i < k; ++i) {
    double* dxrow = dx + i * t;
    std::size_t u = 0;
    for (; u < t4; u += 4) {
      __m256d a0 = _mm256_loadu_pd(dxrow + u);
      for (std::size_t j = 0; j < m; ++j) {
        a0 = _mm256_fmadd_pd(_mm256_set1_pd(w[j * ws + i]),
                             _mm256_loadu_pd(dy + j * t + u), a0);
      }
      _mm256_storeu_pd(dxrow + u, a0);
    }
    for (; u < t; ++u) {
      double a = dxrow[u];
      for (std::size_t j = 0; j < m; ++j)
        a = std::fma(w[j * ws + i], dy[j * t + u], a);
      dxrow[u] = a;
    }
  }
}

void gemm_bt_acc_d(double* dw, const double* dy, const double* x,
                   std::size_t m, std::size_t k, std::size_t t) {
  const std::size_t t4 = t & ~std::size_t(3);
  for (std::size_t i = 0; i < m; ++i) {
    const double* dyrow = dy + i * t;
    double* dwrow = dw + i * k;
    for (std::size_t j = 0; j < k; ++j) {
      const double* xrow = x + j * t;
      __m256d s0 = _mm256_setzero_pd();
      std::size_t u = 0;
      for (; u < t4; u += 4) {
        s0 = _mm256_fmadd_pd(_mm256_loadu_pd(dyrow + u),
                             _mm256_loadu_pd(xrow + u), s0);
      }
      double acc = hsum4(s0);
      for (; u < t; ++u) acc = std::fma(dyrow[u], xrow[u], acc);
      dwrow[j] += acc;
    }
  }
}

void gemm_xt_acc_d(double* c, const double* x, const double* wt,
                   std::size_t k, std::size_t t, std::size_t n,
                   std::size_t xs) {
  const std::size_t n4 = n & ~std::size_t(3);
  for (std::size_t tau = 0; tau < t; ++tau) {
    double* crow = c + tau * n;
    std::size_t u = 0;
    for (; u < n4; u += 4) {
      __m256d a0 = _mm256_loadu_pd(crow + u);
      for (std::size_t j = 0; j < k; ++j) {
        a0 = _mm256_fmadd_pd(_mm256_set1_pd(x[j * t + tau]),
                             _mm256_loadu_pd(wt + j * n + u), a0);
      }
      _mm256_storeu_pd(crow + u, a0);
    }
    for (; u < n; ++u) {
      double a = crow[u];
      for (std::size_t j = 0; j < k; ++j)
        a = std::fma(x[j * xs + tau], wt[j * n + u], a);
      crow[u] = a;
    }
  }
}

void gemm_xt_in_acc_d(double* dx, const double* dy, const double* wt,
                      std::size_t k, std::size_t t, std::size_t n,
                      std::size_t xs) {
  const std::size_t n4 = n & ~std::size_t(3);
  for (std::size_t tau = 0; tau < t; ++tau) {
    const double* dyrow = dy + tau * n;
    for (std::size_t i = 0; i < k; ++i) {
      const double* wrow = wt + i * n;
      __m256d s0 = _mm256_setzero_pd();
      std::size_t u = 0;
      for (; u < n4; u += 4) {
        s0 = _mm256_fmadd_pd(_mm256_loadu_pd(wrow + u),
                             _mm256_loadu_pd(dyrow + u), s0);
      }
      double acc = hsum4(s0);
      for (; u < n; ++u) acc = std::fma(wrow[u], dyrow[u], acc);
      dx[i * xs + tau] += acc;
    }
  }
}

void ger_rows_acc_d(double* dwt, const double* x, const double* dy,
                    std::size_t k, std::size_t t, std::size_t n) {
  const std::size_t n4 = n & ~std::size_t(3);
  for (std::size_t i = 0; i < k; ++i) {
    double* dwrow = dwt + i * n;
    const double* xrow = x + i * t;
    for (std::size_t tau = 0; tau < t; ++tau) {
      const __m256d xv = _mm256_set1_pd(xrow[tau]);
      const double* dyrow = dy + tau * n;
      std::size_t u = 0;
      for (; u < n4; u += 4) {
        _mm256_storeu_pd(
            dwrow + u,
            _mm256_fmadd_pd(xv, _mm256_loadu_pd(dyrow + u),
                            _mm256_loadu_pd(dwrow + u)));
      }
      for (; u < n; ++u) dwrow[u] = std::fma(xrow[tau], dyrow[u], dwrow[u]);
    }
  }
}

void matvec_t_acc_d(double* out, const double* wt, const double* x,
                    std::size_t k, std::size_t m) {
  const std::size_t m4 = m & ~std::size_t(3);
  std::size_t u = 0;
  for (; u < m4; u += 4) {
    __m256d a0 = _mm256_loadu_pd(out + u);
    for (std::size_t j = 0; j < k; ++j) {
      a0 = _mm256_fmadd_pd(_mm256_set1_pd(x[j]),
                           _mm256_loadu_pd(wt + j * m + u), a0);
    }
    _mm256_storeu_pd(out + u, a0);
  }
  for (; u < m; ++u) {
    double a = out[u];
    for (std::size_t j = 0; j < k; ++j) a = std::fma(x[j], wt[j * m + u], a);
    out[u] = a;
  }
}

void gemm_acc2_d(double* c1, double* c2, const double* w1, const double* w2,
                 const double* x, std::size_t m, std::size_t k,
                 std::size_t t) {
  gemm_acc_d(c1, w1, x, m, k, t);
  gemm_acc_d(c2, w2, x, m, k, t);
}

void gemm_bt2_acc_d(double* dw1, double* dw2, const double* dy1,
                    const double* dy2, const double* x, std::size_t m,
                    std::size_t k, std::size_t t) {
  gemm_bt_acc_d(dw1, dy1, x, m, k, t);
  gemm_bt_acc_d(dw2, dy2, x, m, k, t);
}

double dot_d(const double* a, const double* b, std::size_t n) {
  const std::size_t n16 = n & ~std::size_t(15);
  const std::size_t n4 = n & ~std::size_t(3);
  __m256d s0 = _mm256_setzero_pd();
  __m256d s1 = _mm256_setzero_pd();
  __m256d s2 = _mm256_setzero_pd();
  __m256d s3 = _mm256_setzero_pd();
  std::size_t u = 0;
  for (; u < n16; u += 16) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + u), _mm256_loadu_pd(b + u), s0);
    s1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + u + 4),
                         _mm256_loadu_pd(b + u + 4), s1);
    s2 = _mm256_fmadd_pd(_mm256_loadu_pd(a + u + 8),
                         _mm256_loadu_pd(b + u + 8), s2);
    s3 = _mm256_fmadd_pd(_mm256_loadu_pd(a + u + 12),
                         _mm256_loadu_pd(b + u + 12), s3);
  }
  for (; u < n4; u += 4) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + u), _mm256_loadu_pd(b + u), s0);
  }
  double acc =
      hsum4(_mm256_add_pd(_mm256_add_pd(s0, s1), _mm256_add_pd(s2, s3)));
  for (; u < n; ++u) acc = std::fma(a[u], b[u], acc);
  return acc;
}

void axpy_d(double* y, double a, const double* x, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  const std::size_t n4 = n & ~std::size_t(3);
  std::size_t u = 0;
  for (; u < n4; u += 4) {
    _mm256_storeu_pd(
        y + u, _mm256_fmadd_pd(av, _mm256_loadu_pd(x + u), _mm256_loadu_pd(y + u)));
  }
  for (; u < n; ++u) y[u] = std::fma(a, x[u], y[u]);
}

}  // namespace

const Table<float> kAvx2F = {
    "avx2",         gemm_acc_f,       gemm_acc2_f,
    gemm_at_acc_f,  gemm_bt_acc_f,    gemm_bt2_acc_f,
    gemm_xt_acc_f,  gemm_xt_in_acc_f, ger_rows_acc_f,
    matvec_t_acc_f, dot_f,            axpy_f,
    gated_act_f,    vexp_f,           snll_grad_ref,
};

// double transcendentals stay on the scalar bodies; the double path exists
// for verification, not speed, so only the linear-algebra entries are
// vectorized (fused pairs compose the vectorized singles to keep chains
// identical within the variant)
const Table<double> kAvx2D = {
    "avx2",         gemm_acc_d,       gemm_acc2_d,
    gemm_at_acc_d,  gemm_bt_acc_d,    gemm_bt2_acc_d,
    gemm_xt_acc_d,  gemm_xt_in_acc_d, ger_rows_acc_d,
    matvec_t_acc_d, dot_d,            axpy_d,
    dgated_act_ref, dvexp_ref,        dnll_grad_ref,
};

#else  // !MBG_X86

const Table<float> kAvx2F = kScalarF;
const Table<double> kAvx2D = kScalarD;

#endif

}  // namespace mbg::kernels::detail
