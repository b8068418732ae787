// Scalar reference kernels. This TU is compiled with -ffp-contract=off:
// every accumulation is an explicit multiply followed by an add, giving a
// stable reference the SIMD variants are tested against.

#include <algorithm>
#include <cmath>

#include "internal.hpp"

namespace mbg::kernels::detail {

namespace {

template <typename T>
void gemm_acc_t(T* c, const T* w, const T* x, std::size_t m, std::size_t k,
                std::size_t t) {
  for (std::size_t i = 0; i < m; ++i) {
    T* crow = c + i * t;
    const T* wrow = w + i * k;
    for (std::size_t j = 0; j < k; ++j) {
      const T wij = wrow[j];
      const T* xrow = x + j * t;
      for (std::size_t u = 0; u < t; ++u) crow[u] += wij * xrow[u];
    }
  }
}

template <typename T>
void gemm_acc2_t(T* c1, T* c2, const T* w1, const T* w2, const T* x,
                 std::size_t m, std::size_t k, std::size_t t) {
  gemm_acc_t(c1, w1, x, m, k, t);
  gemm_acc_t(c2, w2, x, m, k, t);
}

template <typename T>
void gemm_at_acc_t(T* dx, const T* w, const T* dy, std::size_t m,
                   std::size_t k, std::size_t t, std::size_t ws) {
  for (std::size_t i = 0; i < k; ++i) {
    T* dxrow = dx + i * t;
    for (std::size_t j = 0; j < m; ++j) {
      const T wji = w[j * ws + i];
      const T* dyrow = dy + j * t;
      for (std::size_t u = 0; u < t; ++u) dxrow[u] += wji * dyrow[u];
    }
  }
}

template <typename T>
void gemm_bt_acc_t(T* dw, const T* dy, const T* x, std::size_t m,
                   std::size_t k, std::size_t t) {
  for (std::size_t i = 0; i < m; ++i) {
    const T* dyrow = dy + i * t;
    T* dwrow = dw + i * k;
    for (std::size_t j = 0; j < k; ++j) {
      const T* xrow = x + j * t;
      T acc = T(0);
      for (std::size_t u = 0; u < t; ++u) acc += dyrow[u] * xrow[u];
      dwrow[j] += acc;
    }
  }
}

template <typename T>
void gemm_bt2_acc_t(T* dw1, T* dw2, const T* dy1, const T* dy2, const T* x,
                    std::size_t m, std::size_t k, std::size_t t) {
  gemm_bt_acc_t(dw1, dy1, x, m, k, t);
  gemm_bt_acc_t(dw2, dy2, x, m, k, t);
}

template <typename T>
void gemm_xt_acc_t(T* c, const T* x, const T* wt, std::size_t k,
                   std::size_t t, std::size_t n, std::size_t xs) {
  for (std::size_t tau = 0; tau < t; ++tau) {
    T* crow = c + tau * n;
    for (std::size_t j = 0; j < k; ++j) {
      const T xv = x[j * xs + tau];
      const T* wrow = wt + j * n;
      for (std::size_t u = 0; u < n; ++u) crow[u] += xv * wrow[u];
    }
  }
}

template <typename T>
void gemm_xt_in_acc_t(T* dx, const T* dy, const T* wt, std::size_t k,
                      std::size_t t, std::size_t n, std::size_t xs) {
  for (std::size_t tau = 0; tau < t; ++tau) {
    const T* dyrow = dy + tau * n;
    for (std::size_t i = 0; i < k; ++i) {
      const T* wrow = wt + i * n;
      T acc = T(0);
      for (std::size_t u = 0; u < n; ++u) acc += wrow[u] * dyrow[u];
      dx[i * xs + tau] += acc;
    }
  }
}

template <typename T>
void ger_rows_acc_t(T* dwt, const T* x, const T* dy, std::size_t k,
                    std::size_t t, std::size_t n) {
  for (std::size_t i = 0; i < k; ++i) {
    T* dwrow = dwt + i * n;
    const T* xrow = x + i * t;
    for (std::size_t tau = 0; tau < t; ++tau) {
      const T xv = xrow[tau];
      const T* dyrow = dy + tau * n;
      for (std::size_t u = 0; u < n; ++u) dwrow[u] += xv * dyrow[u];
    }
  }
}

template <typename T>
void matvec_t_acc_t(T* out, const T* wt, const T* x, std::size_t k,
                    std::size_t m) {
  for (std::size_t j = 0; j < k; ++j) {
    const T xv = x[j];
    const T* wrow = wt + j * m;
    for (std::size_t u = 0; u < m; ++u) out[u] += xv * wrow[u];
  }
}

template <typename T>
T dot_t(const T* a, const T* b, std::size_t n) {
  T acc = T(0);
  for (std::size_t u = 0; u < n; ++u) acc += a[u] * b[u];
  return acc;
}

template <typename T>
void axpy_t(T* y, T a, const T* x, std::size_t n) {
  for (std::size_t u = 0; u < n; ++u) y[u] += a * x[u];
}

template <typename T>
void gated_act_t(T* tv, T* sv, T* uv, const T* zf, const T* zg,
                 std::size_t n) {
  for (std::size_t u = 0; u < n; ++u) {
    const T th = std::tanh(zf[u]);
    const T sg = T(1) / (T(1) + std::exp(-zg[u]));
    tv[u] = th;
    sv[u] = sg;
    uv[u] = th * sg;
  }
}

template <typename T>
void vexp_t(T* out, const T* in, std::size_t n) {
  for (std::size_t u = 0; u < n; ++u) out[u] = std::exp(in[u]);
}

template <typename T>
double nll_grad_t(const T* logits, const std::int32_t* targets, std::size_t t0,
                  std::size_t t1, std::size_t n, T scale, T* dlogits) {
  double nll = 0.0;
  for (std::size_t tau = t0; tau < t1; ++tau) {
    const T* lrow = logits + tau * n;
    T* drow = dlogits + tau * n;
    const std::int32_t y = targets[tau];
    if (y < 0) {
      std::fill(drow, drow + n, T(0));
      continue;
    }
    // evaluated in double precision regardless of T so the returned NLL
    // tracks a direct log-sum-exp evaluation to ~1e-15
    double mx = static_cast<double>(lrow[0]);
    for (std::size_t u = 1; u < n; ++u)
      mx = std::max(mx, static_cast<double>(lrow[u]));
    double sum = 0.0;
    for (std::size_t u = 0; u < n; ++u)
      sum += std::exp(static_cast<double>(lrow[u]) - mx);
    nll += std::log(sum) + mx - static_cast<double>(lrow[y]);
    const double inv = 1.0 / sum;
    for (std::size_t u = 0; u < n; ++u) {
      const T p = T(std::exp(static_cast<double>(lrow[u]) - mx) * inv);
      drow[u] = scale * (p - (static_cast<std::int32_t>(u) == y ? T(1) : T(0)));
    }
  }
  return nll;
}

}  // namespace

void sgemm_acc_ref(float* c, const float* w, const float* x, std::size_t m,
                   std::size_t k, std::size_t t) {
  gemm_acc_t(c, w, x, m, k, t);
}
void sgemm_acc2_ref(float* c1, float* c2, const float* w1, const float* w2,
                    const float* x, std::size_t m, std::size_t k,
                    std::size_t t) {
  gemm_acc2_t(c1, c2, w1, w2, x, m, k, t);
}
void sgemm_at_acc_ref(float* dx, const float* w, const float* dy,
                      std::size_t m, std::size_t k, std::size_t t,
                      std::size_t ws) {
  gemm_at_acc_t(dx, w, dy, m, k, t, ws);
}
void sgemm_bt_acc_ref(float* dw, const float* dy, const float* x,
                      std::size_t m, std::size_t k, std::size_t t) {
  gemm_bt_acc_t(dw, dy, x, m, k, t);
}
void sgemm_bt2_acc_ref(float* dw1, float* dw2, const float* dy1,
                       const float* dy2, const float* x, std::size_t m,
                       std::size_t k, std::size_t t) {
  gemm_bt2_acc_t(dw1, dw2, dy1, dy2, x, m, k, t);
}
void sgemm_xt_acc_ref(float* c, const float* x, const float* wt,
                      std::size_t k, std::size_t t, std::size_t n,
                      std::size_t xs) {
  gemm_xt_acc_t(c, x, wt, k, t, n, xs);
}
void sgemm_xt_in_acc_ref(float* dx, const float* dy, const float* wt,
                         std::size_t k, std::size_t t, std::size_t n,
                         std::size_t xs) {
  gemm_xt_in_acc_t(dx, dy, wt, k, t, n, xs);
}
void sger_rows_acc_ref(float* dwt, const float* x, const float* dy,
                       std::size_t k, std::size_t t, std::size_t n) {
  ger_rows_acc_t(dwt, x, dy, k, t, n);
}
void smatvec_t_acc_ref(float* out, const float* wt, const float* x,
                       std::size_t k, std::size_t m) {
  matvec_t_acc_t(out, wt, x, k, m);
}
float sdot_ref(const float* a, const float* b, std::size_t n) {
  return dot_t(a, b, n);
}
void saxpy_ref(float* y, float a, const float* x, std::size_t n) {
  axpy_t(y, a, x, n);
}
void sgated_act_ref(float* tv, float* sv, float* uv, const float* zf,
                    const float* zg, std::size_t n) {
  gated_act_t(tv, sv, uv, zf, zg, n);
}
void svexp_ref(float* out, const float* in, std::size_t n) {
  vexp_t(out, in, n);
}
double snll_grad_ref(const float* logits, const std::int32_t* targets,
                     std::size_t t0, std::size_t t1, std::size_t n,
                     float scale, float* dlogits) {
  return nll_grad_t(logits, targets, t0, t1, n, scale, dlogits);
}

void dgemm_acc_ref(double* c, const double* w, const double* x, std::size_t m,
                   std::size_t k, std::size_t t) {
  gemm_acc_t(c, w, x, m, k, t);
}
void dgemm_acc2_ref(double* c1, double* c2, const double* w1, const double* w2,
                    const double* x, std::size_t m, std::size_t k,
                    std::size_t t) {
  gemm_acc2_t(c1, c2, w1, w2, x, m, k, t);
}
void dgemm_at_acc_ref(double* dx, const double* w, const double* dy,
                      std::size_t m, std::size_t k, std::size_t t,
                      std::size_t ws) {
  gemm_at_acc_t(dx, w, dy, m, k, t, ws);
}
void dgemm_bt_acc_ref(double* dw, const double* dy, const double* x,
                      std::size_t m, std::size_t k, std::size_t t) {
  gemm_bt_acc_t(dw, dy, x, m, k, t);
}
void dgemm_bt2_acc_ref(double* dw1, double* dw2, const double* dy1,
                       const double* dy2, const double* x, std::size_t m,
                       std::size_t k, std::size_t t) {
  gemm_bt2_acc_t(dw1, dw2, dy1, dy2, x, m, k, t);
}
void dgemm_xt_acc_ref(double* c, const double* x, const double* wt,
                      std::size_t k, std::size_t t, std::size_t n,
                      std::size_t xs) {
  gemm_xt_acc_t(c, x, wt, k, t, n, xs);
}
void dgemm_xt_in_acc_ref(double* dx, const double* dy, const double* wt,
                         std::size_t k, std::size_t t, std::size_t n,
                         std::size_t xs) {
  gemm_xt_in_acc_t(dx, dy, wt, k, t, n, xs);
}
void dger_rows_acc_ref(double* dwt, const double* x, const double* dy,
                       std::size_t k, std::size_t t, std::size_t n) {
  ger_rows_acc_t(dwt, x, dy, k, t, n);
}
void dmatvec_t_acc_ref(double* out, const double* wt, const double* x,
                       std::size_t k, std::size_t m) {
  matvec_t_acc_t(out, wt, x, k, m);
}
double ddot_ref(const double* a, const double* b, std::size_t n) {
  return dot_t(a, b, n);
}
void daxpy_ref(double* y, double a, const double* x, std::size_t n) {
  axpy_t(y, a, x, n);
}
void dgated_act_ref(double* tv, double* sv, double* uv, const double* zf,
                    const double* zg, std::size_t n) {
  gated_act_t(tv, sv, uv, zf, zg, n);
}
void dvexp_ref(double* out, const double* in, std::size_t n) {
  vexp_t(out, in, n);
}
double dnll_grad_ref(const double* logits, const std::int32_t* targets,
                     std::size_t t0, std::size_t t1, std::size_t n,
                     double scale, double* dlogits) {
  return nll_grad_t(logits, targets, t0, t1, n, scale, dlogits);
}

const Table<float> kScalarF = {
    "scalar",         sgemm_acc_ref,       sgemm_acc2_ref,
    sgemm_at_acc_ref, sgemm_bt_acc_ref,    sgemm_bt2_acc_ref,
    sgemm_xt_acc_ref, sgemm_xt_in_acc_ref, sger_rows_acc_ref,
    smatvec_t_acc_ref, sdot_ref,           saxpy_ref,
    sgated_act_ref,   svexp_ref,           snll_grad_ref,
};

const Table<double> kScalarD = {
    "scalar",         dgemm_acc_ref,       dgemm_acc2_ref,
    dgemm_at_acc_ref, dgemm_bt_acc_ref,    dgemm_bt2_acc_ref,
    dgemm_xt_acc_ref, dgemm_xt_in_acc_ref, dger_rows_acc_ref,
    dmatvec_t_acc_ref, ddot_ref,           daxpy_ref,
    dgated_act_ref,   dvexp_ref,           dnll_grad_ref,
};

}  // namespace mbg::kernels::detail
