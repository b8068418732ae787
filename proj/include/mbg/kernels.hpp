#pragma once
// Arithmetic inner loops behind the numeric code paths. Every entry has a
// scalar reference implementation and an AVX2+FMA variant; the active table
// is chosen once at startup from CPUID, overridable with MBG_KERNELS
// (auto|scalar|avx2). All entries are deterministic: the floating-point
// operation sequence per output element is fixed and identical between the
// batched (matrix) and per-sample (vector) forms, so streaming generation
// reproduces batched forward results bit for bit within one variant.

#include <cstddef>
#include <cstdint>

namespace mbg::kernels {

template <typename T>
struct Table {
  const char* name;

  // C(m x t) += W(m x k) * X(k x t); all row-major, fully packed.
  // Per element (i,t): FMA chain over ascending k.
  void (*gemm_acc)(T* c, const T* w, const T* x, std::size_t m, std::size_t k,
                   std::size_t t);

  // Fused pair sharing one X stream: c1 += w1 * x and c2 += w2 * x.
  // Element chains identical to two gemm_acc calls.
  void (*gemm_acc2)(T* c1, T* c2, const T* w1, const T* w2, const T* x,
                    std::size_t m, std::size_t k, std::size_t t);

  // dX(k x t) += W^T(k x m) * dY(m x t), W stored (m x w_stride) with the
  // first k columns in play (lets callers slice output rows). Per element
  // (i,t): FMA chain over ascending j.
  void (*gemm_at_acc)(T* dx, const T* w, const T* dy, std::size_t m,
                      std::size_t k, std::size_t t, std::size_t w_stride);

  // dW(m x k) += dY(m x t) * X^T(t x k); dot products along t.
  void (*gemm_bt_acc)(T* dw, const T* dy, const T* x, std::size_t m,
                      std::size_t k, std::size_t t);

  // Fused pair sharing one X stream: dw1 += dy1 * X^T, dw2 += dy2 * X^T.
  void (*gemm_bt2_acc)(T* dw1, T* dw2, const T* dy1, const T* dy2,
                       const T* x, std::size_t m, std::size_t k,
                       std::size_t t);

  // C(t x n) += X^T(t x k) * Wt(k x n), X stored (k x x_stride) with t <=
  // x_stride (lets callers run disjoint position ranges); position-major
  // output. Per row tau: FMA chain over ascending k, vectorized along n.
  void (*gemm_xt_acc)(T* c, const T* x, const T* wt, std::size_t k,
                      std::size_t t, std::size_t n, std::size_t x_stride);

  // dX(k x x_stride) += Wt(k x n) * dY^T(n x t), dY stored (t x n); dot
  // along n; t <= x_stride as above.
  void (*gemm_xt_in_acc)(T* dx, const T* dy, const T* wt, std::size_t k,
                         std::size_t t, std::size_t n, std::size_t x_stride);

  // dWt(k x n) += sum_tau X[i][tau] * dY[tau][:], X (k x t), dY (t x n).
  void (*ger_rows_acc)(T* dwt, const T* x, const T* dy, std::size_t k,
                       std::size_t t, std::size_t n);

  // out(m) += sum_k x[k] * Wt[k][:], Wt (k x m). Matches gemm_acc /
  // gemm_xt_acc element order (ascending-k FMA chain).
  void (*matvec_t_acc)(T* out, const T* wt, const T* x, std::size_t k,
                       std::size_t m);

  // Plain dot product; multiple accumulators allowed (not order-matched to
  // the GEMM chains; do not mix with them on the same data path).
  T (*dot)(const T* a, const T* b, std::size_t n);

  // y += a * x
  void (*axpy)(T* y, T a, const T* x, std::size_t n);

  // tv = tanh(zf); sv = sigmoid(zg); uv = tv * sv, elementwise.
  void (*gated_act)(T* tv, T* sv, T* uv, const T* zf, const T* zg,
                    std::size_t n);

  // out = exp(in), elementwise.
  void (*vexp)(T* out, const T* in, std::size_t n);

  // Softmax cross-entropy over position-major logits rows [t0, t1).
  // logits (t x n); for each row: dlogits = scale * (softmax - onehot) when
  // target >= 0, zero rows otherwise. Returns the summed NLL (nats) of the
  // rows with target >= 0.
  double (*nll_grad)(const T* logits, const std::int32_t* targets,
                     std::size_t t0, std::size_t t1, std::size_t n, T scale,
                     T* dlogits);
};

enum class Variant { scalar, avx2 };

bool avx2_available();

// Active table (env-selected). The reference to a table stays valid forever.
template <typename T>
const Table<T>& active();

// Explicit variant, for equivalence tests. Throws if unsupported on this CPU.
template <typename T>
const Table<T>& variant(Variant v);

const char* active_name();

// Elementwise helpers shared by every code path (not dispatched; a single
// compiled body keeps results bitwise identical between callers).
template <typename T>
inline void gated_grad(T* dzf, T* dzg, const T* du, const T* tv, const T* sv,
                       std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const T u = du[i];
    const T th = tv[i];
    const T sg = sv[i];
    dzf[i] = u * sg * (T(1) - th * th);
    dzg[i] = u * th * sg * (T(1) - sg);
  }
}

template <typename T>
inline void relu(T* out, const T* in, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = in[i] > T(0) ? in[i] : T(0);
}

template <typename T>
inline void relu_grad_mask(T* dx, const T* dy, const T* pre, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dx[i] = pre[i] > T(0) ? dy[i] : T(0);
}

template <typename T>
inline void add(T* out, const T* a, const T* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
}

template <typename T>
inline void add_inplace(T* acc, const T* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] += x[i];
}

}  // namespace mbg::kernels
