#include "mbg/net/network.hpp"

#include <algorithm>
#include <cstring>

#include "mbg/kernels.hpp"
#include "mbg/util.hpp"

namespace mbg::net {

namespace {

constexpr std::size_t kRowBlock = 16;    // row slice for threaded GEMMs
constexpr std::size_t kPosBlock = 2048;  // position slice for logit ops

template <typename T>
void par_gemm_acc(const kernels::Table<T>& k, T* c, const T* w, const T* x,
                  std::size_t m, std::size_t kk, std::size_t t) {
  parallel_blocks(m, kRowBlock, [&](std::size_t a, std::size_t b) {
    k.gemm_acc(c + a * t, w + a * kk, x, b - a, kk, t);
  });
}

template <typename T>
void par_gemm_acc2(const kernels::Table<T>& k, T* c1, T* c2, const T* w1,
                   const T* w2, const T* x, std::size_t m, std::size_t kk,
                   std::size_t t) {
  parallel_blocks(m, kRowBlock, [&](std::size_t a, std::size_t b) {
    k.gemm_acc2(c1 + a * t, c2 + a * t, w1 + a * kk, w2 + a * kk, x, b - a,
                kk, t);
  });
}

template <typename T>
void par_gemm_at_acc(const kernels::Table<T>& k, T* dx, const T* w,
                     const T* dy, std::size_t m, std::size_t kk,
                     std::size_t t) {
  // dX rows are the kk dimension; w is sliced by column with full stride
  parallel_blocks(kk, kRowBlock, [&](std::size_t a, std::size_t b) {
    k.gemm_at_acc(dx + a * t, w + a, dy, m, b - a, t, kk);
  });
}

template <typename T>
void par_gemm_bt_acc(const kernels::Table<T>& k, T* dw, const T* dy,
                     const T* x, std::size_t m, std::size_t kk,
                     std::size_t t) {
  parallel_blocks(m, kRowBlock, [&](std::size_t a, std::size_t b) {
    k.gemm_bt_acc(dw + a * kk, dy + a * t, x, b - a, kk, t);
  });
}

template <typename T>
void par_gemm_bt2_acc(const kernels::Table<T>& k, T* dw1, T* dw2,
                      const T* dy1, const T* dy2, const T* x, std::size_t m,
                      std::size_t kk, std::size_t t) {
  parallel_blocks(m, kRowBlock, [&](std::size_t a, std::size_t b) {
    k.gemm_bt2_acc(dw1 + a * kk, dw2 + a * kk, dy1 + a * t, dy2 + a * t, x,
                   b - a, kk, t);
  });
}

template <typename T>
void bias_fill(Mat<T>& c, const T* b, std::size_t t) {
  for (std::size_t i = 0; i < c.rows; ++i)
    std::fill(c.row(i), c.row(i) + t, b[i]);
}

template <typename T>
void bias_add_rows(Mat<T>& c, const T* b, std::size_t t) {
  for (std::size_t i = 0; i < c.rows; ++i) {
    T* row = c.row(i);
    for (std::size_t u = 0; u < t; ++u) row[u] += b[i];
  }
}

template <typename T>
void rowsum_acc(T* out, const Mat<T>& m, std::size_t t) {
  for (std::size_t i = 0; i < m.rows; ++i) {
    const T* row = m.row(i);
    T acc = T(0);
    for (std::size_t u = 0; u < t; ++u) acc += row[u];
    out[i] += acc;
  }
}

// shifted[:, u] = src[:, u - d], zeros for u < d
template <typename T>
void shift_right(Mat<T>& dst, const Mat<T>& src, std::size_t d,
                 std::size_t t) {
  for (std::size_t i = 0; i < src.rows; ++i) {
    T* out = dst.row(i);
    const T* in = src.row(i);
    const std::size_t z = std::min(d, t);
    std::fill(out, out + z, T(0));
    if (t > d) std::memcpy(out + d, in, (t - d) * sizeof(T));
  }
}

}  // namespace

template <typename T>
Network<T>::Network(const NetConfig& cfg, ParamSet<T> params) : cfg_(cfg) {
  const auto bad = validate_net_config(cfg);
  if (!bad.empty()) fail("Network: " + bad.front());
  const auto expect = param_shapes(cfg);
  if (params.shapes.size() != expect.size())
    fail("Network: parameter set does not match the configuration");
  for (std::size_t i = 0; i < expect.size(); ++i)
    if (params.shapes[i].rows != expect[i].rows ||
        params.shapes[i].cols != expect[i].cols)
      fail("Network: tensor shape mismatch at " + expect[i].name);
  params_ = std::move(params);
}

template <typename T>
Workspace<T> Network<T>::make_workspace() const {
  Workspace<T> ws;
  ws.grads = make_param_set<T>(cfg_);
  ws.x.resize(std::size_t(cfg_.n_layers()) + 1);
  ws.tv.resize(cfg_.n_layers());
  ws.sv.resize(cfg_.n_layers());
  return ws;
}

template <typename T>
void Network<T>::forward(Workspace<T>& ws, std::size_t t) const {
  if (t == 0) fail("forward: empty range");
  if (ws.input.size() < t) fail("forward: input shorter than t");
  if (ws.cond.rows != std::size_t(cfg_.condition_dim) || ws.cond.cols != t)
    fail("forward: condition matrix must be condition_dim x t");
  const auto& k = kernels::active<T>();
  const std::size_t R = cfg_.residual_channels;
  const std::size_t S = cfg_.skip_channels;
  const std::size_t Q = NetConfig::kQuantLevels;
  const int L = cfg_.n_layers();
  ws.t = t;

  // activation buffers must be exactly t wide: the kernels assume packed
  // rows (leading dimension == t)
  for (auto& m : ws.x)
    if (m.rows != R || m.cols != t) m.resize(R, t);
  for (int l = 0; l < L; ++l) {
    if (ws.tv[l].rows != R || ws.tv[l].cols != t) ws.tv[l].resize(R, t);
    if (ws.sv[l].rows != R || ws.sv[l].cols != t) ws.sv[l].resize(R, t);
  }
  auto ensure = [&](Mat<T>& m, std::size_t rows) {
    if (m.rows != rows || m.cols != t) m.resize(rows, t);
  };
  ensure(ws.skip_sum, S);
  ensure(ws.h1, S);
  ensure(ws.r1, S);
  ensure(ws.r2, S);
  ensure(ws.shifted, R);
  ensure(ws.u, R);
  if (ws.logits.rows != t || ws.logits.cols != Q) ws.logits.resize(t, Q);

  // embedding: x0 = emb.b + emb.w * input
  Mat<T>& x0 = ws.x[0];
  bias_fill(x0, params_.tensor(1), t);
  par_gemm_acc(k, x0.data.data(), params_.tensor(0), ws.input.data(), R, 1, t);

  ws.skip_sum.fill(T(0));
  // dzf/dzg double as pre-activation scratch; backward only needs them
  // after gated_grad, which reads tv/sv
  ensure(ws.dzf, R);
  ensure(ws.dzg, R);
  Mat<T>& zf = ws.dzf;
  Mat<T>& zg = ws.dzg;

  for (int l = 0; l < L; ++l) {
    const std::size_t base = layer_tensor_index(l, kFiltPrevW);
    const std::size_t d = std::size_t(cfg_.dilation(l));
    const Mat<T>& xin = ws.x[l];
    shift_right(ws.shifted, xin, d, t);

    // filter and gate pre-activations accumulate in lock-step so each
    // input stream is read once; per-element chains match the sequential
    // form the samplers replay
    bias_fill(zf, params_.tensor(base + kFiltB), t);
    bias_fill(zg, params_.tensor(base + kGateB), t);
    par_gemm_acc2(k, zf.data.data(), zg.data.data(),
                  params_.tensor(base + kFiltPrevW),
                  params_.tensor(base + kGatePrevW),
                  ws.shifted.data.data(), R, R, t);
    par_gemm_acc2(k, zf.data.data(), zg.data.data(),
                  params_.tensor(base + kFiltCurrW),
                  params_.tensor(base + kGateCurrW), xin.data.data(), R, R,
                  t);
    par_gemm_acc2(k, zf.data.data(), zg.data.data(),
                  params_.tensor(base + kFiltCondW),
                  params_.tensor(base + kGateCondW), ws.cond.data.data(), R,
                  cfg_.condition_dim, t);

    parallel_blocks(R, kRowBlock, [&](std::size_t a, std::size_t b) {
      for (std::size_t i = a; i < b; ++i)
        k.gated_act(ws.tv[l].row(i), ws.sv[l].row(i), ws.u.row(i), zf.row(i),
                    zg.row(i), t);
    });

    // skip accumulation: += skip.b then += skip.w * u, in layer order
    bias_add_rows(ws.skip_sum, params_.tensor(base + kSkipB), t);
    par_gemm_acc(k, ws.skip_sum.data.data(), params_.tensor(base + kSkipW),
                 ws.u.data.data(), S, R, t);

    // residual: x[l+1] = x[l] + res.b + res.w * u; the top layer's
    // residual output feeds nothing (skips carry the head) and is skipped
    if (l + 1 < L) {
      Mat<T>& xout = ws.x[l + 1];
      for (std::size_t i = 0; i < R; ++i)
        std::memcpy(xout.row(i), xin.row(i), t * sizeof(T));
      bias_add_rows(xout, params_.tensor(base + kResB), t);
      par_gemm_acc(k, xout.data.data(), params_.tensor(base + kResW),
                   ws.u.data.data(), R, R, t);
    }
  }

  const std::size_t post = 2 + std::size_t(L) * kTensorsPerLayer;
  for (std::size_t i = 0; i < S; ++i)
    kernels::relu(ws.r1.row(i), ws.skip_sum.row(i), t);
  bias_fill(ws.h1, params_.tensor(post + 1), t);
  par_gemm_acc(k, ws.h1.data.data(), params_.tensor(post + 0),
               ws.r1.data.data(), S, S, t);
  for (std::size_t i = 0; i < S; ++i)
    kernels::relu(ws.r2.row(i), ws.h1.row(i), t);

  // logits rows = post2.b, then += r2^T * post2.wt
  const T* logit_bias = params_.tensor(post + 3);
  parallel_blocks(t, kPosBlock, [&](std::size_t a, std::size_t b) {
    for (std::size_t tau = a; tau < b; ++tau)
      std::memcpy(ws.logits.row(tau), logit_bias, Q * sizeof(T));
    k.gemm_xt_acc(ws.logits.row(a), ws.r2.data.data() + a,
                  params_.tensor(post + 2), S, b - a, Q, t);
  });
}

template <typename T>
double Network<T>::loss(Workspace<T>& ws) const {
  const std::size_t t = ws.t;
  if (t == 0) fail("loss: run forward first");
  if (ws.targets.size() < t) fail("loss: targets shorter than t");
  const std::size_t Q = NetConfig::kQuantLevels;
  if (ws.dlogits.rows != t || ws.dlogits.cols != Q) ws.dlogits.resize(t, Q);

  std::size_t n_valid = 0;
  for (std::size_t tau = 0; tau < t; ++tau)
    if (ws.targets[tau] >= 0) ++n_valid;
  if (n_valid == 0) fail("loss: no valid positions");

  const auto& k = kernels::active<T>();
  const T scale = T(1.0 / double(n_valid));
  const std::size_t n_blocks = (t + kPosBlock - 1) / kPosBlock;
  std::vector<double> partial(n_blocks, 0.0);
  parallel_blocks(t, kPosBlock, [&](std::size_t a, std::size_t b) {
    partial[a / kPosBlock] = k.nll_grad(ws.logits.data.data(),
                                        ws.targets.data(), a, b, Q, scale,
                                        ws.dlogits.data.data());
  });
  double total = 0.0;
  for (double p : partial) total += p;
  return total / double(n_valid);
}

template <typename T>
void Network<T>::backward(Workspace<T>& ws) const {
  const std::size_t t = ws.t;
  if (t == 0) fail("backward: run forward + loss first");
  const auto& k = kernels::active<T>();
  const std::size_t R = cfg_.residual_channels;
  const std::size_t S = cfg_.skip_channels;
  const std::size_t Q = NetConfig::kQuantLevels;
  const int L = cfg_.n_layers();
  const std::size_t C = cfg_.condition_dim;

  auto ensure = [&](Mat<T>& m, std::size_t rows) {
    if (m.rows != rows || m.cols != t) m.resize(rows, t);
    m.fill(T(0));
  };
  ensure(ws.du, R);
  ensure(ws.dzf, R);
  ensure(ws.dzg, R);
  ensure(ws.dp, R);
  ensure(ws.dnext, R);
  ensure(ws.dcur, R);
  ensure(ws.dskip, S);
  ensure(ws.drs, S);

  const std::size_t post = 2 + std::size_t(L) * kTensorsPerLayer;

  // head: dWt += sum_tau r2 outer dlogits; db = column sums; dR2 via wt
  parallel_blocks(S, kRowBlock, [&](std::size_t a, std::size_t b) {
    k.ger_rows_acc(ws.grads.tensor(post + 2) + a * Q,
                   ws.r2.data.data() + a * t, ws.dlogits.data.data(), b - a,
                   t, Q);
  });
  {
    T* db = ws.grads.tensor(post + 3);
    for (std::size_t tau = 0; tau < t; ++tau)
      kernels::add_inplace(db, ws.dlogits.row(tau), Q);
  }
  // dR2 into drs
  parallel_blocks(t, kPosBlock, [&](std::size_t a, std::size_t b) {
    k.gemm_xt_in_acc(ws.drs.data.data() + a, ws.dlogits.row(a),
                     params_.tensor(post + 2), S, b - a, Q, t);
  });
  // dH1 = relu'(h1) . dR2   (reuse drs in place)
  for (std::size_t i = 0; i < S; ++i)
    kernels::relu_grad_mask(ws.drs.row(i), ws.drs.row(i), ws.h1.row(i), t);
  par_gemm_bt_acc(k, ws.grads.tensor(post + 0), ws.drs.data.data(),
                  ws.r1.data.data(), S, S, t);
  rowsum_acc(ws.grads.tensor(post + 1), ws.drs, t);
  // dR1 -> dskip (before mask), then mask by skip_sum
  par_gemm_at_acc(k, ws.dskip.data.data(), params_.tensor(post + 0),
                  ws.drs.data.data(), S, S, t);
  for (std::size_t i = 0; i < S; ++i)
    kernels::relu_grad_mask(ws.dskip.row(i), ws.dskip.row(i),
                            ws.skip_sum.row(i), t);

  // dnext starts at zero: the top residual output feeds nothing
  for (int l = L - 1; l >= 0; --l) {
    const std::size_t base = layer_tensor_index(l, kFiltPrevW);
    const std::size_t d = std::size_t(cfg_.dilation(l));
    const Mat<T>& xin = ws.x[l];

    // u = tv . sv (recomputed)
    parallel_blocks(R, kRowBlock, [&](std::size_t a, std::size_t b) {
      for (std::size_t i = a; i < b; ++i) {
        const T* tvr = ws.tv[l].row(i);
        const T* svr = ws.sv[l].row(i);
        T* ur = ws.u.row(i);
        for (std::size_t q = 0; q < t; ++q) ur[q] = tvr[q] * svr[q];
      }
    });

    // dU = skip.w^T dskip + res.w^T dnext; the top layer has no residual
    // consumer, so its res gradients are identically zero and skipped
    const bool has_res = l + 1 < L;
    for (std::size_t i = 0; i < R; ++i)
      std::fill(ws.du.row(i), ws.du.row(i) + t, T(0));
    par_gemm_at_acc(k, ws.du.data.data(), params_.tensor(base + kSkipW),
                    ws.dskip.data.data(), S, R, t);
    if (has_res)
      par_gemm_at_acc(k, ws.du.data.data(), params_.tensor(base + kResW),
                      ws.dnext.data.data(), R, R, t);

    par_gemm_bt_acc(k, ws.grads.tensor(base + kSkipW), ws.dskip.data.data(),
                    ws.u.data.data(), S, R, t);
    rowsum_acc(ws.grads.tensor(base + kSkipB), ws.dskip, t);
    if (has_res) {
      par_gemm_bt_acc(k, ws.grads.tensor(base + kResW), ws.dnext.data.data(),
                      ws.u.data.data(), R, R, t);
      rowsum_acc(ws.grads.tensor(base + kResB), ws.dnext, t);
    }

    parallel_blocks(R, kRowBlock, [&](std::size_t a, std::size_t b) {
      for (std::size_t i = a; i < b; ++i)
        kernels::gated_grad(ws.dzf.row(i), ws.dzg.row(i), ws.du.row(i),
                            ws.tv[l].row(i), ws.sv[l].row(i), t);
    });

    shift_right(ws.shifted, xin, d, t);
    par_gemm_bt2_acc(k, ws.grads.tensor(base + kFiltPrevW),
                     ws.grads.tensor(base + kGatePrevW), ws.dzf.data.data(),
                     ws.dzg.data.data(), ws.shifted.data.data(), R, R, t);
    par_gemm_bt2_acc(k, ws.grads.tensor(base + kFiltCurrW),
                     ws.grads.tensor(base + kGateCurrW), ws.dzf.data.data(),
                     ws.dzg.data.data(), xin.data.data(), R, R, t);
    par_gemm_bt2_acc(k, ws.grads.tensor(base + kFiltCondW),
                     ws.grads.tensor(base + kGateCondW), ws.dzf.data.data(),
                     ws.dzg.data.data(), ws.cond.data.data(), R, C, t);
    rowsum_acc(ws.grads.tensor(base + kFiltB), ws.dzf, t);
    rowsum_acc(ws.grads.tensor(base + kGateB), ws.dzg, t);

    // dX[l] = dnext (residual passthrough) + curr taps + unshifted prev taps
    if (has_res) {
      for (std::size_t i = 0; i < R; ++i)
        std::memcpy(ws.dcur.row(i), ws.dnext.row(i), t * sizeof(T));
    } else {
      for (std::size_t i = 0; i < R; ++i)
        std::fill(ws.dcur.row(i), ws.dcur.row(i) + t, T(0));
    }
    par_gemm_at_acc(k, ws.dcur.data.data(), params_.tensor(base + kFiltCurrW),
                    ws.dzf.data.data(), R, R, t);
    par_gemm_at_acc(k, ws.dcur.data.data(), params_.tensor(base + kGateCurrW),
                    ws.dzg.data.data(), R, R, t);
    for (std::size_t i = 0; i < R; ++i)
      std::fill(ws.dp.row(i), ws.dp.row(i) + t, T(0));
    par_gemm_at_acc(k, ws.dp.data.data(), params_.tensor(base + kFiltPrevW),
                    ws.dzf.data.data(), R, R, t);
    par_gemm_at_acc(k, ws.dp.data.data(), params_.tensor(base + kGatePrevW),
                    ws.dzg.data.data(), R, R, t);
    if (t > d) {
      parallel_blocks(R, kRowBlock, [&](std::size_t a, std::size_t b) {
        for (std::size_t i = a; i < b; ++i)
          kernels::add_inplace(ws.dcur.row(i), ws.dp.row(i) + d, t - d);
      });
    }
    std::swap(ws.dnext, ws.dcur);
  }

  // embedding
  par_gemm_bt_acc(k, ws.grads.tensor(0), ws.dnext.data.data(),
                  ws.input.data(), R, 1, t);
  rowsum_acc(ws.grads.tensor(1), ws.dnext, t);
}

template class Network<float>;
template class Network<double>;

}  // namespace mbg::net
