#pragma once
// Batched forward/backward over a sample range. Activations are stored
// channel-major (channels x positions); logits position-major. The forward
// accumulation order per output element is pinned (bias first, then the
// dilated taps, then the conditioning projection, ascending input index),
// and the streaming sampler replays exactly the same chains, so batched and
// per-sample evaluation agree bitwise within one kernel variant.
//
// Causality: input[t] is the one-sample-shifted past (caller feeds the
// companded value of the previous target), conditions are current, and the
// two taps of every convolution look at t and t - dilation only, so logits
// at t never see inputs beyond t nor further back than the receptive field.

#include <cstdint>
#include <vector>

#include "mbg/mat.hpp"
#include "mbg/net/params.hpp"

namespace mbg::net {

template <typename T>
struct Workspace {
  std::size_t t = 0;  // active length

  std::vector<T> input;        // shifted past samples, length t
  Mat<T> cond;                 // condition_dim x t
  std::vector<std::int32_t> targets;  // length t, -1 masks a position

  std::vector<Mat<T>> x;       // per-layer inputs, L+1 of (R x t)
  std::vector<Mat<T>> tv, sv;  // gated caches per layer
  Mat<T> skip_sum, h1;         // S x t
  Mat<T> r1, r2;               // S x t (recomputed in backward)
  Mat<T> logits, dlogits;      // t x Q

  Mat<T> shifted, u, du, dzf, dzg, dp, dnext, dcur;  // R x t scratch
  Mat<T> dskip, drs;                                 // S x t scratch

  ParamSet<T> grads;
};

template <typename T>
class Network {
 public:
  Network(const NetConfig& cfg, ParamSet<T> params);

  const NetConfig& config() const { return cfg_; }
  ParamSet<T>& params() { return params_; }
  const ParamSet<T>& params() const { return params_; }

  Workspace<T> make_workspace() const;

  // Computes logits for positions [0, t) from ws.input and ws.cond.
  void forward(Workspace<T>& ws, std::size_t t) const;

  // Mean NLL (nats) over positions with targets >= 0; fills ws.dlogits with
  // the matching mean-loss gradient. Errors when no position is valid.
  double loss(Workspace<T>& ws) const;

  // Accumulates parameter gradients of the loss into ws.grads (call
  // ws.grads.zero() first for fresh gradients).
  void backward(Workspace<T>& ws) const;

 private:
  NetConfig cfg_;
  ParamSet<T> params_;
};

}  // namespace mbg::net
