#pragma once
// Bias-corrected Adam with global-norm gradient clipping.

#include <cstdint>

#include "mbg/net/params.hpp"

namespace mbg::net {

struct AdamHyper {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double clip_norm = 5.0;  // <= 0 disables clipping
};

template <typename T>
struct AdamState {
  ParamSet<T> m;
  ParamSet<T> v;
  std::uint64_t step = 0;
};

template <typename T>
AdamState<T> make_adam_state(const NetConfig& cfg) {
  return {make_param_set<T>(cfg), make_param_set<T>(cfg), 0};
}

// Global L2 norm over every gradient tensor (double accumulation).
template <typename T>
double grad_global_norm(const ParamSet<T>& grads);

// Scales gradients in place to clip_norm when their norm exceeds it;
// returns the pre-clip norm.
template <typename T>
double clip_gradients(ParamSet<T>& grads, double clip_norm);

// One update; advances state.step even for all-zero gradients.
template <typename T>
void adam_step(ParamSet<T>& params, const ParamSet<T>& grads,
               AdamState<T>& state, const AdamHyper& hyper);

}  // namespace mbg::net
