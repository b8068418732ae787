#include "mbg/net/adam.hpp"

#include <cmath>

#include "mbg/util.hpp"

namespace mbg::net {

template <typename T>
double grad_global_norm(const ParamSet<T>& grads) {
  double acc = 0.0;
  for (const auto& tensor : grads.data)
    for (T g : tensor) acc += double(g) * double(g);
  return std::sqrt(acc);
}

template <typename T>
double clip_gradients(ParamSet<T>& grads, double clip_norm) {
  const double norm = grad_global_norm(grads);
  if (clip_norm > 0.0 && norm > clip_norm) {
    const T scale = T(clip_norm / norm);
    for (auto& tensor : grads.data)
      for (T& g : tensor) g *= scale;
  }
  return norm;
}

template <typename T>
void adam_step(ParamSet<T>& params, const ParamSet<T>& grads,
               AdamState<T>& state, const AdamHyper& hyper) {
  if (params.n_tensors() != grads.n_tensors())
    fail("adam_step: gradient layout mismatch");
  state.step += 1;
  const double b1 = hyper.beta1, b2 = hyper.beta2;
  const double c1 = 1.0 - std::pow(b1, double(state.step));
  const double c2 = 1.0 - std::pow(b2, double(state.step));
  const T one_minus_b1 = T(1.0 - b1);
  const T one_minus_b2 = T(1.0 - b2);
  const T tb1 = T(b1), tb2 = T(b2);
  const T lr = T(hyper.learning_rate);
  const T inv_c1 = T(1.0 / c1);
  const T inv_c2 = T(1.0 / c2);
  const T eps = T(hyper.eps);
  for (std::size_t i = 0; i < params.n_tensors(); ++i) {
    T* p = params.tensor(i);
    const T* g = grads.tensor(i);
    T* m = state.m.tensor(i);
    T* v = state.v.tensor(i);
    const std::size_t n = params.shapes[i].size();
    for (std::size_t j = 0; j < n; ++j) {
      m[j] = tb1 * m[j] + one_minus_b1 * g[j];
      v[j] = tb2 * v[j] + one_minus_b2 * g[j] * g[j];
      const T mhat = m[j] * inv_c1;
      const T vhat = v[j] * inv_c2;
      p[j] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
  }
}

template double grad_global_norm<float>(const ParamSet<float>&);
template double grad_global_norm<double>(const ParamSet<double>&);
template double clip_gradients<float>(ParamSet<float>&, double);
template double clip_gradients<double>(ParamSet<double>&, double);
template void adam_step<float>(ParamSet<float>&, const ParamSet<float>&,
                               AdamState<float>&, const AdamHyper&);
template void adam_step<double>(ParamSet<double>&, const ParamSet<double>&,
                                AdamState<double>&, const AdamHyper&);

}  // namespace mbg::net
