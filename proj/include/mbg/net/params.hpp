#pragma once
// Parameter storage: a flat, ordered list of named 2-D tensors whose shapes
// are fully determined by the NetConfig. The declared order is the
// serialization order.

#include <cstdint>
#include <string>
#include <vector>

#include "mbg/net/config.hpp"

namespace mbg::net {

struct TensorShape {
  std::string name;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t fan_in = 0;   // for init scaling; 0 marks a bias (zero init)
  std::size_t fan_out = 0;

  std::size_t size() const { return rows * cols; }
};

// Tensor index layout:
//   0 emb.w (R x 1), 1 emb.b
//   per layer l: filt_prev.w, filt_curr.w, filt_cond.w, filt.b,
//                gate_prev.w, gate_curr.w, gate_cond.w, gate.b,
//                res.w, res.b, skip.w, skip.b
//   post1.w (S x S), post1.b, post2.wt (S x Q, stored input-major), post2.b
std::vector<TensorShape> param_shapes(const NetConfig& cfg);

inline constexpr int kTensorsPerLayer = 12;

enum LayerTensor {
  kFiltPrevW = 0, kFiltCurrW, kFiltCondW, kFiltB,
  kGatePrevW, kGateCurrW, kGateCondW, kGateB,
  kResW, kResB, kSkipW, kSkipB,
};

inline std::size_t layer_tensor_index(int layer, LayerTensor which) {
  return 2 + std::size_t(layer) * kTensorsPerLayer + std::size_t(which);
}

template <typename T>
struct ParamSet {
  std::vector<TensorShape> shapes;
  std::vector<std::vector<T>> data;  // parallel to shapes

  std::size_t n_tensors() const { return shapes.size(); }
  std::size_t total_size() const {
    std::size_t s = 0;
    for (const auto& sh : shapes) s += sh.size();
    return s;
  }
  T* tensor(std::size_t i) { return data[i].data(); }
  const T* tensor(std::size_t i) const { return data[i].data(); }

  void zero() {
    for (auto& v : data) std::fill(v.begin(), v.end(), T(0));
  }
};

template <typename T>
ParamSet<T> make_param_set(const NetConfig& cfg) {
  ParamSet<T> p;
  p.shapes = param_shapes(cfg);
  p.data.reserve(p.shapes.size());
  for (const auto& sh : p.shapes) p.data.emplace_back(sh.size(), T(0));
  return p;
}

// fan-scaled uniform init (biases zero); deterministic given seed.
template <typename T>
ParamSet<T> init_params(const NetConfig& cfg, std::uint64_t seed);

}  // namespace mbg::net
