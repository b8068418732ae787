#include "mbg/net/params.hpp"

#include <cmath>

#include "mbg/util.hpp"

namespace mbg::net {

long receptive_field(const NetConfig& cfg) {
  long rf = 1;
  for (int l = 0; l < cfg.n_layers(); ++l)
    rf += cfg.dilation(l) * (NetConfig::kKernelSize - 1);
  return rf;
}

std::vector<std::string> validate_net_config(const NetConfig& cfg) {
  std::vector<std::string> bad;
  if (cfg.n_blocks < 1) bad.push_back("net: blocks must be >= 1");
  if (cfg.layers_per_block < 1)
    bad.push_back("net: layers_per_block must be >= 1");
  if (cfg.layers_per_block > 16)
    bad.push_back("net: layers_per_block must be <= 16");
  if (cfg.residual_channels < 1)
    bad.push_back("net: residual_channels must be >= 1");
  if (cfg.skip_channels < 1) bad.push_back("net: skip_channels must be >= 1");
  if (cfg.condition_dim < 1) bad.push_back("net: condition_dim must be >= 1");
  return bad;
}

std::vector<TensorShape> param_shapes(const NetConfig& cfg) {
  const std::size_t r = std::size_t(cfg.residual_channels);
  const std::size_t s = std::size_t(cfg.skip_channels);
  const std::size_t c = std::size_t(cfg.condition_dim);
  const std::size_t q = NetConfig::kQuantLevels;

  std::vector<TensorShape> shapes;
  auto weight = [&](std::string name, std::size_t rows, std::size_t cols,
                    std::size_t fan_in, std::size_t fan_out) {
    shapes.push_back({std::move(name), rows, cols, fan_in, fan_out});
  };
  auto bias = [&](std::string name, std::size_t rows) {
    shapes.push_back({std::move(name), rows, 1, 0, 0});
  };

  weight("emb.w", r, 1, 1, r);
  bias("emb.b", r);
  for (int l = 0; l < cfg.n_layers(); ++l) {
    const std::string pfx = "layer" + std::to_string(l) + ".";
    weight(pfx + "filt_prev.w", r, r, r, r);
    weight(pfx + "filt_curr.w", r, r, r, r);
    weight(pfx + "filt_cond.w", r, c, c, r);
    bias(pfx + "filt.b", r);
    weight(pfx + "gate_prev.w", r, r, r, r);
    weight(pfx + "gate_curr.w", r, r, r, r);
    weight(pfx + "gate_cond.w", r, c, c, r);
    bias(pfx + "gate.b", r);
    weight(pfx + "res.w", r, r, r, r);
    bias(pfx + "res.b", r);
    weight(pfx + "skip.w", s, r, r, s);
    bias(pfx + "skip.b", s);
  }
  weight("post1.w", s, s, s, s);
  bias("post1.b", s);
  weight("post2.wt", s, q, s, q);  // stored input-major
  bias("post2.b", q);
  return shapes;
}

template <typename T>
ParamSet<T> init_params(const NetConfig& cfg, std::uint64_t seed) {
  const auto bad = validate_net_config(cfg);
  if (!bad.empty()) fail("init_params: " + bad.front());
  ParamSet<T> p = make_param_set<T>(cfg);
  RngStream rng(derive_seed(seed, "xavier-init"));
  for (std::size_t i = 0; i < p.n_tensors(); ++i) {
    const auto& sh = p.shapes[i];
    if (sh.fan_in == 0) continue;  // bias, stays zero
    const double bound =
        std::sqrt(6.0 / double(sh.fan_in + sh.fan_out));
    for (auto& v : p.data[i])
      v = static_cast<T>(rng.uniform(-bound, bound));
  }
  return p;
}

template ParamSet<float> init_params<float>(const NetConfig&, std::uint64_t);
template ParamSet<double> init_params<double>(const NetConfig&, std::uint64_t);

}  // namespace mbg::net
