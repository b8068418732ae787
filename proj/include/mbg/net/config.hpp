#pragma once
// Topology of the excitation network: stacked blocks of gated dilated causal
// convolutions (kernel 2, dilations 1,2,4,... per block) with residual and
// skip connections, per-layer conditioning projections, and a two-layer
// post-stack head over a 256-way softmax.

#include <cstddef>
#include <string>
#include <vector>

namespace mbg::net {

struct NetConfig {
  int n_blocks = 2;
  int layers_per_block = 6;
  int residual_channels = 64;
  int skip_channels = 64;
  int condition_dim = 19;

  static constexpr int kKernelSize = 2;
  static constexpr int kQuantLevels = 256;

  int n_layers() const { return n_blocks * layers_per_block; }
  int dilation(int layer) const { return 1 << (layer % layers_per_block); }

  bool operator==(const NetConfig&) const = default;
};

// 1 + sum of dilations (kernel 2): the number of past inputs that can reach
// one output distribution.
long receptive_field(const NetConfig& cfg);

std::vector<std::string> validate_net_config(const NetConfig& cfg);

}  // namespace mbg::net
