#pragma once
// Autoregressive generation of companded excitation symbols. Two engines:
// the streaming sampler keeps per-layer ring buffers sized by dilation
// (O(layers) work per sample); the windowed sampler re-runs the batched
// forward over one receptive field per sample (O(layers * receptive_field)).
// Both replay the batched forward's accumulation chains, so they produce
// bitwise-identical symbol streams within one kernel variant.

#include <cstdint>
#include <vector>

#include "mbg/mat.hpp"
#include "mbg/net/network.hpp"

namespace mbg::net {

// cond_rows: one row per output sample (length defines the output length),
// values as produced by the frame-to-sample duplication. Sampling is
// categorical at temperature 1.0, seeded.
std::vector<std::uint8_t> sample_symbols(const Network<float>& net,
                                         const Mat<double>& cond_rows,
                                         std::uint64_t seed);

// Reference engine used to cross-check the streaming sampler.
std::vector<std::uint8_t> sample_symbols_windowed(const Network<float>& net,
                                                  const Mat<double>& cond_rows,
                                                  std::uint64_t seed);

}  // namespace mbg::net
