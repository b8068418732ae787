#pragma once
// Checkpoint container: magic MBGV, format version, length-prefixed UTF-8
// metadata (config + provenance as JSON), then raw little-endian float32
// tensors in declared order with a shape table. Saving and loading is
// bit-exact: load(save(x)) returns identical parameter bytes.

#include <cstdint>
#include <string>

#include "mbg/net/adam.hpp"
#include "mbg/net/params.hpp"

namespace mbg::net {

struct Provenance {
  std::string mode;              // plain | g | mbg | mbg_star
  std::uint64_t seed = 0;
  std::string condition_source;  // ground_truth | generated
  std::string parent;            // parent checkpoint path (mbg_star only)
  double final_valid_nll = 0.0;
  bool has_final_valid_nll = false;
  std::int64_t train_steps = 0;
};

struct Checkpoint {
  NetConfig config;
  ParamSet<float> params;
  AdamState<float> adam;
  Provenance prov;
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace mbg::net
