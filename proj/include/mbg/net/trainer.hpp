#pragma once
// Teacher-forced training of the excitation network over feature containers.
// Modes select which condition variant and which excitation target feed the
// model:
//   plain    ground-truth conditions, plain excitation targets
//   g        generated conditions,    plain excitation targets
//   mbg      generated conditions,    closed-loop excitation targets
//   mbg_star mbg, with parameters initialized from a plain checkpoint
// Inputs are the companded ground-truth past samples of the mode's own
// target stream, never the model's samples.

#include <cstdint>
#include <string>
#include <vector>

#include "mbg/container.hpp"
#include "mbg/net/checkpoint.hpp"
#include "mbg/net/network.hpp"

namespace mbg::net {

enum class TrainMode { plain, g, mbg, mbg_star };

std::string mode_name(TrainMode mode);
TrainMode mode_from_name(const std::string& name);

struct TrainHyper {
  double learning_rate = 1e-4;
  std::size_t batch_samples = 12000;  // loss positions per step
  int batches_per_epoch = 100;        // validation cadence in steps
  int max_steps = 2000;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double grad_clip_norm = 5.0;
  std::uint64_t seed = 0;
};

std::vector<std::string> validate_train_hyper(const TrainHyper& hyper);

struct NllLogRow {
  int step = 0;
  std::string split;  // train | valid
  double nll = 0.0;
};

struct TrainResult {
  Checkpoint checkpoint;
  std::vector<NllLogRow> log;
};

// Deterministic given (mode, container, config, hyper, parent). The parent
// checkpoint is required for mbg_star (must be a plain checkpoint with the
// same configuration) and rejected otherwise.
TrainResult train(TrainMode mode, const FeatureContainer& feats,
                  const NetConfig& cfg, const TrainHyper& hyper,
                  const Checkpoint* parent = nullptr);

// Teacher-forced mean NLL of a split under the mode's data selection.
double evaluate_nll(const Network<float>& net, const FeatureContainer& feats,
                    TrainMode mode, const std::string& split);

// CSV with header step,split,nll
void write_nll_log(const std::vector<NllLogRow>& log, const std::string& path);
std::vector<NllLogRow> read_nll_log(const std::string& path);

}  // namespace mbg::net
