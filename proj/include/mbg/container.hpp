#pragma once
// Per-utterance feature store: grids, ground-truth and generated spectral
// tracks, both condition variants, and both excitation targets with gains
// and companded symbols. One file per dataset (magic MBGF), length-prefixed
// records, little-endian float32 arrays; serialization round-trips
// bit-exactly.

#include <cstdint>
#include <string>
#include <vector>

#include "mbg/conditions.hpp"
#include "mbg/corpus.hpp"
#include "mbg/excitation.hpp"
#include "mbg/f0.hpp"
#include "mbg/frame.hpp"
#include "mbg/lpc.hpp"
#include "mbg/lsf.hpp"
#include "mbg/surrogate.hpp"

namespace mbg {

struct LpConfig {
  std::size_t order = 16;
  double frame_shift_ms = 5.0;
  double frame_length_ms = 25.0;
  WindowKind window = WindowKind::hann;
  double floor_eps = 1e-6;
};

std::vector<std::string> validate_lp_config(const LpConfig& cfg);

struct UtteranceFeatures {
  std::string id;
  std::string wav_path;  // relative to the container's directory
  std::string split;
  std::size_t n_samples = 0;
  FrameGrid grid;
  LsfTrack gt_lsf, gen_lsf;
  CoeffTrack gt_coeff, gen_coeff;
  ConditionTrack cond_gt, cond_gen;   // normalized
  ExcitationTrack exc_plain, exc_mbg;  // normalized, symbols attached
  std::vector<double> f0_hz;
  std::vector<int> vuv;
  std::vector<double> energy;
  // max |closed_loop - plain - intermediate| verified during the build
  double residual_check = 0.0;
};

struct FeatureContainer {
  int sample_rate = 0;
  LpConfig lp;
  F0Config f0;
  std::size_t cond_dim = 0;
  NormStats stats_gt, stats_gen;  // training-split statistics per variant
  std::vector<UtteranceFeatures> utts;

  std::vector<std::size_t> split_indices(const std::string& split) const;
  const UtteranceFeatures& by_id(const std::string& id) const;
};

// Reads every manifest entry (paths relative to base_dir), extracts all
// tracks, verifies the residual decomposition per utterance, and normalizes
// conditions with training-split statistics. Deterministic given the
// surrogate seed. Errors are annotated with the utterance id.
FeatureContainer build_features(const DatasetManifest& manifest,
                                const std::string& base_dir,
                                const LpConfig& lp, const F0Config& f0,
                                const SurrogateConfig& surrogate);

void save_container(const FeatureContainer& c, const std::string& path);
FeatureContainer load_container(const std::string& path);

}  // namespace mbg
