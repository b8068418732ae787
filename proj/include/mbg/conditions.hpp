#pragma once
// Frame-level conditional inputs: LSF + log-F0 + energy + v/uv, z-scored
// with stats from the training split, duplicated frame-to-sample.

#include <cstddef>
#include <vector>

#include "mbg/f0.hpp"
#include "mbg/frame.hpp"
#include "mbg/lsf.hpp"
#include "mbg/mat.hpp"

namespace mbg {

struct NormStats {
  std::vector<double> mean;
  std::vector<double> stddev;  // floored strictly above zero
};

struct ConditionTrack {
  std::size_t n_frames = 0;
  std::size_t dim = 0;        // p + 3, layout: lsf[p], log_f0, energy, vuv
  Mat<double> values;         // n_frames x dim
  NormStats stats;            // stats the values were normalized with
  bool normalized = false;
};

// Raw (un-normalized) assembly. Log-F0 of unvoiced frames is filled with the
// utterance's voiced mean (band-centre fallback when nothing is voiced) so
// the channel stays continuous; voicing itself lives in the v/uv channel.
ConditionTrack assemble_conditions(const LsfTrack& lsf,
                                   const std::vector<double>& f0_hz,
                                   const std::vector<double>& energy,
                                   const std::vector<int>& vuv,
                                   double f0_min_hz = 80.0,
                                   double f0_max_hz = 300.0);

// Per-dim mean/std over a set of raw tracks (the training split).
NormStats compute_norm_stats(const std::vector<const ConditionTrack*>& tracks,
                             double std_floor = 1e-6);

void normalize_conditions(ConditionTrack& track, const NormStats& stats);
void denormalize_conditions(ConditionTrack& track);

// Sample n receives frame floor(n/shift), clamped to the last frame.
Mat<double> upsample_conditions(const ConditionTrack& track,
                                const FrameGrid& grid, std::size_t n_samples);

}  // namespace mbg
