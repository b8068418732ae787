#pragma once
// Stand-in for a trained acoustic model front-end: produces "generated" LSF
// tracks carrying controlled estimation errors (temporal oversmoothing plus
// noise in the LSF domain), repaired back to valid ordering so the implied
// synthesis filters stay stable.

#include <cstdint>
#include <vector>

#include "mbg/lsf.hpp"

namespace mbg {

struct SurrogateConfig {
  int smooth_frames = 9;        // odd moving-average length
  double noise_std_rad = 0.01;  // i.i.d. Gaussian noise per LSF dimension
  double min_gap_rad = 0.005;   // enforced spacing after repair
  std::uint64_t seed = 0;
};

std::vector<std::string> validate_surrogate_config(const SurrogateConfig& cfg,
                                                   std::size_t order);

// sort ascending, clamp into [min_gap, pi - min_gap], then a forward and a
// backward pass enforcing gaps >= min_gap. Total and idempotent whenever
// min_gap * (p + 1) < pi.
void repair_ordering(double* lsf, std::size_t p, double min_gap_rad);

// Deterministic given (input track, config). Output tagged generated.
LsfTrack generate_lsf(const LsfTrack& ground_truth, const SurrogateConfig& cfg);

}  // namespace mbg
