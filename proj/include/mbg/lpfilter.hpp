#pragma once
// Sample-level LP filtering with per-frame coefficients held constant inside
// each frame (zero-order hold) and zero history before the first sample.
// Analysis and synthesis are exact inverses under the same track.

#include <vector>

#include "mbg/frame.hpp"
#include "mbg/lpc.hpp"

namespace mbg {

// e_n = x_n - sum_k alpha_k(frame(n)) x_{n-k}
std::vector<double> lp_analysis_filter(const Waveform& x,
                                       const CoeffTrack& track,
                                       const FrameGrid& grid);

// x_n = e_n + sum_k alpha_k(frame(n)) x_{n-k}. Refuses unstable tracks
// unless allow_unstable is set.
Waveform lp_synthesis_filter(const std::vector<double>& excitation,
                             const CoeffTrack& track, const FrameGrid& grid,
                             int sample_rate, bool allow_unstable = false);

}  // namespace mbg
