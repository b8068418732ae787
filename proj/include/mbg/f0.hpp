#pragma once
// Pitch and voicing from normalized autocorrelation, plus frame energy.

#include <vector>

#include "mbg/frame.hpp"

namespace mbg {

struct F0Config {
  double f0_min_hz = 80.0;
  double f0_max_hz = 300.0;
  double voicing_threshold = 0.3;   // on the normalized correlation peak
  double silence_floor = 1e-6;      // on the frame mean square
};

struct F0Result {
  std::vector<double> f0_hz;  // 0 when unvoiced
  std::vector<int> vuv;       // 1 voiced, 0 unvoiced
};

// Peak search over the lag band [rate/f0_max, rate/f0_min] using the
// normalized cross-correlation of two fixed-length windows, which makes the
// voicing decision invariant to overall gain. Unvoiced frames report f0 = 0.
F0Result estimate_f0(const Waveform& w, const FrameGrid& grid,
                     const F0Config& cfg = {});

// log(mean squared windowed sample + eps); always finite.
std::vector<double> frame_energy(const Mat<double>& frames);

}  // namespace mbg
