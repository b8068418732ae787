#pragma once
// Frame geometry and windowing. Frames are left-aligned: frame i covers
// samples [i*shift, i*shift + length), zero-padded past the signal end, and
// sample n belongs to frame floor(n/shift) for coefficient hold purposes.

#include <cstddef>
#include <vector>

#include "mbg/mat.hpp"
#include "mbg/wav.hpp"

namespace mbg {

enum class WindowKind { hann, rectangular };

struct FrameGrid {
  std::size_t shift = 0;   // samples
  std::size_t length = 0;  // samples
  std::size_t n_frames = 0;
  WindowKind window = WindowKind::hann;

  // frame index owning sample n (clamped to the last frame)
  std::size_t frame_of(std::size_t n) const {
    const std::size_t i = n / shift;
    return i < n_frames ? i : n_frames - 1;
  }
};

// n_frames = ceil(n_samples / shift)
FrameGrid make_grid(std::size_t n_samples, std::size_t shift,
                    std::size_t length, WindowKind window);

// Periodic Hann with half-sample offset (nonzero endpoints); all ones for
// rectangular.
std::vector<double> make_window(WindowKind kind, std::size_t length);

// Windowed frames, one row per frame.
Mat<double> frame_signal(const Waveform& w, const FrameGrid& grid);

}  // namespace mbg
