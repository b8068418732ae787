#include "mbg/frame.hpp"

#include <cmath>

#include "mbg/util.hpp"

namespace mbg {

FrameGrid make_grid(std::size_t n_samples, std::size_t shift,
                    std::size_t length, WindowKind window) {
  if (shift == 0 || length < shift) fail("make_grid: need 0 < shift <= length");
  if (n_samples == 0) fail("make_grid: empty waveform");
  FrameGrid g;
  g.shift = shift;
  g.length = length;
  g.n_frames = (n_samples + shift - 1) / shift;
  g.window = window;
  return g;
}

std::vector<double> make_window(WindowKind kind, std::size_t length) {
  std::vector<double> w(length, 1.0);
  if (kind == WindowKind::hann) {
    for (std::size_t i = 0; i < length; ++i)
      w[i] = 0.5 - 0.5 * std::cos(2.0 * 3.14159265358979323846 *
                                  (double(i) + 0.5) / double(length));
  }
  return w;
}

Mat<double> frame_signal(const Waveform& w, const FrameGrid& grid) {
  if (w.samples.empty()) fail("frame_signal: empty waveform");
  const auto win = make_window(grid.window, grid.length);
  Mat<double> frames(grid.n_frames, grid.length, 0.0);
  for (std::size_t i = 0; i < grid.n_frames; ++i) {
    const std::size_t start = i * grid.shift;
    double* row = frames.row(i);
    for (std::size_t j = 0; j < grid.length; ++j) {
      const std::size_t n = start + j;
      row[j] = n < w.samples.size() ? w.samples[n] * win[j] : 0.0;
    }
  }
  return frames;
}

}  // namespace mbg
