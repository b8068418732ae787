#include "mbg/f0.hpp"

#include <algorithm>
#include <cmath>

#include "mbg/kernels.hpp"
#include "mbg/util.hpp"

namespace mbg {

F0Result estimate_f0(const Waveform& w, const FrameGrid& grid,
                     const F0Config& cfg) {
  if (cfg.f0_min_hz >= cfg.f0_max_hz ||
      cfg.f0_max_hz >= 0.5 * w.sample_rate)
    fail("estimate_f0: need f0_min < f0_max < sample_rate/2");
  if (w.samples.empty()) fail("estimate_f0: empty waveform");

  const auto& kd = kernels::active<double>();
  const std::size_t lag_min = std::max<std::size_t>(
      1, static_cast<std::size_t>(w.sample_rate / cfg.f0_max_hz));
  const std::size_t lag_max =
      static_cast<std::size_t>(w.sample_rate / cfg.f0_min_hz);
  if (lag_max + 2 >= grid.length)
    fail("estimate_f0: frame length too short for the f0 band");
  const std::size_t win = grid.length - lag_max - 1;  // room for parabolic refine

  F0Result out;
  out.f0_hz.assign(grid.n_frames, 0.0);
  out.vuv.assign(grid.n_frames, 0);

  std::vector<double> seg(grid.length, 0.0);
  std::vector<double> ncc(lag_max + 2, 0.0);
  for (std::size_t i = 0; i < grid.n_frames; ++i) {
    const std::size_t start = i * grid.shift;
    for (std::size_t j = 0; j < grid.length; ++j) {
      const std::size_t n = start + j;
      seg[j] = n < w.samples.size() ? w.samples[n] : 0.0;
    }
    const double e0 = kd.dot(seg.data(), seg.data(), win);
    double ms = 0.0;
    for (std::size_t j = 0; j < grid.length; ++j) ms += seg[j] * seg[j];
    ms /= static_cast<double>(grid.length);
    if (ms <= cfg.silence_floor || e0 <= 0.0) continue;

    double best = 0.0;
    for (std::size_t lag = lag_min; lag <= lag_max + 1; ++lag) {
      const double cross = kd.dot(seg.data(), seg.data() + lag, win);
      const double el = kd.dot(seg.data() + lag, seg.data() + lag, win);
      ncc[lag] = el > 0.0 ? cross / std::sqrt(e0 * el) : 0.0;
      if (lag <= lag_max) best = std::max(best, ncc[lag]);
    }
    if (best < cfg.voicing_threshold) continue;

    // smallest local peak close to the global one avoids octave doubling
    std::size_t pick = 0;
    for (std::size_t lag = lag_min; lag <= lag_max; ++lag) {
      const double left = lag > lag_min ? ncc[lag - 1] : -1.0;
      const double right = ncc[lag + 1];
      if (ncc[lag] >= left && ncc[lag] >= right && ncc[lag] >= 0.95 * best) {
        pick = lag;
        break;
      }
    }
    if (pick == 0) continue;

    double lag_refined = static_cast<double>(pick);
    if (pick > lag_min && pick < lag_max) {
      const double a = ncc[pick - 1], b = ncc[pick], c = ncc[pick + 1];
      const double denom = a - 2.0 * b + c;
      if (std::fabs(denom) > 1e-12) {
        const double delta = 0.5 * (a - c) / denom;
        if (std::fabs(delta) <= 1.0) lag_refined += delta;
      }
    }
    out.vuv[i] = 1;
    out.f0_hz[i] = static_cast<double>(w.sample_rate) / lag_refined;
  }
  return out;
}

std::vector<double> frame_energy(const Mat<double>& frames) {
  constexpr double kEps = 1e-10;
  std::vector<double> e(frames.rows, 0.0);
  for (std::size_t i = 0; i < frames.rows; ++i) {
    const double* row = frames.row(i);
    double ms = 0.0;
    for (std::size_t j = 0; j < frames.cols; ++j) ms += row[j] * row[j];
    e[i] = std::log(ms / static_cast<double>(frames.cols) + kEps);
  }
  return e;
}

}  // namespace mbg
