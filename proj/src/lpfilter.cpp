#include "mbg/lpfilter.hpp"

#include "mbg/util.hpp"

namespace mbg {

namespace {

void check_alignment(std::size_t n_samples, const CoeffTrack& track,
                     const FrameGrid& grid) {
  if (n_samples == 0) fail("lp filter: empty input");
  if (track.n_frames() != grid.n_frames)
    fail("lp filter: coefficient track has " +
         std::to_string(track.n_frames()) + " frames, grid expects " +
         std::to_string(grid.n_frames));
  if (track.order == 0) fail("lp filter: zero-order track");
}

}  // namespace

std::vector<double> lp_analysis_filter(const Waveform& x,
                                       const CoeffTrack& track,
                                       const FrameGrid& grid) {
  check_alignment(x.samples.size(), track, grid);
  const std::size_t n = x.samples.size();
  const std::size_t p = track.order;
  std::vector<double> e(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* alpha = track.coeffs.row(grid.frame_of(i));
    double pred = 0.0;
    const std::size_t kmax = i < p ? i : p;
    for (std::size_t k = 1; k <= kmax; ++k)
      pred += alpha[k - 1] * x.samples[i - k];
    e[i] = x.samples[i] - pred;
  }
  return e;
}

Waveform lp_synthesis_filter(const std::vector<double>& excitation,
                             const CoeffTrack& track, const FrameGrid& grid,
                             int sample_rate, bool allow_unstable) {
  check_alignment(excitation.size(), track, grid);
  if (!allow_unstable && !track_is_stable(track))
    fail("lp_synthesis_filter: unstable coefficient track refused");
  const std::size_t n = excitation.size();
  const std::size_t p = track.order;
  Waveform y;
  y.sample_rate = sample_rate;
  y.samples.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double* alpha = track.coeffs.row(grid.frame_of(i));
    double acc = excitation[i];
    const std::size_t kmax = i < p ? i : p;
    for (std::size_t k = 1; k <= kmax; ++k)
      acc += alpha[k - 1] * y.samples[i - k];
    y.samples[i] = acc;
  }
  return y;
}

}  // namespace mbg
