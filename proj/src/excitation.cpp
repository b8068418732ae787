#include "mbg/excitation.hpp"

#include <algorithm>
#include <cmath>

#include "mbg/lpfilter.hpp"
#include "mbg/mulaw.hpp"
#include "mbg/util.hpp"

namespace mbg {

namespace {

double peak_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

}  // namespace

ExcitationTrack extract_plain(const Waveform& x, const CoeffTrack& alpha,
                              const FrameGrid& grid) {
  if (alpha.source != CoeffSource::ground_truth)
    fail("extract_plain: requires a ground-truth coefficient track");
  ExcitationTrack out;
  out.kind = ExcitationKind::plain;
  out.raw = lp_analysis_filter(x, alpha, grid);
  out.silent = peak_abs(out.raw) == 0.0;
  return out;
}

ExcitationTrack extract_mbg(const Waveform& x, const CoeffTrack& alpha_hat,
                            const FrameGrid& grid) {
  if (alpha_hat.source != CoeffSource::generated)
    fail("extract_mbg: requires a generated coefficient track");
  if (!track_is_stable(alpha_hat))
    fail("extract_mbg: generated track is unstable");
  ExcitationTrack out;
  out.kind = ExcitationKind::mbg;
  out.raw = lp_analysis_filter(x, alpha_hat, grid);
  out.silent = peak_abs(out.raw) == 0.0;
  return out;
}

ExcitationTrack intermediate_prediction(const Waveform& x,
                                        const CoeffTrack& alpha,
                                        const CoeffTrack& alpha_hat,
                                        const FrameGrid& grid) {
  if (alpha.n_frames() != alpha_hat.n_frames() ||
      alpha.order != alpha_hat.order)
    fail("intermediate_prediction: misaligned coefficient tracks");
  if (alpha.n_frames() != grid.n_frames)
    fail("intermediate_prediction: track/grid mismatch");
  const std::size_t n = x.samples.size();
  const std::size_t p = alpha.order;
  ExcitationTrack out;
  out.kind = ExcitationKind::intermediate;
  out.raw.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t f = grid.frame_of(i);
    const double* a = alpha.coeffs.row(f);
    const double* ah = alpha_hat.coeffs.row(f);
    double acc = 0.0;
    const std::size_t kmax = i < p ? i : p;
    for (std::size_t k = 1; k <= kmax; ++k)
      acc += (a[k - 1] - ah[k - 1]) * x.samples[i - k];
    out.raw[i] = acc;
  }
  out.silent = peak_abs(out.raw) == 0.0;
  return out;
}

void normalize(ExcitationTrack& track) {
  if (track.normalized) fail("normalize: track already normalized");
  const double peak = peak_abs(track.raw);
  if (peak == 0.0) fail("normalize: silent track (all-zero excitation)");
  track.gain = peak;
  const double inv = 1.0 / peak;
  for (auto& v : track.raw) v *= inv;
  track.normalized = true;
}

void denormalize(ExcitationTrack& track) {
  if (!track.normalized) fail("denormalize: track is not normalized");
  for (auto& v : track.raw) v *= track.gain;
  track.gain = 0.0;
  track.normalized = false;
}

void attach_symbols(ExcitationTrack& track) {
  if (!track.normalized) fail("attach_symbols: normalize first");
  track.symbols = mulaw_encode(track.raw);
}

}  // namespace mbg
