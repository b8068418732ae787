#include "mbg/lpc.hpp"

#include <cmath>

#include "mbg/kernels.hpp"
#include "mbg/util.hpp"

namespace mbg {

std::vector<double> autocorrelate(const double* frame, std::size_t len,
                                  std::size_t max_lag) {
  if (max_lag >= len) fail("autocorrelate: max_lag must be < frame length");
  const auto& k = kernels::active<double>();
  std::vector<double> r(max_lag + 1, 0.0);
  for (std::size_t lag = 0; lag <= max_lag; ++lag)
    r[lag] = k.dot(frame, frame + lag, len - lag);
  return r;
}

std::vector<double> autocorrelate(const std::vector<double>& frame,
                                  std::size_t max_lag) {
  return autocorrelate(frame.data(), frame.size(), max_lag);
}

LevinsonResult levinson_durbin(const std::vector<double>& r, std::size_t p,
                               double floor_eps) {
  if (p < 1) fail("levinson_durbin: order must be >= 1");
  if (r.size() < p + 1) fail("levinson_durbin: need p+1 autocorrelation lags");

  LevinsonResult out;
  out.alpha.assign(p, 0.0);
  out.reflection.assign(p, 0.0);

  const double r0 = r[0] * (1.0 + floor_eps);
  if (r[0] == 0.0) {
    out.silent = true;
    return out;
  }
  if (r0 <= 0.0) fail("levinson_durbin: r[0] must be nonnegative");

  double energy = r0;
  std::vector<double> prev(p, 0.0);
  for (std::size_t i = 1; i <= p; ++i) {
    double acc = r[i];
    for (std::size_t j = 1; j < i; ++j) acc -= prev[j - 1] * r[i - j];
    const double k = acc / energy;
    if (!(std::fabs(k) < 1.0))
      fail("levinson_durbin: reflection coefficient left (-1, 1); "
           "autocorrelation sequence is not positive definite");
    out.reflection[i - 1] = k;
    out.alpha = prev;
    out.alpha[i - 1] = k;
    for (std::size_t j = 1; j < i; ++j)
      out.alpha[j - 1] = prev[j - 1] - k * prev[i - j - 1];
    energy *= 1.0 - k * k;
    prev = out.alpha;
  }
  out.residual_energy = energy;
  return out;
}

CoeffTrack analyze_lpc(const Waveform& w, const FrameGrid& grid, std::size_t p,
                       double floor_eps) {
  if (p >= grid.length)
    fail("analyze_lpc: order must be smaller than the frame length");
  const Mat<double> frames = frame_signal(w, grid);
  CoeffTrack track;
  track.order = p;
  track.coeffs.resize(grid.n_frames, p, 0.0);
  track.silent.assign(grid.n_frames, false);
  track.source = CoeffSource::ground_truth;
  for (std::size_t i = 0; i < grid.n_frames; ++i) {
    const auto r = autocorrelate(frames.row(i), grid.length, p);
    const auto res = levinson_durbin(r, p, floor_eps);
    track.silent[i] = res.silent;
    double* row = track.coeffs.row(i);
    for (std::size_t k = 0; k < p; ++k) row[k] = res.alpha[k];
  }
  return track;
}

bool alpha_is_stable(const double* alpha, std::size_t p, double radius) {
  // polynomial coefficients of A(z), optionally radius-scaled so that the
  // test checks |poles| < radius
  std::vector<double> a(p + 1);
  a[0] = 1.0;
  double scale = 1.0;
  for (std::size_t k = 1; k <= p; ++k) {
    scale /= radius;
    a[k] = -alpha[k - 1] * scale;
  }
  // step-down recursion
  std::vector<double> b(p + 1);
  for (std::size_t m = p; m >= 1; --m) {
    const double km = a[m];
    if (!(std::fabs(km) < 1.0)) return false;
    const double denom = 1.0 - km * km;
    for (std::size_t j = 0; j <= m - 1; ++j)
      b[j] = (a[j] - km * a[m - j]) / denom;
    for (std::size_t j = 0; j <= m - 1; ++j) a[j] = b[j];
  }
  return true;
}

bool track_is_stable(const CoeffTrack& track, double radius) {
  for (std::size_t i = 0; i < track.n_frames(); ++i)
    if (!alpha_is_stable(track.coeffs.row(i), track.order, radius))
      return false;
  return true;
}

}  // namespace mbg
