#include "mbg/conditions.hpp"

#include <algorithm>
#include <cmath>

#include "mbg/util.hpp"

namespace mbg {

ConditionTrack assemble_conditions(const LsfTrack& lsf,
                                   const std::vector<double>& f0_hz,
                                   const std::vector<double>& energy,
                                   const std::vector<int>& vuv,
                                   double f0_min_hz, double f0_max_hz) {
  const std::size_t n = lsf.n_frames();
  if (f0_hz.size() != n || energy.size() != n || vuv.size() != n)
    fail("assemble_conditions: track lengths disagree");
  const std::size_t p = lsf.order;

  double voiced_log_sum = 0.0;
  std::size_t voiced_count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (vuv[i] && f0_hz[i] > 0.0) {
      voiced_log_sum += std::log(f0_hz[i]);
      ++voiced_count;
    }
  }
  const double fill = voiced_count > 0
                          ? voiced_log_sum / double(voiced_count)
                          : 0.5 * (std::log(f0_min_hz) + std::log(f0_max_hz));

  ConditionTrack out;
  out.n_frames = n;
  out.dim = p + 3;
  out.values.resize(n, out.dim, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double* row = out.values.row(i);
    const double* l = lsf.freqs.row(i);
    std::copy(l, l + p, row);
    row[p] = (vuv[i] && f0_hz[i] > 0.0) ? std::log(f0_hz[i]) : fill;
    row[p + 1] = energy[i];
    row[p + 2] = vuv[i] ? 1.0 : 0.0;
  }
  return out;
}

NormStats compute_norm_stats(const std::vector<const ConditionTrack*>& tracks,
                             double std_floor) {
  if (tracks.empty()) fail("compute_norm_stats: no tracks");
  const std::size_t dim = tracks.front()->dim;
  NormStats st;
  st.mean.assign(dim, 0.0);
  st.stddev.assign(dim, 0.0);
  std::size_t total = 0;
  for (const auto* t : tracks) {
    if (t->dim != dim) fail("compute_norm_stats: dimension mismatch");
    if (t->normalized) fail("compute_norm_stats: expects raw tracks");
    for (std::size_t i = 0; i < t->n_frames; ++i) {
      const double* row = t->values.row(i);
      for (std::size_t d = 0; d < dim; ++d) st.mean[d] += row[d];
      ++total;
    }
  }
  if (total == 0) fail("compute_norm_stats: no frames");
  for (auto& m : st.mean) m /= double(total);
  for (const auto* t : tracks) {
    for (std::size_t i = 0; i < t->n_frames; ++i) {
      const double* row = t->values.row(i);
      for (std::size_t d = 0; d < dim; ++d) {
        const double dv = row[d] - st.mean[d];
        st.stddev[d] += dv * dv;
      }
    }
  }
  for (auto& s : st.stddev) s = std::max(std::sqrt(s / double(total)), std_floor);
  return st;
}

void normalize_conditions(ConditionTrack& track, const NormStats& stats) {
  if (track.normalized) fail("normalize_conditions: already normalized");
  if (stats.mean.size() != track.dim) fail("normalize_conditions: bad stats");
  for (std::size_t i = 0; i < track.n_frames; ++i) {
    double* row = track.values.row(i);
    for (std::size_t d = 0; d < track.dim; ++d)
      row[d] = (row[d] - stats.mean[d]) / stats.stddev[d];
  }
  track.stats = stats;
  track.normalized = true;
}

void denormalize_conditions(ConditionTrack& track) {
  if (!track.normalized) fail("denormalize_conditions: track is raw");
  for (std::size_t i = 0; i < track.n_frames; ++i) {
    double* row = track.values.row(i);
    for (std::size_t d = 0; d < track.dim; ++d)
      row[d] = row[d] * track.stats.stddev[d] + track.stats.mean[d];
  }
  track.normalized = false;
}

Mat<double> upsample_conditions(const ConditionTrack& track,
                                const FrameGrid& grid, std::size_t n_samples) {
  if (!track.normalized) fail("upsample_conditions: normalize first");
  if (track.n_frames != grid.n_frames)
    fail("upsample_conditions: track/grid frame count mismatch");
  Mat<double> rows(n_samples, track.dim, 0.0);
  for (std::size_t n = 0; n < n_samples; ++n) {
    const double* src = track.values.row(grid.frame_of(n));
    std::copy(src, src + track.dim, rows.row(n));
  }
  return rows;
}

}  // namespace mbg
