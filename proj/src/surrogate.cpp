#include "mbg/surrogate.hpp"

#include <algorithm>
#include <cmath>

#include "mbg/util.hpp"

namespace mbg {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

std::vector<std::string> validate_surrogate_config(const SurrogateConfig& cfg,
                                                   std::size_t order) {
  std::vector<std::string> bad;
  if (cfg.smooth_frames < 1 || cfg.smooth_frames % 2 == 0)
    bad.push_back("surrogate: smooth_frames must be an odd integer >= 1");
  if (cfg.noise_std_rad < 0.0)
    bad.push_back("surrogate: noise_std_rad must be >= 0");
  if (!(cfg.min_gap_rad > 0.0))
    bad.push_back("surrogate: min_gap_rad must be > 0");
  else if (cfg.min_gap_rad * double(order + 1) >= kPi)
    bad.push_back("surrogate: min_gap_rad * (order + 1) must stay below pi");
  return bad;
}

void repair_ordering(double* lsf, std::size_t p, double min_gap_rad) {
  std::sort(lsf, lsf + p);
  const double lo = min_gap_rad;
  const double hi = kPi - min_gap_rad;
  for (std::size_t i = 0; i < p; ++i) lsf[i] = std::clamp(lsf[i], lo, hi);
  for (std::size_t i = 1; i < p; ++i)
    lsf[i] = std::max(lsf[i], lsf[i - 1] + min_gap_rad);
  if (p >= 1) lsf[p - 1] = std::min(lsf[p - 1], hi);
  for (std::size_t i = p; i-- > 1;)
    lsf[i - 1] = std::min(lsf[i - 1], lsf[i] - min_gap_rad);
}

LsfTrack generate_lsf(const LsfTrack& ground_truth,
                      const SurrogateConfig& cfg) {
  const auto bad = validate_surrogate_config(cfg, ground_truth.order);
  if (!bad.empty()) fail("generate_lsf: " + bad.front());

  const std::size_t n = ground_truth.n_frames();
  const std::size_t p = ground_truth.order;
  LsfTrack out;
  out.order = p;
  out.source = CoeffSource::generated;
  out.freqs.resize(n, p, 0.0);

  // temporal moving average per dimension, truncated at the edges
  const int half = cfg.smooth_frames / 2;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= std::size_t(half) ? i - half : 0;
    const std::size_t hi = std::min(n - 1, i + std::size_t(half));
    double* row = out.freqs.row(i);
    for (std::size_t f = lo; f <= hi; ++f) {
      const double* src = ground_truth.freqs.row(f);
      for (std::size_t d = 0; d < p; ++d) row[d] += src[d];
    }
    const double inv = 1.0 / double(hi - lo + 1);
    for (std::size_t d = 0; d < p; ++d) row[d] *= inv;
  }

  RngStream rng(derive_seed(cfg.seed, "surrogate-noise"));
  for (std::size_t i = 0; i < n; ++i) {
    double* row = out.freqs.row(i);
    if (cfg.noise_std_rad > 0.0)
      for (std::size_t d = 0; d < p; ++d)
        row[d] += cfg.noise_std_rad * rng.normal();
    repair_ordering(row, p, cfg.min_gap_rad);
  }
  return out;
}

}  // namespace mbg
