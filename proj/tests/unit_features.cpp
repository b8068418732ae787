#include <doctest.h>

#include <cmath>

#include "mbg/conditions.hpp"
#include "mbg/f0.hpp"
#include "mbg/util.hpp"

#include "testsupport.hpp"

using namespace mbg;

namespace {

Waveform sine(double hz, double seconds, int rate, double amp = 0.5) {
  Waveform w;
  w.sample_rate = rate;
  w.samples.resize(std::size_t(seconds * rate));
  for (std::size_t n = 0; n < w.samples.size(); ++n)
    w.samples[n] = amp * std::sin(2.0 * 3.14159265358979323846 * hz *
                                  double(n) / rate);
  return w;
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

}  // namespace

TEST_CASE("f0: pure tone is tracked within 5 Hz and voiced") {
  const Waveform w = sine(200.0, 1.0, 16000);
  const auto grid = make_grid(w.samples.size(), 80, 400, WindowKind::hann);
  const auto r = estimate_f0(w, grid);
  std::vector<double> voiced_f0;
  std::size_t voiced = 0, considered = 0;
  for (std::size_t i = 2; i + 6 < grid.n_frames; ++i) {  // skip edges
    ++considered;
    if (r.vuv[i]) {
      ++voiced;
      voiced_f0.push_back(r.f0_hz[i]);
    }
  }
  CHECK(voiced == considered);
  const double med = median_of(voiced_f0);
  CHECK(med > 195.0);
  CHECK(med < 205.0);
}

TEST_CASE("f0: white noise is mostly unvoiced") {
  RngStream rng(3);
  Waveform w;
  w.sample_rate = 16000;
  w.samples.resize(16000);
  for (auto& v : w.samples) v = 0.3 * rng.normal();
  const auto grid = make_grid(w.samples.size(), 80, 400, WindowKind::hann);
  const auto r = estimate_f0(w, grid);
  std::size_t unvoiced = 0;
  for (int v : r.vuv) unvoiced += v == 0 ? 1 : 0;
  CHECK(double(unvoiced) / double(grid.n_frames) >= 0.9);
}

TEST_CASE("f0: silence reports unvoiced zero everywhere") {
  Waveform w;
  w.sample_rate = 16000;
  w.samples.assign(8000, 0.0);
  const auto grid = make_grid(w.samples.size(), 80, 400, WindowKind::hann);
  const auto r = estimate_f0(w, grid);
  for (std::size_t i = 0; i < grid.n_frames; ++i) {
    CHECK(r.vuv[i] == 0);
    CHECK(r.f0_hz[i] == 0.0);
  }
}

TEST_CASE("f0: voicing decision is gain-invariant above the floor") {
  const Waveform loud = sine(150.0, 0.5, 16000, 0.8);
  Waveform quiet = loud;
  for (auto& v : quiet.samples) v *= 0.02;  // still above the silence floor
  const auto grid = make_grid(loud.samples.size(), 80, 400, WindowKind::hann);
  const auto ra = estimate_f0(loud, grid);
  const auto rb = estimate_f0(quiet, grid);
  CHECK(ra.vuv == rb.vuv);
}

TEST_CASE("frame energy values") {
  Mat<double> frames(3, 100, 0.0);
  for (std::size_t j = 0; j < 100; ++j) frames.at(1, j) = 1.0;
  for (std::size_t j = 0; j < 100; ++j) frames.at(2, j) = 2.0;
  const auto e = frame_energy(frames);
  CHECK(e[0] == doctest::Approx(std::log(1e-10)));
  CHECK(e[1] == doctest::Approx(std::log(1.0 + 1e-10)));
  // doubling the amplitude raises log energy by log 4
  CHECK(e[2] - e[1] == doctest::Approx(std::log(4.0)).epsilon(1e-9));
}

TEST_CASE("conditions: layout, normalization round trip, upsampling") {
  RngStream rng(9);
  const std::size_t p = 16, frames = 40;
  LsfTrack lsf;
  lsf.order = p;
  lsf.freqs.resize(frames, p);
  for (std::size_t f = 0; f < frames; ++f) {
    double w = 0.05 + 0.1 * rng.uniform();
    for (std::size_t d = 0; d < p; ++d) {
      lsf.freqs.at(f, d) = w;
      w += 0.05 + 0.1 * rng.uniform();
    }
  }
  std::vector<double> f0(frames), energy(frames);
  std::vector<int> vuv(frames);
  for (std::size_t f = 0; f < frames; ++f) {
    vuv[f] = f % 3 != 0;
    f0[f] = vuv[f] ? 100.0 + 10.0 * rng.uniform() : 0.0;
    energy[f] = -2.0 + rng.uniform();
  }
  ConditionTrack track = assemble_conditions(lsf, f0, energy, vuv);
  CHECK(track.dim == p + 3);
  CHECK(track.n_frames == frames);
  // v/uv channel before normalization is exactly 0/1
  for (std::size_t f = 0; f < frames; ++f)
    CHECK(track.values.at(f, p + 2) == (vuv[f] ? 1.0 : 0.0));
  // unvoiced frames carry the voiced mean of log f0
  double vsum = 0.0;
  std::size_t vcount = 0;
  for (std::size_t f = 0; f < frames; ++f)
    if (vuv[f]) {
      vsum += std::log(f0[f]);
      ++vcount;
    }
  for (std::size_t f = 0; f < frames; ++f)
    if (!vuv[f])
      CHECK(track.values.at(f, p) == doctest::Approx(vsum / double(vcount)));

  const ConditionTrack raw = track;
  const auto stats = compute_norm_stats({&track});
  normalize_conditions(track, stats);
  // post-normalization stats over the fitting data
  for (std::size_t d = 0; d < track.dim; ++d) {
    double mean = 0.0;
    for (std::size_t f = 0; f < frames; ++f) mean += track.values.at(f, d);
    mean /= double(frames);
    CHECK(std::fabs(mean) < 1e-6);
    double var = 0.0;
    for (std::size_t f = 0; f < frames; ++f) {
      const double dv = track.values.at(f, d) - mean;
      var += dv * dv;
    }
    const double sd = std::sqrt(var / double(frames));
    CHECK(sd > 1.0 - 1e-3);
    CHECK(sd < 1.0 + 1e-3);
  }

  ConditionTrack back = track;
  denormalize_conditions(back);
  for (std::size_t f = 0; f < frames; ++f)
    for (std::size_t d = 0; d < track.dim; ++d)
      CHECK(back.values.at(f, d) ==
            doctest::Approx(raw.values.at(f, d)).epsilon(1e-9));

  // duplication to sample level: piecewise constant, row count = N
  FrameGrid grid;
  grid.shift = 80;
  grid.length = 400;
  grid.n_frames = frames;
  grid.window = WindowKind::hann;
  const std::size_t n_samples = 80 * frames - 13;
  const auto rows = upsample_conditions(track, grid, n_samples);
  CHECK(rows.rows == n_samples);
  CHECK(rows.cols == track.dim);
  for (std::size_t n = 0; n < 80; ++n)
    for (std::size_t d = 0; d < track.dim; ++d)
      CHECK(rows.at(n, d) == track.values.at(0, d));
  for (std::size_t n = 0; n + 1 < n_samples; ++n) {
    if ((n + 1) % 80 != 0) {
      for (std::size_t d = 0; d < track.dim; ++d)
        CHECK(rows.at(n, d) == rows.at(n + 1, d));
    }
  }

  CHECK_THROWS_AS(assemble_conditions(lsf, {1.0}, energy, vuv), Error);
}
