#include <doctest.h>

#include <cmath>

#include "mbg/frame.hpp"
#include "mbg/lpc.hpp"
#include "mbg/lpfilter.hpp"
#include "mbg/util.hpp"

#include "testsupport.hpp"

using namespace mbg;

TEST_CASE("framing: geometry and windows") {
  CHECK(make_grid(16000, 80, 400, WindowKind::hann).n_frames == 200);
  CHECK(make_grid(16001, 80, 400, WindowKind::hann).n_frames == 201);
  CHECK(make_grid(79, 80, 400, WindowKind::hann).n_frames == 1);
  CHECK_THROWS_AS(make_grid(0, 80, 400, WindowKind::hann), Error);
  CHECK_THROWS_AS(make_grid(100, 0, 400, WindowKind::hann), Error);
  CHECK_THROWS_AS(make_grid(100, 80, 40, WindowKind::hann), Error);

  // 5 ms at 16 kHz is 80 samples
  CHECK(std::size_t(0.005 * 16000) == 80);

  Waveform w;
  w.sample_rate = 16000;
  w.samples.assign(1000, 0.25);
  const auto grid = make_grid(w.samples.size(), 100, 200,
                              WindowKind::rectangular);
  const auto frames = frame_signal(w, grid);
  // constant signal + rectangular window: all fully-covered frames identical
  for (std::size_t i = 0; i + 2 < grid.n_frames; ++i)
    for (std::size_t j = 0; j < grid.length; ++j)
      CHECK(frames.at(i, j) == 0.25);
  // zero padding past the end
  CHECK(frames.at(grid.n_frames - 1, grid.length - 1) == 0.0);
}

TEST_CASE("autocorrelation: impulse, energy, cosine") {
  std::vector<double> f(64, 0.0);
  f[0] = 1.0;
  auto r = autocorrelate(f, 8);
  CHECK(r[0] == 1.0);
  for (std::size_t k = 1; k <= 8; ++k) CHECK(r[k] == 0.0);

  RngStream rng(5);
  std::vector<double> g(128);
  for (auto& v : g) v = rng.normal();
  r = autocorrelate(g, 16);
  double e = 0.0;
  for (double v : g) e += v * v;
  CHECK(r[0] == doctest::Approx(e).epsilon(1e-12));
  for (std::size_t k = 1; k <= 16; ++k) CHECK(std::fabs(r[k]) <= r[0]);

  // long cosine frame: r[k]/r[0] ~ cos(w k) for small k (direct summation
  // oracle is the definition itself; compare against the closed form)
  const double w = 0.3;
  std::vector<double> c(4096);
  for (std::size_t n = 0; n < c.size(); ++n) c[n] = std::cos(w * double(n));
  r = autocorrelate(c, 8);
  for (std::size_t k = 1; k <= 8; ++k)
    CHECK(r[k] / r[0] == doctest::Approx(std::cos(w * double(k))).epsilon(2e-3));

  CHECK_THROWS_AS(autocorrelate(f, 64), Error);
}

TEST_CASE("levinson: closed forms and silent frames") {
  // white noise
  std::vector<double> r = {1.0, 0.0, 0.0, 0.0, 0.0};
  auto res = levinson_durbin(r, 4, 0.0);
  for (double a : res.alpha) CHECK(a == 0.0);
  CHECK(res.residual_energy == doctest::Approx(1.0));

  // AR(1): r[k] = a^k implies alpha = [a, 0, ...]
  const double a = 0.8;
  r.resize(6);
  for (std::size_t k = 0; k < r.size(); ++k) r[k] = std::pow(a, double(k));
  res = levinson_durbin(r, 5, 0.0);
  CHECK(res.alpha[0] == doctest::Approx(a).epsilon(1e-12));
  for (std::size_t k = 1; k < 5; ++k)
    CHECK(res.alpha[k] == doctest::Approx(0.0).epsilon(1e-12));

  // silent frame is flagged, not an error
  res = levinson_durbin({0.0, 0.0, 0.0}, 2);
  CHECK(res.silent);
  CHECK(res.residual_energy == 0.0);
  for (double v : res.alpha) CHECK(v == 0.0);

  CHECK_THROWS_AS(levinson_durbin({1.0, 0.5}, 2), Error);  // too few lags
  CHECK_THROWS_AS(levinson_durbin({1.0, 0.5, 0.3}, 0), Error);
}

TEST_CASE("levinson: matches the dense normal-equation oracle") {
  RngStream rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t p = 2 + rng.uniform_int(14);
    // autocorrelation of a random stable AR signal segment
    const auto alpha = testsupport::random_stable_alpha(rng, p, 0.85);
    std::vector<double> x(2048, 0.0);
    for (std::size_t n = 0; n < x.size(); ++n) {
      double acc = rng.normal();
      for (std::size_t k = 1; k <= p && k <= n; ++k)
        acc += alpha[k - 1] * x[n - k];
      x[n] = acc;
    }
    const auto r = autocorrelate(x, p);
    const auto mine = levinson_durbin(r, p, 1e-9);
    const auto oracle = testsupport::normal_equation_solve(r, p, 1e-9);
    for (std::size_t k = 0; k < p; ++k)
      CHECK(mine.alpha[k] == doctest::Approx(oracle[k]).epsilon(1e-8));
    for (double k : mine.reflection) {
      CHECK(k > -1.0);
      CHECK(k < 1.0);
    }
  }
}

TEST_CASE("levinson: residual energy non-increasing in order") {
  RngStream rng(23);
  std::vector<double> x(4096, 0.0);
  const auto alpha = testsupport::random_stable_alpha(rng, 8, 0.9);
  for (std::size_t n = 0; n < x.size(); ++n) {
    double acc = rng.normal();
    for (std::size_t k = 1; k <= 8 && k <= n; ++k)
      acc += alpha[k - 1] * x[n - k];
    x[n] = acc;
  }
  const auto r = autocorrelate(x, 24);
  double prev = r[0] * (1.0 + 1e-6);
  for (std::size_t p = 1; p <= 24; ++p) {
    const auto res = levinson_durbin(r, p);
    CHECK(res.residual_energy <= prev * (1.0 + 1e-12));
    CHECK(res.residual_energy >= 0.0);
    prev = res.residual_energy;
  }
}

TEST_CASE("stability check agrees with explicit root finding") {
  RngStream rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t p = 2 + rng.uniform_int(10);
    const auto alpha = testsupport::random_stable_alpha(rng, p, 0.97);
    CHECK(alpha_is_stable(alpha.data(), p));
    const auto roots = testsupport::predictor_roots(alpha);
    for (const auto& z : roots) CHECK(std::abs(z) < 1.0);
  }
  // an explicitly unstable predictor: single pole outside the circle
  std::vector<double> bad = {1.2};
  CHECK_FALSE(alpha_is_stable(bad.data(), 1));
  // radius-limited check
  std::vector<double> pole95 = {0.95};
  CHECK(alpha_is_stable(pole95.data(), 1, 1.0));
  CHECK_FALSE(alpha_is_stable(pole95.data(), 1, 0.9));
}

TEST_CASE("lp filters: identities") {
  RngStream rng(41);
  Waveform x;
  x.sample_rate = 16000;
  x.samples.resize(4000);
  for (auto& v : x.samples) v = 0.3 * rng.normal();
  const auto grid = make_grid(x.samples.size(), 80, 400, WindowKind::hann);
  const auto track =
      testsupport::random_stable_track(rng, grid.n_frames, 12,
                                       CoeffSource::ground_truth);

  // zero input -> zero residual
  Waveform zero = x;
  std::fill(zero.samples.begin(), zero.samples.end(), 0.0);
  for (double e : lp_analysis_filter(zero, track, grid)) CHECK(e == 0.0);

  // all-zero coefficients -> identity
  CoeffTrack id_track = track;
  id_track.coeffs.fill(0.0);
  const auto e_id = lp_analysis_filter(x, id_track, grid);
  for (std::size_t n = 0; n < x.samples.size(); ++n)
    CHECK(e_id[n] == x.samples[n]);

  // synthesis(analysis(x)) == x
  const auto e = lp_analysis_filter(x, track, grid);
  const Waveform back = lp_synthesis_filter(e, track, grid, x.sample_rate);
  double worst = 0.0;
  for (std::size_t n = 0; n < x.samples.size(); ++n)
    worst = std::max(worst, std::fabs(back.samples[n] - x.samples[n]));
  CHECK(worst < 1e-8);

  // zero excitation -> zero output
  const std::vector<double> silence(x.samples.size(), 0.0);
  for (double v :
       lp_synthesis_filter(silence, track, grid, x.sample_rate).samples)
    CHECK(v == 0.0);

  // impulse through a fixed AR(1) gives the geometric decay
  CoeffTrack ar1;
  ar1.order = 1;
  ar1.coeffs.resize(grid.n_frames, 1, 0.9);
  ar1.silent.assign(grid.n_frames, false);
  std::vector<double> imp(x.samples.size(), 0.0);
  imp[0] = 1.0;
  const auto decay = lp_synthesis_filter(imp, ar1, grid, x.sample_rate);
  for (std::size_t n = 0; n < 40; ++n)
    CHECK(decay.samples[n] ==
          doctest::Approx(std::pow(0.9, double(n))).epsilon(1e-12));

  // mismatched track length is rejected
  CoeffTrack bad = track;
  bad.coeffs.resize(grid.n_frames - 1, 12);
  bad.silent.resize(grid.n_frames - 1);
  CHECK_THROWS_AS(lp_analysis_filter(x, bad, grid), Error);
}

TEST_CASE("lp analysis recovers a known driving impulse train") {
  // signal built by direct recursion from a fixed stable filter
  RngStream rng(53);
  const std::size_t p = 10;
  const auto alpha = testsupport::random_stable_alpha(rng, p, 0.9);
  const std::size_t n = 3000;
  std::vector<double> drive(n, 0.0);
  for (std::size_t i = 0; i < n; i += 160) drive[i] = 1.0;
  Waveform x;
  x.sample_rate = 16000;
  x.samples.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = drive[i];
    for (std::size_t k = 1; k <= p && k <= i; ++k)
      acc += alpha[k - 1] * x.samples[i - k];
    x.samples[i] = acc;
  }
  const auto grid = make_grid(n, 80, 400, WindowKind::hann);
  CoeffTrack track;
  track.order = p;
  track.coeffs.resize(grid.n_frames, p);
  track.silent.assign(grid.n_frames, false);
  for (std::size_t f = 0; f < grid.n_frames; ++f)
    std::copy(alpha.begin(), alpha.end(), track.coeffs.row(f));
  const auto e = lp_analysis_filter(x, track, grid);
  double worst = 0.0;
  for (std::size_t i = p; i < n; ++i)
    worst = std::max(worst, std::fabs(e[i] - drive[i]));
  CHECK(worst < 1e-9);
}

TEST_CASE("unstable synthesis track is refused unless allowed") {
  Waveform x;
  x.sample_rate = 16000;
  x.samples.assign(500, 0.01);
  const auto grid = make_grid(500, 80, 400, WindowKind::hann);
  CoeffTrack bad;
  bad.order = 1;
  bad.coeffs.resize(grid.n_frames, 1, 1.05);
  bad.silent.assign(grid.n_frames, false);
  CHECK_THROWS_AS(lp_synthesis_filter(x.samples, bad, grid, 16000), Error);
  CHECK_NOTHROW(lp_synthesis_filter(x.samples, bad, grid, 16000, true));
}
