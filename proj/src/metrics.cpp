#include "mbg/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "mbg/frame.hpp"
#include "mbg/util.hpp"

namespace mbg {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

void fft_radix2(std::vector<double>& re, std::vector<double>& im) {
  const std::size_t n = re.size();
  if (n == 0 || (n & (n - 1)) != 0 || im.size() != n)
    fail("fft_radix2: length must be a power of two");
  // bit reversal
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) {
      std::swap(re[i], re[j]);
      std::swap(im[i], im[j]);
    }
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * kPi / double(len);
    const double wr = std::cos(ang), wi = std::sin(ang);
    for (std::size_t i = 0; i < n; i += len) {
      double cr = 1.0, ci = 0.0;
      for (std::size_t j = 0; j < len / 2; ++j) {
        const std::size_t a = i + j, b = i + j + len / 2;
        const double xr = re[b] * cr - im[b] * ci;
        const double xi = re[b] * ci + im[b] * cr;
        re[b] = re[a] - xr;
        im[b] = im[a] - xi;
        re[a] += xr;
        im[a] += xi;
        const double ncr = cr * wr - ci * wi;
        ci = cr * wi + ci * wr;
        cr = ncr;
      }
    }
  }
}

double log_spectral_distortion(const std::vector<double>& x,
                               const std::vector<double>& yin,
                               const LsdConfig& cfg, bool* length_adjusted) {
  if (cfg.fft == 0 || (cfg.fft & (cfg.fft - 1)) != 0)
    fail("log_spectral_distortion: fft size must be a power of two");
  if (cfg.hop == 0) fail("log_spectral_distortion: hop must be positive");
  if (x.size() < cfg.fft)
    fail("log_spectral_distortion: signal shorter than one analysis frame");

  std::vector<double> y = yin;
  if (length_adjusted) *length_adjusted = y.size() != x.size();
  y.resize(x.size(), 0.0);

  const auto win = make_window(WindowKind::hann, cfg.fft);
  const std::size_t n_frames = (x.size() - cfg.fft) / cfg.hop + 1;
  const std::size_t bins = cfg.fft / 2 + 1;
  std::vector<double> re(cfg.fft), im(cfg.fft), re2(cfg.fft), im2(cfg.fft);

  double frame_acc = 0.0;
  for (std::size_t f = 0; f < n_frames; ++f) {
    const std::size_t off = f * cfg.hop;
    for (std::size_t i = 0; i < cfg.fft; ++i) {
      re[i] = x[off + i] * win[i];
      im[i] = 0.0;
      re2[i] = y[off + i] * win[i];
      im2[i] = 0.0;
    }
    fft_radix2(re, im);
    fft_radix2(re2, im2);
    double bin_acc = 0.0;
    for (std::size_t b = 0; b < bins; ++b) {
      const double mx = std::sqrt(re[b] * re[b] + im[b] * im[b]);
      const double my = std::sqrt(re2[b] * re2[b] + im2[b] * im2[b]);
      const double dbx = std::max(20.0 * std::log10(std::max(mx, 1e-300)),
                                  cfg.floor_db);
      const double dby = std::max(20.0 * std::log10(std::max(my, 1e-300)),
                                  cfg.floor_db);
      const double d = dbx - dby;
      bin_acc += d * d;
    }
    frame_acc += bin_acc / double(bins);
  }
  return std::sqrt(frame_acc / double(n_frames));
}

double segmental_snr(const std::vector<double>& x, const std::vector<double>& y,
                     std::size_t frame) {
  if (frame == 0) fail("segmental_snr: frame must be positive");
  if (x.size() != y.size()) fail("segmental_snr: length mismatch");
  const std::size_t n_frames = x.size() / frame;
  if (n_frames == 0) fail("segmental_snr: signal shorter than one frame");
  double acc = 0.0;
  for (std::size_t f = 0; f < n_frames; ++f) {
    const std::size_t off = f * frame;
    double sig = 0.0, err = 0.0;
    for (std::size_t i = 0; i < frame; ++i) {
      sig += x[off + i] * x[off + i];
      const double d = x[off + i] - y[off + i];
      err += d * d;
    }
    double snr;
    if (err == 0.0)
      snr = 35.0;
    else if (sig == 0.0)
      snr = -10.0;
    else
      snr = std::clamp(10.0 * std::log10(sig / err), -10.0, 35.0);
    acc += snr;
  }
  return acc / double(n_frames);
}

double lp_envelope_distortion(const std::vector<double>& alpha_a,
                              const std::vector<double>& alpha_b,
                              std::size_t n_grid) {
  if (n_grid < 2) fail("lp_envelope_distortion: grid too small");
  double acc = 0.0;
  for (std::size_t g = 0; g < n_grid; ++g) {
    const double w = kPi * (double(g) + 0.5) / double(n_grid);
    double ar = 1.0, ai = 0.0, br = 1.0, bi = 0.0;
    for (std::size_t k = 1; k <= alpha_a.size(); ++k) {
      ar -= alpha_a[k - 1] * std::cos(w * double(k));
      ai += alpha_a[k - 1] * std::sin(w * double(k));
    }
    for (std::size_t k = 1; k <= alpha_b.size(); ++k) {
      br -= alpha_b[k - 1] * std::cos(w * double(k));
      bi += alpha_b[k - 1] * std::sin(w * double(k));
    }
    // 20 log10 |1/A| - 20 log10 |1/B| = 10 log10 (|B|^2 / |A|^2)
    const double ma = std::max(ar * ar + ai * ai, 1e-300);
    const double mb = std::max(br * br + bi * bi, 1e-300);
    const double d = 10.0 * std::log10(mb / ma);
    acc += d * d;
  }
  return std::sqrt(acc / double(n_grid));
}

}  // namespace mbg
