#pragma once
// Objective waveform metrics: log-spectral distortion and segmental SNR,
// plus the LP-envelope distortion used to characterize surrogate error.

#include <cstddef>
#include <vector>

namespace mbg {

struct LsdConfig {
  std::size_t fft = 1024;
  std::size_t hop = 256;
  double floor_db = -80.0;
};

// RMS over frames of the per-frame RMS difference of 20*log10 magnitude
// spectra (Hann window, bins floored at floor_db). y is truncated or
// zero-padded to x's length; *length_adjusted reports whether that happened.
double log_spectral_distortion(const std::vector<double>& x,
                               const std::vector<double>& y,
                               const LsdConfig& cfg = {},
                               bool* length_adjusted = nullptr);

// Mean over non-overlapping frames of 10*log10(sum x^2 / sum (x-y)^2), each
// frame clamped to [-10, 35] dB.
double segmental_snr(const std::vector<double>& x,
                     const std::vector<double>& y, std::size_t frame = 240);

// RMS difference of the two all-pole log-magnitude envelopes
// 20*log10 |1/A(e^jw)| over a uniform frequency grid, in dB.
double lp_envelope_distortion(const std::vector<double>& alpha_a,
                              const std::vector<double>& alpha_b,
                              std::size_t n_grid = 256);

// In-place radix-2 complex FFT helper used by the LSD metric (power-of-two
// length). Exposed for tests.
void fft_radix2(std::vector<double>& re, std::vector<double>& im);

}  // namespace mbg
