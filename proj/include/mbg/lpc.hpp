#pragma once
// Autocorrelation linear-prediction analysis. Coefficients use the predictor
// convention: A(z) = 1 - sum_k alpha_k z^-k, residual e_n = x_n - sum_k
// alpha_k x_{n-k}.

#include <cstddef>
#include <vector>

#include "mbg/frame.hpp"
#include "mbg/mat.hpp"

namespace mbg {

enum class CoeffSource { ground_truth, generated };

struct CoeffTrack {
  std::size_t order = 0;
  Mat<double> coeffs;  // n_frames x order, alpha per frame
  CoeffSource source = CoeffSource::ground_truth;
  std::vector<bool> silent;  // frames flagged silent by the analysis

  std::size_t n_frames() const { return coeffs.rows; }
};

// r[k] = sum_n f[n] f[n+k], k in [0, max_lag]
std::vector<double> autocorrelate(const double* frame, std::size_t len,
                                  std::size_t max_lag);
std::vector<double> autocorrelate(const std::vector<double>& frame,
                                  std::size_t max_lag);

struct LevinsonResult {
  std::vector<double> alpha;       // predictor coefficients, size p
  std::vector<double> reflection;  // size p, all in (-1, 1) when !silent
  double residual_energy = 0.0;
  bool silent = false;  // r[0] == 0; alpha all zero
};

// Solves the Toeplitz normal equations by the Levinson-Durbin recursion.
// r[0] is floored to r[0] * (1 + floor_eps) before the recursion.
LevinsonResult levinson_durbin(const std::vector<double>& r, std::size_t p,
                               double floor_eps = 1e-6);

// Per-frame LP analysis of a waveform: autocorrelation of windowed frames
// followed by the recursion above.
CoeffTrack analyze_lpc(const Waveform& w, const FrameGrid& grid, std::size_t p,
                       double floor_eps = 1e-6);

// Stability check via the step-down (reverse Levinson) recursion: all
// reflection coefficients strictly inside (-1, 1). When radius < 1 the
// polynomial is tested for poles inside that radius instead of the unit
// circle.
bool alpha_is_stable(const double* alpha, std::size_t p, double radius = 1.0);
bool track_is_stable(const CoeffTrack& track, double radius = 1.0);

}  // namespace mbg
