#pragma once
// Excitation extraction. Plain extraction whitens with the ground-truth
// predictor; closed-loop extraction whitens with the generated predictor, so
// the residual carries both the true excitation and the prediction error
// injected by the generated coefficients, and driving the generated
// synthesis filter with it recovers the original signal exactly.

#include <cstdint>
#include <optional>
#include <vector>

#include "mbg/frame.hpp"
#include "mbg/lpc.hpp"

namespace mbg {

enum class ExcitationKind { plain, mbg, intermediate };

struct ExcitationTrack {
  std::vector<double> raw;
  double gain = 0.0;  // set by normalize(); raw is peak-1 afterwards
  std::optional<std::vector<std::uint8_t>> symbols;
  ExcitationKind kind = ExcitationKind::plain;
  bool silent = false;
  bool normalized = false;
};

// Residual against the ground-truth track. Rejects generated tracks.
ExcitationTrack extract_plain(const Waveform& x, const CoeffTrack& alpha,
                              const FrameGrid& grid);

// Closed-loop residual against the generated track. Rejects ground-truth
// tracks so training modes cannot silently mix sources.
ExcitationTrack extract_mbg(const Waveform& x, const CoeffTrack& alpha_hat,
                            const FrameGrid& grid);

// sum_k (alpha_k - alpha_hat_k) x_{n-k}: the component of the closed-loop
// residual contributed by the coefficient error.
ExcitationTrack intermediate_prediction(const Waveform& x,
                                        const CoeffTrack& alpha,
                                        const CoeffTrack& alpha_hat,
                                        const FrameGrid& grid);

// Peak normalization: gain = max|raw|, raw scaled so the peak is exactly 1
// in magnitude. Errors on all-zero tracks.
void normalize(ExcitationTrack& track);
void denormalize(ExcitationTrack& track);

// Fills track.symbols with the 8-bit companded code of the normalized raw.
void attach_symbols(ExcitationTrack& track);

}  // namespace mbg
