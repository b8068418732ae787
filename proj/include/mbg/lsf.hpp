#pragma once
// Line spectral frequencies. A stable predictor alpha maps to p strictly
// increasing frequencies in (0, pi): the unit-circle root angles of the
// sum/difference polynomials of A(z), interleaved. The inverse rebuilds A(z)
// from those angles; strict ordering implies a stable reconstruction.

#include <cstddef>
#include <vector>

#include "mbg/lpc.hpp"
#include "mbg/mat.hpp"

namespace mbg {

struct LsfTrack {
  std::size_t order = 0;
  Mat<double> freqs;  // n_frames x order, radians, strictly increasing rows
  CoeffSource source = CoeffSource::ground_truth;

  std::size_t n_frames() const { return freqs.rows; }
};

// Throws on unstable input.
std::vector<double> lpc_to_lsf(const std::vector<double>& alpha);

// Throws unless lsf is strictly increasing inside (0, pi).
std::vector<double> lsf_to_lpc(const std::vector<double>& lsf);

LsfTrack lpc_track_to_lsf(const CoeffTrack& track);
CoeffTrack lsf_track_to_lpc(const LsfTrack& track);

bool lsf_frame_is_ordered(const double* lsf, std::size_t p);

}  // namespace mbg
