#pragma once
// 8-bit mu-law companding codec (mu = 255). Encoding maps the companded
// value F(x) = sign(x) ln(1 + mu|x|) / ln(1 + mu) onto 256 uniform bins:
// symbol = min(255, floor((F + 1) / 2 * 256)). Decoding returns the bin
// centre mapped back through F^-1, which halves the worst-case error
// relative to lower-edge decoding.

#include <cstdint>
#include <vector>

namespace mbg {

std::uint8_t mulaw_encode(double x);   // clamps |x| <= 1, rejects NaN
double mulaw_decode(std::uint8_t symbol);

std::vector<std::uint8_t> mulaw_encode(const std::vector<double>& x);
std::vector<double> mulaw_decode(const std::vector<std::uint8_t>& s);

// Companded-domain bin centre for a symbol, in [-1, 1]. This is the scalar
// input representation the vocoder network consumes.
double mulaw_bin_center(std::uint8_t symbol);

}  // namespace mbg
