#include "mbg/mulaw.hpp"

#include <cmath>

#include "mbg/util.hpp"

namespace mbg {

namespace {
constexpr double kMu = 255.0;
const double kLog1pMu = std::log(1.0 + kMu);
}  // namespace

std::uint8_t mulaw_encode(double x) {
  if (std::isnan(x)) fail("mulaw_encode: NaN input");
  if (x > 1.0) x = 1.0;
  if (x < -1.0) x = -1.0;
  const double f =
      (x < 0.0 ? -1.0 : 1.0) * std::log1p(kMu * std::fabs(x)) / kLog1pMu;
  const double scaled = (f + 1.0) * 0.5 * 256.0;
  const double sym = std::floor(scaled);
  return static_cast<std::uint8_t>(sym >= 255.0 ? 255.0 : (sym < 0.0 ? 0.0 : sym));
}

double mulaw_bin_center(std::uint8_t symbol) {
  return (static_cast<double>(symbol) + 0.5) / 128.0 - 1.0;
}

double mulaw_decode(std::uint8_t symbol) {
  const double c = mulaw_bin_center(symbol);
  const double mag = (std::exp(std::fabs(c) * kLog1pMu) - 1.0) / kMu;
  return c < 0.0 ? -mag : mag;
}

std::vector<std::uint8_t> mulaw_encode(const std::vector<double>& x) {
  std::vector<std::uint8_t> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = mulaw_encode(x[i]);
  return out;
}

std::vector<double> mulaw_decode(const std::vector<std::uint8_t>& s) {
  std::vector<double> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = mulaw_decode(s[i]);
  return out;
}

}  // namespace mbg
