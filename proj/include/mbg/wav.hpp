#pragma once
// PCM16 mono RIFF/WAVE reader and writer.

#include <cstdint>
#include <string>
#include <vector>

namespace mbg {

struct Waveform {
  std::vector<double> samples;  // in [-1, 1]
  int sample_rate = 0;

  std::size_t size() const { return samples.size(); }
  double duration_s() const {
    return sample_rate > 0 ? double(samples.size()) / sample_rate : 0.0;
  }
};

// Reads a PCM16 mono file. Integer sample s maps to s / 32768, so |x| <= 1
// exactly. Malformed headers and unsupported encodings (non-PCM,
// multi-channel, non-16-bit) are reported as distinct errors.
Waveform read_wav(const std::string& path);

// Writes PCM16 mono, little-endian, canonical 44-byte header. Quantization
// is round(x * 32768) clamped to [-32768, 32767]; together with the read
// mapping this makes write(read(f)) byte-identical for canonical files.
void write_wav(const Waveform& w, const std::string& path);

}  // namespace mbg
