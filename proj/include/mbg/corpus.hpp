#pragma once
// Seeded synthetic speech-like corpus: every utterance is a time-varying
// all-pole process driven by a pitch-pulse train and/or noise, with
// silence/voiced/unvoiced segments. Pole radii are bounded by construction,
// so the hidden spectra are known and stable.

#include <cstdint>
#include <string>
#include <vector>

#include "mbg/mat.hpp"
#include "mbg/wav.hpp"

namespace mbg {

enum class CorpusMode { normal, noise_only, pulse_only };

struct CorpusSpec {
  int n_utterances = 20;
  double dur_min_s = 1.0;
  double dur_max_s = 2.0;
  int sample_rate = 16000;
  int p_gen = 8;              // generator filter order (pole pairs * 2)
  CorpusMode mode = CorpusMode::normal;
  double fixed_f0_hz = 0.0;   // pulse_only: pin F0 instead of wandering
  int n_valid = 2;
  int n_test = 3;
};

struct ManifestEntry {
  std::string id;
  std::string source;  // wav path relative to the manifest directory
  std::string split;   // train | valid | test
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  std::uint64_t seed = 0;
};

// Maximum pole modulus used by the generator; also asserted in tests.
inline constexpr double kCorpusMaxPoleRadius = 0.98;

// Deterministic given (spec, seed). When filters_out is non-null it
// receives the per-block predictor coefficients the utterance was filtered
// with (one row per 10 ms block), for stability verification.
Waveform synth_utterance(const CorpusSpec& spec, std::uint64_t seed,
                         int utterance_index,
                         Mat<double>* filters_out = nullptr);

// Generates all utterances into out_dir/wav/ and writes out_dir/manifest.tsv.
DatasetManifest synth_corpus(const CorpusSpec& spec, std::uint64_t seed,
                             const std::string& out_dir);

// Line-oriented manifest: id<TAB>source<TAB>split
void write_manifest(const DatasetManifest& m, const std::string& path);
DatasetManifest read_manifest(const std::string& path);

// Sanity validation mirroring synth_corpus preconditions; returns a list of
// violated constraints (empty when valid).
std::vector<std::string> validate_corpus_spec(const CorpusSpec& spec);

}  // namespace mbg
