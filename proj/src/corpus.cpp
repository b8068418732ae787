#include "mbg/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mbg/util.hpp"

namespace mbg {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct PolePair {
  double r;
  double theta;
};

struct GenBounds {
  double r_lo, r_hi;
  double th_lo, th_hi;
};

// A(z) = 1 - sum alpha_k z^-k from pole pairs; returns alpha (predictor form)
std::vector<double> poles_to_alpha(const std::vector<PolePair>& pairs) {
  // multiply out prod (1 - 2 r cos(theta) z^-1 + r^2 z^-2)
  std::vector<double> a = {1.0};
  for (const auto& p : pairs) {
    const double b1 = -2.0 * p.r * std::cos(p.theta);
    const double b2 = p.r * p.r;
    std::vector<double> next(a.size() + 2, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
      next[i] += a[i];
      next[i + 1] += a[i] * b1;
      next[i + 2] += a[i] * b2;
    }
    a = std::move(next);
  }
  std::vector<double> alpha(a.size() - 1);
  for (std::size_t k = 1; k < a.size(); ++k) alpha[k - 1] = -a[k];
  return alpha;
}

double reflect_into(double v, double lo, double hi) {
  // fold the value back into [lo, hi]
  while (v < lo || v > hi) {
    if (v < lo) v = 2.0 * lo - v;
    if (v > hi) v = 2.0 * hi - v;
  }
  return v;
}

enum class SegType { silence, voiced, unvoiced };

struct Segment {
  SegType type;
  std::size_t len;
};

std::vector<Segment> plan_segments(RngStream& rng, std::size_t n, int rate,
                                   CorpusMode mode) {
  std::vector<Segment> segs;
  if (mode == CorpusMode::noise_only) {
    segs.push_back({SegType::unvoiced, n});
    return segs;
  }
  if (mode == CorpusMode::pulse_only) {
    segs.push_back({SegType::voiced, n});
    return segs;
  }
  std::size_t placed = 0;
  bool any_voiced = false;
  while (placed < n) {
    const std::size_t len = std::min(
        n - placed,
        static_cast<std::size_t>(rng.uniform(0.10, 0.40) * rate));
    const double u = rng.uniform();
    SegType t = u < 0.55 ? SegType::voiced
                         : (u < 0.80 ? SegType::unvoiced : SegType::silence);
    if (t == SegType::voiced) any_voiced = true;
    segs.push_back({t, std::max<std::size_t>(len, 1)});
    placed += segs.back().len;
  }
  if (!any_voiced) {
    auto longest = std::max_element(
        segs.begin(), segs.end(),
        [](const Segment& a, const Segment& b) { return a.len < b.len; });
    longest->type = SegType::voiced;
  }
  return segs;
}

}  // namespace

std::vector<std::string> validate_corpus_spec(const CorpusSpec& spec) {
  std::vector<std::string> bad;
  if (spec.n_utterances < 1) bad.push_back("corpus: utterances must be >= 1");
  if (spec.dur_min_s <= 0.0) bad.push_back("corpus: dur_min_s must be > 0");
  if (spec.dur_max_s < spec.dur_min_s)
    bad.push_back("corpus: dur_max_s must be >= dur_min_s");
  if (spec.sample_rate <= 0) bad.push_back("corpus: sample_rate must be > 0");
  if (spec.p_gen < 1) bad.push_back("corpus: p_gen must be >= 1");
  if (spec.n_valid < 1) bad.push_back("corpus: n_valid must be >= 1");
  if (spec.n_test < 1) bad.push_back("corpus: n_test must be >= 1");
  if (spec.n_utterances - spec.n_valid - spec.n_test < 1)
    bad.push_back("corpus: train split would be empty");
  if (spec.fixed_f0_hz != 0.0 &&
      (spec.fixed_f0_hz < 50.0 || spec.fixed_f0_hz > 500.0))
    bad.push_back("corpus: fixed_f0_hz must lie in [50, 500]");
  return bad;
}

Waveform synth_utterance(const CorpusSpec& spec, std::uint64_t seed,
                         int utterance_index, Mat<double>* filters_out) {
  auto bad = validate_corpus_spec(spec);
  if (!bad.empty()) fail("synth_utterance: " + bad.front());

  RngStream rng(derive_seed(seed, "corpus-utt",
                            static_cast<std::uint64_t>(utterance_index)));
  const int rate = spec.sample_rate;
  const std::size_t n = static_cast<std::size_t>(
      rng.uniform(spec.dur_min_s, spec.dur_max_s) * rate);

  // pole-pair spectra; noise-only keeps resonances weak and well above the
  // pitch lag band (fricative-like), otherwise narrowband noise would read
  // as quasi-periodic
  const bool noisy = spec.mode == CorpusMode::noise_only;
  // noise-only stays close to white: the voicing detector's normalized
  // correlation over ~200-sample windows has a noise floor near 0.25, and
  // anything resonant enough to lengthen the correlation time reads as
  // quasi-periodic
  const GenBounds bounds{
      noisy ? 0.10 : 0.60, noisy ? 0.40 : kCorpusMaxPoleRadius,
      2.0 * kPi * (noisy ? 1500.0 : 300.0) / rate, 0.90 * kPi};

  const int n_pairs = std::max(1, spec.p_gen / 2);
  std::vector<PolePair> poles(n_pairs);
  for (auto& p : poles) {
    p.r = rng.uniform(bounds.r_lo, bounds.r_hi);
    p.theta = rng.uniform(bounds.th_lo, bounds.th_hi);
  }

  const auto segs = plan_segments(rng, n, rate, spec.mode);

  // excitation with raised-cosine segment ramps
  std::vector<double> exc(n, 0.0);
  const std::size_t ramp = static_cast<std::size_t>(0.005 * rate);
  double log_f0 = std::log(spec.fixed_f0_hz > 0.0 ? spec.fixed_f0_hz
                                                  : rng.uniform(100.0, 260.0));
  const double log_lo = std::log(80.0), log_hi = std::log(300.0);
  double phase = 1.0;  // fire a pulse at the first voiced sample
  std::size_t start = 0;
  for (const auto& seg : segs) {
    const std::size_t end = std::min(n, start + seg.len);
    for (std::size_t i = start; i < end; ++i) {
      double env = 1.0;
      const std::size_t into = i - start, left = end - i;
      if (ramp > 0 && into < ramp)
        env *= 0.5 - 0.5 * std::cos(kPi * double(into) / ramp);
      if (ramp > 0 && left <= ramp)
        env *= 0.5 - 0.5 * std::cos(kPi * double(left) / ramp);
      switch (seg.type) {
        case SegType::silence:
          exc[i] = 0.0;
          break;
        case SegType::unvoiced:
          exc[i] = 0.25 * rng.normal() * env;
          break;
        case SegType::voiced: {
          if (spec.fixed_f0_hz <= 0.0 && i % 160 == 0) {
            log_f0 = reflect_into(log_f0 + 0.01 * rng.normal(), log_lo, log_hi);
          }
          const double f0 = std::exp(log_f0);
          phase += f0 / rate;
          double v = 0.03 * rng.normal();
          if (phase >= 1.0) {
            phase -= 1.0;
            v += 1.0;
          }
          exc[i] = v * env;
          break;
        }
      }
    }
    start = end;
  }

  // time-varying all-pole filter, coefficients held per 10 ms block
  Waveform w;
  w.sample_rate = rate;
  w.samples.assign(n, 0.0);
  const std::size_t block = static_cast<std::size_t>(0.010 * rate);
  if (filters_out != nullptr)
    filters_out->resize((n + block - 1) / block, 2 * std::size_t(n_pairs));
  std::vector<double> alpha;
  for (std::size_t i = 0; i < n; ++i) {
    if (i % block == 0) {
      for (auto& p : poles) {
        p.r = reflect_into(p.r + 0.004 * rng.normal(), bounds.r_lo, bounds.r_hi);
        p.theta =
            reflect_into(p.theta + 0.010 * rng.normal(), bounds.th_lo,
                         bounds.th_hi);
      }
      alpha = poles_to_alpha(poles);
      if (filters_out != nullptr)
        std::copy(alpha.begin(), alpha.end(), filters_out->row(i / block));
    }
    double acc = exc[i];
    for (std::size_t k = 0; k < alpha.size() && k < i; ++k)
      acc += alpha[k] * w.samples[i - 1 - k];
    w.samples[i] = acc;
  }

  double peak = 0.0;
  for (double x : w.samples) peak = std::max(peak, std::fabs(x));
  if (peak > 0.0) {
    const double g = 0.7 / peak;
    for (auto& x : w.samples) x *= g;
  }
  return w;
}

DatasetManifest synth_corpus(const CorpusSpec& spec, std::uint64_t seed,
                             const std::string& out_dir) {
  auto bad = validate_corpus_spec(spec);
  if (!bad.empty()) {
    std::string all;
    for (const auto& b : bad) all += (all.empty() ? "" : "; ") + b;
    fail("synth_corpus: " + all);
  }
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(out_dir) / "wav");

  DatasetManifest m;
  m.seed = seed;
  const int n_train = spec.n_utterances - spec.n_valid - spec.n_test;
  for (int i = 0; i < spec.n_utterances; ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "utt%04d", i);
    const std::string rel = std::string("wav/") + id + ".wav";
    const Waveform w = synth_utterance(spec, seed, i);
    write_wav(w, (fs::path(out_dir) / rel).string());
    const char* split = i < n_train ? "train"
                        : i < n_train + spec.n_valid ? "valid"
                                                     : "test";
    m.entries.push_back({id, rel, split});
  }
  write_manifest(m, (fs::path(out_dir) / "manifest.tsv").string());
  return m;
}

void write_manifest(const DatasetManifest& m, const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) fail("cannot write manifest: " + path);
  for (const auto& e : m.entries)
    f << e.id << '\t' << e.source << '\t' << e.split << '\n';
}

DatasetManifest read_manifest(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail("cannot read manifest: " + path);
  DatasetManifest m;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    ManifestEntry e;
    if (!std::getline(ss, e.id, '\t') || !std::getline(ss, e.source, '\t') ||
        !std::getline(ss, e.split))
      fail("manifest parse error at line " + std::to_string(lineno) + ": " +
           path);
    if (e.split != "train" && e.split != "valid" && e.split != "test")
      fail("manifest: unknown split '" + e.split + "' at line " +
           std::to_string(lineno));
    for (const auto& prev : m.entries)
      if (prev.id == e.id) fail("manifest: duplicate id '" + e.id + "'");
    m.entries.push_back(std::move(e));
  }
  return m;
}

}  // namespace mbg
