#include "mbg/container.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "mbg/util.hpp"

static_assert(std::endian::native == std::endian::little,
              "container format is little-endian");

namespace mbg {

namespace {

constexpr char kMagic[4] = {'M', 'B', 'G', 'F'};
constexpr std::uint32_t kVersion = 1;

std::size_t ms_to_samples(double ms, int rate) {
  return static_cast<std::size_t>(ms * 1e-3 * double(rate) + 0.5);
}

// --- binary helpers -------------------------------------------------------

void put_bytes(std::string& out, const void* p, std::size_t n) {
  out.append(static_cast<const char*>(p), n);
}

template <typename U>
void put_pod(std::string& out, U v) {
  put_bytes(out, &v, sizeof v);
}

void put_str(std::string& out, const std::string& s) {
  put_pod<std::uint32_t>(out, std::uint32_t(s.size()));
  put_bytes(out, s.data(), s.size());
}

void put_f32s(std::string& out, const double* v, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) put_pod<float>(out, float(v[i]));
}

void put_f64s(std::string& out, const double* v, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) put_pod<double>(out, v[i]);
}

struct Reader {
  const std::string& buf;
  std::size_t pos = 0;
  const std::string& path;

  void need(std::size_t n) const {
    if (pos + n > buf.size()) fail("container truncated: " + path);
  }
  template <typename U>
  U pod() {
    need(sizeof(U));
    U v;
    std::memcpy(&v, buf.data() + pos, sizeof v);
    pos += sizeof v;
    return v;
  }
  std::string str() {
    const auto n = pod<std::uint32_t>();
    need(n);
    std::string s(buf.data() + pos, n);
    pos += n;
    return s;
  }
  void f32s(double* v, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) v[i] = double(pod<float>());
  }
  void f64s(double* v, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) v[i] = pod<double>();
  }
};

void put_mat_f32(std::string& out, const Mat<double>& m) {
  put_pod<std::uint64_t>(out, m.rows);
  put_pod<std::uint64_t>(out, m.cols);
  put_f32s(out, m.data.data(), m.data.size());
}

Mat<double> read_mat_f32(Reader& rd) {
  const auto rows = rd.pod<std::uint64_t>();
  const auto cols = rd.pod<std::uint64_t>();
  Mat<double> m(rows, cols);
  rd.f32s(m.data.data(), m.data.size());
  return m;
}

}  // namespace

std::vector<std::string> validate_lp_config(const LpConfig& cfg) {
  std::vector<std::string> bad;
  if (cfg.order < 1) bad.push_back("lp: order must be >= 1");
  if (cfg.frame_shift_ms <= 0.0) bad.push_back("lp: frame_shift_ms must be > 0");
  if (cfg.frame_length_ms < cfg.frame_shift_ms)
    bad.push_back("lp: frame_length_ms must be >= frame_shift_ms");
  if (cfg.floor_eps < 0.0) bad.push_back("lp: floor_eps must be >= 0");
  return bad;
}

std::vector<std::size_t> FeatureContainer::split_indices(
    const std::string& split) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < utts.size(); ++i)
    if (utts[i].split == split) out.push_back(i);
  return out;
}

const UtteranceFeatures& FeatureContainer::by_id(const std::string& id) const {
  for (const auto& u : utts)
    if (u.id == id) return u;
  fail("container: unknown utterance id '" + id + "'");
}

FeatureContainer build_features(const DatasetManifest& manifest,
                                const std::string& base_dir,
                                const LpConfig& lp, const F0Config& f0,
                                const SurrogateConfig& surrogate) {
  {
    auto bad = validate_lp_config(lp);
    if (!bad.empty()) fail("build_features: " + bad.front());
    bad = validate_surrogate_config(surrogate, lp.order);
    if (!bad.empty()) fail("build_features: " + bad.front());
    if (manifest.entries.empty()) fail("build_features: empty manifest");
  }

  namespace fs = std::filesystem;
  FeatureContainer c;
  c.lp = lp;
  c.f0 = f0;
  c.cond_dim = lp.order + 3;

  for (std::size_t idx = 0; idx < manifest.entries.size(); ++idx) {
    const auto& entry = manifest.entries[idx];
    try {
      UtteranceFeatures u;
      u.id = entry.id;
      u.wav_path = entry.source;
      u.split = entry.split;

      const Waveform wav = read_wav((fs::path(base_dir) / entry.source).string());
      if (c.sample_rate == 0)
        c.sample_rate = wav.sample_rate;
      else if (c.sample_rate != wav.sample_rate)
        fail("sample rate differs from the rest of the corpus");
      u.n_samples = wav.samples.size();

      u.grid = make_grid(wav.samples.size(),
                         ms_to_samples(lp.frame_shift_ms, wav.sample_rate),
                         ms_to_samples(lp.frame_length_ms, wav.sample_rate),
                         lp.window);
      if (lp.order >= u.grid.length)
        fail("LP order must be below the frame length");

      u.gt_coeff = analyze_lpc(wav, u.grid, lp.order, lp.floor_eps);
      u.gt_lsf = lpc_track_to_lsf(u.gt_coeff);

      SurrogateConfig per_utt = surrogate;
      per_utt.seed = derive_seed(surrogate.seed, "surrogate-utt", idx);
      u.gen_lsf = generate_lsf(u.gt_lsf, per_utt);
      u.gen_coeff = lsf_track_to_lpc(u.gen_lsf);

      const Mat<double> frames = frame_signal(wav, u.grid);
      u.energy = frame_energy(frames);
      const F0Result f0r = estimate_f0(wav, u.grid, f0);
      u.f0_hz = f0r.f0_hz;
      u.vuv = f0r.vuv;

      u.cond_gt = assemble_conditions(u.gt_lsf, u.f0_hz, u.energy, u.vuv,
                                      f0.f0_min_hz, f0.f0_max_hz);
      u.cond_gen = assemble_conditions(u.gen_lsf, u.f0_hz, u.energy, u.vuv,
                                       f0.f0_min_hz, f0.f0_max_hz);

      u.exc_plain = extract_plain(wav, u.gt_coeff, u.grid);
      u.exc_mbg = extract_mbg(wav, u.gen_coeff, u.grid);
      const ExcitationTrack inter =
          intermediate_prediction(wav, u.gt_coeff, u.gen_coeff, u.grid);
      double worst = 0.0;
      for (std::size_t n = 0; n < u.n_samples; ++n)
        worst = std::max(worst, std::fabs(u.exc_mbg.raw[n] -
                                          u.exc_plain.raw[n] - inter.raw[n]));
      u.residual_check = worst;
      if (worst > 1e-10)
        fail("residual decomposition check failed (max " +
             std::to_string(worst) + ")");

      normalize(u.exc_plain);
      attach_symbols(u.exc_plain);
      normalize(u.exc_mbg);
      attach_symbols(u.exc_mbg);

      c.utts.push_back(std::move(u));
    } catch (const std::exception& e) {
      fail("build_features[" + entry.id + "]: " + e.what());
    }
  }

  const auto train = c.split_indices("train");
  if (train.empty()) fail("build_features: no training utterances");
  std::vector<const ConditionTrack*> gt_tracks, gen_tracks;
  for (std::size_t i : train) {
    gt_tracks.push_back(&c.utts[i].cond_gt);
    gen_tracks.push_back(&c.utts[i].cond_gen);
  }
  c.stats_gt = compute_norm_stats(gt_tracks);
  c.stats_gen = compute_norm_stats(gen_tracks);
  for (auto& u : c.utts) {
    normalize_conditions(u.cond_gt, c.stats_gt);
    normalize_conditions(u.cond_gen, c.stats_gen);
  }
  return c;
}

void save_container(const FeatureContainer& c, const std::string& path) {
  std::string out;
  put_bytes(out, kMagic, 4);
  put_pod<std::uint32_t>(out, kVersion);
  put_pod<std::uint32_t>(out, std::uint32_t(c.sample_rate));
  put_pod<std::uint64_t>(out, c.lp.order);
  put_pod<double>(out, c.lp.frame_shift_ms);
  put_pod<double>(out, c.lp.frame_length_ms);
  put_pod<std::uint8_t>(out, c.lp.window == WindowKind::hann ? 0 : 1);
  put_pod<double>(out, c.lp.floor_eps);
  put_pod<double>(out, c.f0.f0_min_hz);
  put_pod<double>(out, c.f0.f0_max_hz);
  put_pod<double>(out, c.f0.voicing_threshold);
  put_pod<double>(out, c.f0.silence_floor);
  put_pod<std::uint64_t>(out, c.cond_dim);
  put_f64s(out, c.stats_gt.mean.data(), c.cond_dim);
  put_f64s(out, c.stats_gt.stddev.data(), c.cond_dim);
  put_f64s(out, c.stats_gen.mean.data(), c.cond_dim);
  put_f64s(out, c.stats_gen.stddev.data(), c.cond_dim);
  put_pod<std::uint32_t>(out, std::uint32_t(c.utts.size()));

  for (const auto& u : c.utts) {
    std::string rec;
    put_str(rec, u.id);
    put_str(rec, u.wav_path);
    put_str(rec, u.split);
    put_pod<std::uint64_t>(rec, u.n_samples);
    put_pod<std::uint64_t>(rec, u.grid.shift);
    put_pod<std::uint64_t>(rec, u.grid.length);
    put_pod<std::uint64_t>(rec, u.grid.n_frames);
    put_pod<std::uint8_t>(rec, u.grid.window == WindowKind::hann ? 0 : 1);

    put_mat_f32(rec, u.gt_lsf.freqs);
    put_mat_f32(rec, u.gen_lsf.freqs);
    put_mat_f32(rec, u.gt_coeff.coeffs);
    put_mat_f32(rec, u.gen_coeff.coeffs);
    for (std::size_t i = 0; i < u.grid.n_frames; ++i)
      put_pod<std::uint8_t>(rec, u.gt_coeff.silent[i] ? 1 : 0);

    put_mat_f32(rec, u.cond_gt.values);
    put_mat_f32(rec, u.cond_gen.values);

    put_f32s(rec, u.f0_hz.data(), u.f0_hz.size());
    put_f32s(rec, u.energy.data(), u.energy.size());
    for (int v : u.vuv) put_pod<std::uint8_t>(rec, std::uint8_t(v));

    for (const ExcitationTrack* e : {&u.exc_plain, &u.exc_mbg}) {
      put_pod<double>(rec, e->gain);
      put_f32s(rec, e->raw.data(), e->raw.size());
      put_bytes(rec, e->symbols->data(), e->symbols->size());
    }
    put_pod<double>(rec, u.residual_check);

    put_pod<std::uint64_t>(out, rec.size());
    out += rec;
  }

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail("cannot open container for writing: " + path);
  f.write(out.data(), std::streamsize(out.size()));
  if (!f) fail("container write failed: " + path);
}

FeatureContainer load_container(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail("cannot open container: " + path);
  std::string buf((std::istreambuf_iterator<char>(f)),
                  std::istreambuf_iterator<char>());
  Reader rd{buf, 0, path};

  char magic[4];
  rd.need(4);
  std::memcpy(magic, buf.data(), 4);
  rd.pos = 4;
  if (std::memcmp(magic, kMagic, 4) != 0)
    fail("not a feature container (bad magic): " + path);
  if (rd.pod<std::uint32_t>() != kVersion)
    fail("unsupported container version: " + path);

  FeatureContainer c;
  c.sample_rate = int(rd.pod<std::uint32_t>());
  c.lp.order = rd.pod<std::uint64_t>();
  c.lp.frame_shift_ms = rd.pod<double>();
  c.lp.frame_length_ms = rd.pod<double>();
  c.lp.window = rd.pod<std::uint8_t>() == 0 ? WindowKind::hann
                                            : WindowKind::rectangular;
  c.lp.floor_eps = rd.pod<double>();
  c.f0.f0_min_hz = rd.pod<double>();
  c.f0.f0_max_hz = rd.pod<double>();
  c.f0.voicing_threshold = rd.pod<double>();
  c.f0.silence_floor = rd.pod<double>();
  c.cond_dim = rd.pod<std::uint64_t>();
  c.stats_gt.mean.resize(c.cond_dim);
  c.stats_gt.stddev.resize(c.cond_dim);
  c.stats_gen.mean.resize(c.cond_dim);
  c.stats_gen.stddev.resize(c.cond_dim);
  rd.f64s(c.stats_gt.mean.data(), c.cond_dim);
  rd.f64s(c.stats_gt.stddev.data(), c.cond_dim);
  rd.f64s(c.stats_gen.mean.data(), c.cond_dim);
  rd.f64s(c.stats_gen.stddev.data(), c.cond_dim);
  const auto n_utts = rd.pod<std::uint32_t>();

  for (std::uint32_t ui = 0; ui < n_utts; ++ui) {
    const auto rec_len = rd.pod<std::uint64_t>();
    const std::size_t rec_end = rd.pos + rec_len;
    UtteranceFeatures u;
    u.id = rd.str();
    u.wav_path = rd.str();
    u.split = rd.str();
    u.n_samples = rd.pod<std::uint64_t>();
    u.grid.shift = rd.pod<std::uint64_t>();
    u.grid.length = rd.pod<std::uint64_t>();
    u.grid.n_frames = rd.pod<std::uint64_t>();
    u.grid.window = rd.pod<std::uint8_t>() == 0 ? WindowKind::hann
                                                : WindowKind::rectangular;

    u.gt_lsf.freqs = read_mat_f32(rd);
    u.gt_lsf.order = c.lp.order;
    u.gen_lsf.freqs = read_mat_f32(rd);
    u.gen_lsf.order = c.lp.order;
    u.gen_lsf.source = CoeffSource::generated;
    u.gt_coeff.coeffs = read_mat_f32(rd);
    u.gt_coeff.order = c.lp.order;
    u.gen_coeff.coeffs = read_mat_f32(rd);
    u.gen_coeff.order = c.lp.order;
    u.gen_coeff.source = CoeffSource::generated;
    u.gt_coeff.silent.resize(u.grid.n_frames);
    u.gen_coeff.silent.assign(u.grid.n_frames, false);
    for (std::size_t i = 0; i < u.grid.n_frames; ++i)
      u.gt_coeff.silent[i] = rd.pod<std::uint8_t>() != 0;

    u.cond_gt.values = read_mat_f32(rd);
    u.cond_gen.values = read_mat_f32(rd);
    for (ConditionTrack* t : {&u.cond_gt, &u.cond_gen}) {
      t->n_frames = u.grid.n_frames;
      t->dim = c.cond_dim;
      t->normalized = true;
    }
    u.cond_gt.stats = c.stats_gt;
    u.cond_gen.stats = c.stats_gen;

    u.f0_hz.resize(u.grid.n_frames);
    rd.f32s(u.f0_hz.data(), u.grid.n_frames);
    u.energy.resize(u.grid.n_frames);
    rd.f32s(u.energy.data(), u.grid.n_frames);
    u.vuv.resize(u.grid.n_frames);
    for (auto& v : u.vuv) v = rd.pod<std::uint8_t>();

    for (ExcitationTrack* e : {&u.exc_plain, &u.exc_mbg}) {
      e->gain = rd.pod<double>();
      e->raw.resize(u.n_samples);
      rd.f32s(e->raw.data(), u.n_samples);
      std::vector<std::uint8_t> sym(u.n_samples);
      rd.need(u.n_samples);
      std::memcpy(sym.data(), buf.data() + rd.pos, u.n_samples);
      rd.pos += u.n_samples;
      e->symbols = std::move(sym);
      e->normalized = true;
    }
    u.exc_plain.kind = ExcitationKind::plain;
    u.exc_mbg.kind = ExcitationKind::mbg;
    u.residual_check = rd.pod<double>();
    if (rd.pos != rec_end) fail("container record length mismatch: " + path);
    c.utts.push_back(std::move(u));
  }
  return c;
}

}  // namespace mbg
