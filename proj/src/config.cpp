#include "mbg/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "mbg/util.hpp"

namespace mbg {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

struct IniData {
  // section -> key -> value
  std::map<std::string, std::map<std::string, std::string>> values;
  std::vector<std::string> errors;
};

IniData parse_ini(const std::string& text, const std::string& origin) {
  IniData ini;
  std::istringstream ss(text);
  std::string line, section;
  std::size_t lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') {
        ini.errors.push_back(origin + ":" + std::to_string(lineno) +
                             ": unterminated section header");
        continue;
      }
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      ini.errors.push_back(origin + ":" + std::to_string(lineno) +
                           ": expected key = value");
      continue;
    }
    ini.values[section][trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
  }
  return ini;
}

class Binder {
 public:
  Binder(const IniData& ini, std::vector<std::string>& errors)
      : ini_(ini), errors_(errors) {}

  std::string str(const std::string& sec, const std::string& key,
                  const std::string& fallback) {
    const std::string* v = find(sec, key);
    return v ? *v : fallback;
  }

  template <typename T>
  void number(const std::string& sec, const std::string& key, T& out) {
    const std::string* v = find(sec, key);
    if (!v) return;
    std::istringstream ss(*v);
    T parsed{};
    ss >> parsed;
    if (ss.fail() || !trim_rest_empty(ss)) {
      errors_.push_back("config: [" + sec + "] " + key +
                        " is not a valid number: '" + *v + "'");
      return;
    }
    out = parsed;
  }

  // reports any key that no stage consumed (catches typos)
  void finish_unknown_check() {
    for (const auto& [sec, kv] : ini_.values)
      for (const auto& [key, value] : kv)
        if (!consumed_.count(sec + "\n" + key))
          errors_.push_back("config: unknown key [" + sec + "] " + key);
  }

 private:
  const std::string* find(const std::string& sec, const std::string& key) {
    consumed_.insert(sec + "\n" + key);
    const auto s = ini_.values.find(sec);
    if (s == ini_.values.end()) return nullptr;
    const auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
  }

  static bool trim_rest_empty(std::istringstream& ss) {
    std::string rest;
    ss >> rest;
    return rest.empty();
  }

  const IniData& ini_;
  std::vector<std::string>& errors_;
  std::set<std::string> consumed_;
};

}  // namespace

std::uint64_t ExperimentConfig::config_hash() const {
  return fnv1a64(source_text);
}

ExperimentConfig parse_experiment_config(const std::string& text,
                                         const std::string& origin) {
  ExperimentConfig cfg;
  cfg.source_text = text;

  std::vector<std::string> errors;
  IniData ini = parse_ini(text, origin);
  errors = ini.errors;
  Binder bind(ini, errors);

  cfg.out_dir = bind.str("paths", "out_dir", "");

  bind.number("corpus", "utterances", cfg.corpus.n_utterances);
  bind.number("corpus", "dur_min_s", cfg.corpus.dur_min_s);
  bind.number("corpus", "dur_max_s", cfg.corpus.dur_max_s);
  bind.number("corpus", "sample_rate", cfg.corpus.sample_rate);
  bind.number("corpus", "p_gen", cfg.corpus.p_gen);
  bind.number("corpus", "n_valid", cfg.corpus.n_valid);
  bind.number("corpus", "n_test", cfg.corpus.n_test);
  bind.number("corpus", "fixed_f0_hz", cfg.corpus.fixed_f0_hz);
  const std::string mode = bind.str("corpus", "mode", "normal");
  if (mode == "normal")
    cfg.corpus.mode = CorpusMode::normal;
  else if (mode == "noise_only")
    cfg.corpus.mode = CorpusMode::noise_only;
  else if (mode == "pulse_only")
    cfg.corpus.mode = CorpusMode::pulse_only;
  else
    errors.push_back("config: [corpus] mode must be normal|noise_only|pulse_only");

  std::int64_t order = std::int64_t(cfg.lp.order);
  bind.number("lp", "order", order);
  if (order < 1)
    errors.push_back("config: [lp] order must be >= 1");
  else
    cfg.lp.order = std::size_t(order);
  bind.number("lp", "frame_shift_ms", cfg.lp.frame_shift_ms);
  bind.number("lp", "frame_length_ms", cfg.lp.frame_length_ms);
  bind.number("lp", "floor_eps", cfg.lp.floor_eps);
  const std::string window = bind.str("lp", "window", "hann");
  if (window == "hann")
    cfg.lp.window = WindowKind::hann;
  else if (window == "rectangular")
    cfg.lp.window = WindowKind::rectangular;
  else
    errors.push_back("config: [lp] window must be hann|rectangular");

  bind.number("f0", "min_hz", cfg.f0.f0_min_hz);
  bind.number("f0", "max_hz", cfg.f0.f0_max_hz);
  bind.number("f0", "voicing_threshold", cfg.f0.voicing_threshold);
  bind.number("f0", "silence_floor", cfg.f0.silence_floor);

  bind.number("surrogate", "smooth_frames", cfg.surrogate.smooth_frames);
  bind.number("surrogate", "noise_std_rad", cfg.surrogate.noise_std_rad);
  bind.number("surrogate", "min_gap_rad", cfg.surrogate.min_gap_rad);

  bind.number("net", "blocks", cfg.net.n_blocks);
  bind.number("net", "layers_per_block", cfg.net.layers_per_block);
  bind.number("net", "residual_channels", cfg.net.residual_channels);
  bind.number("net", "skip_channels", cfg.net.skip_channels);

  bind.number("train", "learning_rate", cfg.train.learning_rate);
  std::int64_t batch = std::int64_t(cfg.train.batch_samples);
  bind.number("train", "batch_samples", batch);
  if (batch < 1)
    errors.push_back("config: [train] batch_samples must be >= 1");
  else
    cfg.train.batch_samples = std::size_t(batch);
  bind.number("train", "batches_per_epoch", cfg.train.batches_per_epoch);
  bind.number("train", "max_steps", cfg.train.max_steps);
  bind.number("train", "adam_beta1", cfg.train.beta1);
  bind.number("train", "adam_beta2", cfg.train.beta2);
  bind.number("train", "adam_eps", cfg.train.eps);
  bind.number("train", "grad_clip_norm", cfg.train.grad_clip_norm);

  std::int64_t fft = std::int64_t(cfg.eval.lsd.fft);
  std::int64_t hop = std::int64_t(cfg.eval.lsd.hop);
  std::int64_t seg = std::int64_t(cfg.eval.segsnr_frame);
  bind.number("eval", "lsd_fft", fft);
  bind.number("eval", "lsd_hop", hop);
  bind.number("eval", "segsnr_frame", seg);
  if (fft < 2 || (fft & (fft - 1)) != 0)
    errors.push_back("config: [eval] lsd_fft must be a power of two >= 2");
  else
    cfg.eval.lsd.fft = std::size_t(fft);
  if (hop < 1)
    errors.push_back("config: [eval] lsd_hop must be >= 1");
  else
    cfg.eval.lsd.hop = std::size_t(hop);
  if (seg < 1)
    errors.push_back("config: [eval] segsnr_frame must be >= 1");
  else
    cfg.eval.segsnr_frame = std::size_t(seg);

  bind.number("seeds", "corpus", cfg.seed_corpus);
  bind.number("seeds", "surrogate", cfg.seed_surrogate);
  bind.number("seeds", "train", cfg.seed_train);
  bind.number("seeds", "eval", cfg.seed_eval);
  bind.finish_unknown_check();

  // derived values and cross-module preconditions
  cfg.surrogate.seed = cfg.seed_surrogate;
  cfg.train.seed = cfg.seed_train;
  cfg.eval.seed = cfg.seed_eval;
  cfg.net.condition_dim = int(cfg.lp.order) + 3;

  if (cfg.out_dir.empty())
    errors.push_back("config: [paths] out_dir is required");
  for (const auto& e : validate_corpus_spec(cfg.corpus)) errors.push_back("config: " + e);
  for (const auto& e : validate_lp_config(cfg.lp)) errors.push_back("config: " + e);
  for (const auto& e : validate_surrogate_config(cfg.surrogate, cfg.lp.order))
    errors.push_back("config: " + e);
  for (const auto& e : net::validate_net_config(cfg.net)) errors.push_back("config: " + e);
  for (const auto& e : net::validate_train_hyper(cfg.train)) errors.push_back("config: " + e);
  if (!(cfg.f0.f0_min_hz < cfg.f0.f0_max_hz &&
        cfg.f0.f0_max_hz < 0.5 * cfg.corpus.sample_rate))
    errors.push_back("config: f0 band must satisfy min < max < sample_rate/2");
  const double shift = cfg.lp.frame_shift_ms * 1e-3 * cfg.corpus.sample_rate;
  if (shift < 1.0)
    errors.push_back("config: frame shift is below one sample at this rate");
  const double length = cfg.lp.frame_length_ms * 1e-3 * cfg.corpus.sample_rate;
  if (double(cfg.lp.order) >= length)
    errors.push_back("config: lp order must be below the frame length in samples");

  if (!errors.empty()) {
    std::string all;
    for (const auto& e : errors) all += e + "\n";
    fail("invalid configuration:\n" + all);
  }
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail("cannot read config file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_experiment_config(ss.str(), path);
}

}  // namespace mbg
