#include "mbg/net/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mbg/mulaw.hpp"
#include "mbg/net/adam.hpp"
#include "mbg/net/sampler.hpp"
#include "mbg/util.hpp"

namespace mbg::net {

std::string mode_name(TrainMode mode) {
  switch (mode) {
    case TrainMode::plain: return "plain";
    case TrainMode::g: return "g";
    case TrainMode::mbg: return "mbg";
    case TrainMode::mbg_star: return "mbg_star";
  }
  fail("mode_name: bad mode");
}

TrainMode mode_from_name(const std::string& name) {
  if (name == "plain") return TrainMode::plain;
  if (name == "g") return TrainMode::g;
  if (name == "mbg") return TrainMode::mbg;
  if (name == "mbg_star") return TrainMode::mbg_star;
  fail("unknown mode '" + name + "' (expected plain|g|mbg|mbg_star)");
}

std::vector<std::string> validate_train_hyper(const TrainHyper& hyper) {
  std::vector<std::string> bad;
  if (hyper.learning_rate <= 0.0) bad.push_back("train: learning_rate must be > 0");
  if (hyper.batch_samples < 1) bad.push_back("train: batch_samples must be >= 1");
  if (hyper.batches_per_epoch < 1)
    bad.push_back("train: batches_per_epoch must be >= 1");
  if (hyper.max_steps < 1) bad.push_back("train: max_steps must be >= 1");
  if (hyper.beta1 <= 0.0 || hyper.beta1 >= 1.0) bad.push_back("train: beta1 in (0,1)");
  if (hyper.beta2 <= 0.0 || hyper.beta2 >= 1.0) bad.push_back("train: beta2 in (0,1)");
  if (hyper.eps <= 0.0) bad.push_back("train: eps must be > 0");
  return bad;
}

namespace {

bool uses_generated_conditions(TrainMode mode) {
  return mode != TrainMode::plain;
}

bool uses_closed_loop_targets(TrainMode mode) {
  return mode == TrainMode::mbg || mode == TrainMode::mbg_star;
}

const ConditionTrack& conditions_for(const UtteranceFeatures& u,
                                     TrainMode mode) {
  return uses_generated_conditions(mode) ? u.cond_gen : u.cond_gt;
}

const ExcitationTrack& targets_for(const UtteranceFeatures& u,
                                   TrainMode mode) {
  return uses_closed_loop_targets(mode) ? u.exc_mbg : u.exc_plain;
}

void check_mode_data(const FeatureContainer& feats, TrainMode mode) {
  for (const auto& u : feats.utts) {
    const auto& exc = targets_for(u, mode);
    if (!exc.symbols.has_value() || exc.symbols->size() != u.n_samples)
      fail("mode " + mode_name(mode) + " needs " +
           (uses_closed_loop_targets(mode) ? std::string("closed-loop")
                                           : std::string("plain")) +
           " excitation symbols, missing for utterance '" + u.id + "'");
    const auto& cond = conditions_for(u, mode);
    if (cond.values.empty() || cond.n_frames != u.grid.n_frames)
      fail("mode " + mode_name(mode) + " needs " +
           (uses_generated_conditions(mode) ? std::string("generated")
                                            : std::string("ground-truth")) +
           " condition tracks, missing for utterance '" + u.id + "'");
  }
}

// fills ws.input / ws.cond / ws.targets for absolute positions
// [start, start+len) with rf positions of warm-up context ahead of them
void build_crop(Workspace<float>& ws, const UtteranceFeatures& u,
                TrainMode mode, std::size_t start, std::size_t len,
                std::size_t rf, std::size_t cond_dim) {
  const auto& sym = *targets_for(u, mode).symbols;
  const auto& cond = conditions_for(u, mode);
  const std::size_t total = rf + len;
  ws.input.resize(total);
  ws.targets.resize(total);
  if (ws.cond.rows != cond_dim || ws.cond.cols != total)
    ws.cond.resize(cond_dim, total);
  for (std::size_t j = 0; j < total; ++j) {
    const std::ptrdiff_t q =
        std::ptrdiff_t(start) - std::ptrdiff_t(rf) + std::ptrdiff_t(j);
    ws.input[j] = (q >= 1) ? float(mulaw_bin_center(sym[std::size_t(q) - 1]))
                           : 0.0f;
    const std::size_t frame =
        q >= 0 ? u.grid.frame_of(std::size_t(q)) : std::size_t(0);
    const double* row = cond.values.row(frame);
    for (std::size_t d = 0; d < cond_dim; ++d)
      ws.cond.at(d, j) = float(row[d]);
    ws.targets[j] =
        j >= rf ? std::int32_t(sym[std::size_t(q)]) : std::int32_t(-1);
  }
}

}  // namespace

double evaluate_nll(const Network<float>& net, const FeatureContainer& feats,
                    TrainMode mode, const std::string& split) {
  const auto idx = feats.split_indices(split);
  if (idx.empty()) fail("evaluate_nll: split '" + split + "' is empty");
  const std::size_t rf = std::size_t(receptive_field(net.config()));
  const std::size_t chunk = 8192;
  Workspace<float> ws = net.make_workspace();
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t i : idx) {
    const auto& u = feats.utts[i];
    for (std::size_t a = 0; a < u.n_samples; a += chunk) {
      const std::size_t b = std::min(u.n_samples, a + chunk);
      build_crop(ws, u, mode, a, b - a, rf, feats.cond_dim);
      net.forward(ws, rf + (b - a));
      total += net.loss(ws) * double(b - a);
      count += b - a;
    }
  }
  return total / double(count);
}

TrainResult train(TrainMode mode, const FeatureContainer& feats,
                  const NetConfig& cfg, const TrainHyper& hyper,
                  const Checkpoint* parent) {
  {
    auto bad = validate_net_config(cfg);
    const auto more = validate_train_hyper(hyper);
    bad.insert(bad.end(), more.begin(), more.end());
    if (!bad.empty()) fail("train: " + bad.front());
  }
  if (feats.cond_dim != std::size_t(cfg.condition_dim))
    fail("train: container condition dim " + std::to_string(feats.cond_dim) +
         " does not match net condition dim " +
         std::to_string(cfg.condition_dim));
  check_mode_data(feats, mode);

  if (mode == TrainMode::mbg_star) {
    if (parent == nullptr)
      fail("train: mode mbg_star requires a parent checkpoint");
    if (parent->prov.mode != "plain")
      fail("train: mbg_star parent must be a plain checkpoint (got '" +
           parent->prov.mode + "')");
    if (!(parent->config == cfg))
      fail("train: parent checkpoint configuration mismatch");
  } else if (parent != nullptr) {
    fail("train: parent checkpoint is only used by mode mbg_star");
  }

  const auto train_idx = feats.split_indices("train");
  if (train_idx.empty()) fail("train: no training utterances");
  const bool has_valid = !feats.split_indices("valid").empty();

  ParamSet<float> params =
      parent ? parent->params
             : init_params<float>(cfg, derive_seed(hyper.seed, "init"));
  Network<float> net(cfg, std::move(params));
  AdamState<float> adam = make_adam_state<float>(cfg);
  AdamHyper ah{hyper.learning_rate, hyper.beta1, hyper.beta2, hyper.eps,
               hyper.grad_clip_norm};
  Workspace<float> ws = net.make_workspace();
  const std::size_t rf = std::size_t(receptive_field(cfg));

  RngStream rng(derive_seed(hyper.seed, "train-" + mode_name(mode)));
  TrainResult result;
  double last_valid = 0.0;
  bool have_valid_nll = false;

  for (int step = 1; step <= hyper.max_steps; ++step) {
    const auto& u = feats.utts[train_idx[rng.uniform_int(train_idx.size())]];
    const std::size_t len = std::min<std::size_t>(hyper.batch_samples,
                                                  u.n_samples);
    const std::size_t start =
        u.n_samples > len ? rng.uniform_int(u.n_samples - len + 1) : 0;
    build_crop(ws, u, mode, start, len, rf, feats.cond_dim);
    net.forward(ws, rf + len);
    const double nll = net.loss(ws);
    result.log.push_back({step, "train", nll});
    ws.grads.zero();
    net.backward(ws);
    clip_gradients(ws.grads, hyper.grad_clip_norm);
    adam_step(net.params(), ws.grads, adam, ah);

    if (has_valid &&
        (step % hyper.batches_per_epoch == 0 || step == hyper.max_steps)) {
      last_valid = evaluate_nll(net, feats, mode, "valid");
      have_valid_nll = true;
      result.log.push_back({step, "valid", last_valid});
    }
  }

  result.checkpoint.config = cfg;
  result.checkpoint.params = net.params();
  result.checkpoint.adam = std::move(adam);
  result.checkpoint.prov.mode = mode_name(mode);
  result.checkpoint.prov.seed = hyper.seed;
  result.checkpoint.prov.condition_source =
      uses_generated_conditions(mode) ? "generated" : "ground_truth";
  result.checkpoint.prov.train_steps = hyper.max_steps;
  if (have_valid_nll) {
    result.checkpoint.prov.final_valid_nll = last_valid;
    result.checkpoint.prov.has_final_valid_nll = true;
  }
  return result;
}

void write_nll_log(const std::vector<NllLogRow>& log,
                   const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) fail("cannot write NLL log: " + path);
  f << "step,split,nll\n";
  char buf[64];
  for (const auto& row : log) {
    std::snprintf(buf, sizeof buf, "%d,%s,%.9f\n", row.step,
                  row.split.c_str(), row.nll);
    f << buf;
  }
}

std::vector<NllLogRow> read_nll_log(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail("cannot read NLL log: " + path);
  std::vector<NllLogRow> out;
  std::string line;
  if (!std::getline(f, line) || line != "step,split,nll")
    fail("NLL log header mismatch: " + path);
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string step_s, split, nll_s;
    if (!std::getline(ss, step_s, ',') || !std::getline(ss, split, ',') ||
        !std::getline(ss, nll_s))
      fail("NLL log parse error: " + path);
    out.push_back({std::stoi(step_s), split, std::stod(nll_s)});
  }
  return out;
}

}  // namespace mbg::net
