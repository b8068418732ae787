#include "mbg/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "mbg/config.hpp"
#include "mbg/container.hpp"
#include "mbg/corpus.hpp"
#include "mbg/evaluate.hpp"
#include "mbg/net/checkpoint.hpp"
#include "mbg/net/trainer.hpp"
#include "mbg/util.hpp"
#include "mbg/version.hpp"

namespace mbg::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CommonArgs {
  std::string config_path;
  std::string out_override;
  std::optional<std::uint64_t> seed_override;
};

ExperimentConfig load_config(const CommonArgs& args) {
  ExperimentConfig cfg = load_experiment_config(args.config_path);
  if (!args.out_override.empty()) cfg.out_dir = args.out_override;
  return cfg;
}

char hex_digit(unsigned v) { return "0123456789abcdef"[v & 0xf]; }

std::string hash_hex(std::uint64_t h) {
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[std::size_t(i)] = hex_digit(unsigned(h));
    h >>= 4;
  }
  return s;
}

// one record beside the stage outputs; content is fully deterministic
void write_provenance(const ExperimentConfig& cfg, const std::string& stage,
                      const json& detail) {
  json j;
  j["stage"] = stage;
  j["tool_version"] = kVersion;
  j["config_hash"] = hash_hex(cfg.config_hash());
  j["seeds"] = {{"corpus", cfg.seed_corpus},
                {"surrogate", cfg.seed_surrogate},
                {"train", cfg.seed_train},
                {"eval", cfg.seed_eval}};
  j["detail"] = detail;
  const fs::path path = fs::path(cfg.out_dir) / (stage + ".prov.json");
  std::ofstream f(path, std::ios::trunc);
  if (!f) fail("cannot write provenance record: " + path.string());
  f << j.dump(2) << "\n";
}

int cmd_corpus_gen(const CommonArgs& args) {
  ExperimentConfig cfg = load_config(args);
  const std::uint64_t seed = args.seed_override.value_or(cfg.seed_corpus);
  fs::create_directories(cfg.out_dir);
  const DatasetManifest m = synth_corpus(cfg.corpus, seed, cfg.out_dir);
  write_provenance(cfg, "corpus-gen",
                   {{"seed", seed},
                    {"utterances", m.entries.size()},
                    {"manifest", "manifest.tsv"}});
  std::cout << "corpus-gen: wrote " << m.entries.size()
            << " utterances under " << cfg.out_dir << "\n";
  return 0;
}

int cmd_analyze(const CommonArgs& args) {
  ExperimentConfig cfg = load_config(args);
  const fs::path manifest_path = fs::path(cfg.out_dir) / "manifest.tsv";
  if (!fs::exists(manifest_path))
    fail("analyze: missing input " + manifest_path.string() +
         " (run corpus-gen first)");
  const DatasetManifest m = read_manifest(manifest_path.string());
  SurrogateConfig surr = cfg.surrogate;
  surr.seed = args.seed_override.value_or(cfg.seed_surrogate);
  const FeatureContainer feats =
      build_features(m, cfg.out_dir, cfg.lp, cfg.f0, surr);
  const fs::path out = fs::path(cfg.out_dir) / "features.mbgf";
  save_container(feats, out.string());
  write_provenance(cfg, "analyze",
                   {{"seed", surr.seed},
                    {"container", "features.mbgf"},
                    {"utterances", feats.utts.size()}});
  std::cout << "analyze: wrote " << out.string() << "\n";
  return 0;
}

int cmd_train(const CommonArgs& args, const std::string& mode_str,
              const std::string& parent_path) {
  ExperimentConfig cfg = load_config(args);
  const net::TrainMode mode = net::mode_from_name(mode_str);
  if (mode == net::TrainMode::mbg_star && parent_path.empty())
    fail("train: --parent is required for mode mbg_star");
  if (mode != net::TrainMode::mbg_star && !parent_path.empty())
    fail("train: --parent is only accepted with mode mbg_star");

  const fs::path feat_path = fs::path(cfg.out_dir) / "features.mbgf";
  if (!fs::exists(feat_path))
    fail("train: missing input " + feat_path.string() + " (run analyze first)");
  const FeatureContainer feats = load_container(feat_path.string());

  net::TrainHyper hyper = cfg.train;
  hyper.seed = args.seed_override.value_or(cfg.seed_train);

  std::optional<net::Checkpoint> parent;
  if (!parent_path.empty()) parent = net::load_checkpoint(parent_path);

  const net::TrainResult result = net::train(
      mode, feats, cfg.net, hyper, parent ? &*parent : nullptr);

  const fs::path ckpt_path =
      fs::path(cfg.out_dir) / ("ckpt_" + mode_str + ".mbgv");
  net::Checkpoint ckpt = result.checkpoint;
  if (parent) ckpt.prov.parent = parent_path;
  net::save_checkpoint(ckpt, ckpt_path.string());
  const fs::path log_path =
      fs::path(cfg.out_dir) / ("nll_" + mode_str + ".csv");
  net::write_nll_log(result.log, log_path.string());
  write_provenance(cfg, "train-" + mode_str,
                   {{"seed", hyper.seed},
                    {"mode", mode_str},
                    {"steps", hyper.max_steps},
                    {"parent", parent_path},
                    {"checkpoint", ckpt_path.filename().string()},
                    {"nll_log", log_path.filename().string()}});
  std::cout << "train: wrote " << ckpt_path.string() << " and "
            << log_path.string() << "\n";
  return 0;
}

int cmd_synthesize(const CommonArgs& args, const std::string& system,
                   const std::string& utt) {
  ExperimentConfig cfg = load_config(args);
  const fs::path feat_path = fs::path(cfg.out_dir) / "features.mbgf";
  const fs::path ckpt_path =
      fs::path(cfg.out_dir) / ("ckpt_" + system + ".mbgv");
  if (!fs::exists(feat_path))
    fail("synthesize: missing input " + feat_path.string());
  if (!fs::exists(ckpt_path))
    fail("synthesize: missing checkpoint " + ckpt_path.string() +
         " (train --mode " + system + " first)");
  net::mode_from_name(system);  // validates the name

  const FeatureContainer feats = load_container(feat_path.string());
  const net::Checkpoint ckpt = net::load_checkpoint(ckpt_path.string());
  const UtteranceFeatures& u = feats.by_id(utt);
  const std::uint64_t seed = args.seed_override.value_or(cfg.seed_eval);

  const Waveform synth = synthesize_utterance(
      ckpt, u, feats, /*use_generated=*/false,
      derive_seed(seed, "synthesize-" + system + "-" + utt));
  fs::create_directories(fs::path(cfg.out_dir) / "synth");
  const fs::path out =
      fs::path(cfg.out_dir) / "synth" / (system + "_" + utt + ".wav");
  write_wav(synth, out.string());
  write_provenance(cfg, "synthesize-" + system + "-" + utt,
                   {{"seed", seed}, {"output", out.filename().string()}});
  std::cout << "synthesize: wrote " << out.string() << "\n";
  return 0;
}

int cmd_evaluate(const CommonArgs& args) {
  ExperimentConfig cfg = load_config(args);
  const fs::path feat_path = fs::path(cfg.out_dir) / "features.mbgf";
  if (!fs::exists(feat_path))
    fail("evaluate: missing input " + feat_path.string());
  const FeatureContainer feats = load_container(feat_path.string());

  std::map<std::string, net::Checkpoint> ckpts;
  for (const char* mode : {"plain", "g", "mbg", "mbg_star"}) {
    const fs::path p = fs::path(cfg.out_dir) / (std::string("ckpt_") + mode +
                                                ".mbgv");
    if (fs::exists(p)) ckpts.emplace(mode, net::load_checkpoint(p.string()));
  }
  if (ckpts.empty())
    fail("evaluate: no checkpoints found under " + cfg.out_dir);

  EvalConfig ev = cfg.eval;
  ev.seed = args.seed_override.value_or(cfg.seed_eval);
  const EvalReport report = evaluate_systems(feats, ckpts, cfg.out_dir, ev);
  fs::create_directories(fs::path(cfg.out_dir) / "report");
  const fs::path csv = fs::path(cfg.out_dir) / "report" / "eval.csv";
  const fs::path txt = fs::path(cfg.out_dir) / "report" / "eval.txt";
  write_report_csv(report, csv.string());
  write_report_text(report, txt.string());
  json present = json::array();
  for (const auto& [name, c] : ckpts) present.push_back(name);
  write_provenance(cfg, "evaluate",
                   {{"seed", ev.seed}, {"systems", present}});
  std::cout << "evaluate: wrote " << csv.string() << "\n";
  return 0;
}

int cmd_report(const CommonArgs& args) {
  ExperimentConfig cfg = load_config(args);
  std::map<std::string, std::vector<net::NllLogRow>> logs;
  for (const char* mode : {"plain", "g", "mbg", "mbg_star"}) {
    const fs::path p =
        fs::path(cfg.out_dir) / (std::string("nll_") + mode + ".csv");
    if (fs::exists(p)) logs.emplace(mode, net::read_nll_log(p.string()));
  }
  if (logs.empty())
    fail("report: no NLL logs found under " + cfg.out_dir);
  fs::create_directories(fs::path(cfg.out_dir) / "report");
  const fs::path csv = fs::path(cfg.out_dir) / "report" / "nll_curves.csv";
  const fs::path dat = fs::path(cfg.out_dir) / "report" / "nll_curves.dat";
  export_nll_curves(logs, csv.string(), dat.string());
  json present = json::array();
  for (const auto& [name, lg] : logs) present.push_back(name);
  write_provenance(cfg, "report", {{"modes", present}});
  std::cout << "report: wrote " << csv.string() << "\n";
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"modeling-by-generation excitation vocoder laboratory"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string mode, parent, system, utt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", args.config_path, "experiment config file")
        ->required();
    sub->add_option("--out", args.out_override,
                    "override [paths] out_dir from the config");
    sub->add_option("--seed", args.seed_override,
                    "override the stage seed from [seeds]");
  };

  CLI::App* gen = app.add_subcommand("corpus-gen",
                                     "generate the synthetic corpus");
  add_common(gen);
  CLI::App* ana = app.add_subcommand("analyze",
                                     "extract features into a container");
  add_common(ana);
  CLI::App* tr = app.add_subcommand("train", "train one vocoder system");
  add_common(tr);
  tr->add_option("--mode", mode, "plain|g|mbg|mbg_star")->required();
  tr->add_option("--parent", parent, "parent checkpoint (mbg_star)");
  CLI::App* syn = app.add_subcommand("synthesize",
                                     "synthesize one utterance");
  add_common(syn);
  syn->add_option("--system", system, "plain|g|mbg|mbg_star")->required();
  syn->add_option("--utt", utt, "utterance id from the manifest")->required();
  CLI::App* ev = app.add_subcommand("evaluate",
                                    "score all trained systems on the test split");
  add_common(ev);
  CLI::App* rep = app.add_subcommand("report", "export aligned NLL curves");
  add_common(rep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "error: cli: " << e.what() << "\n";
    return 2;
  }

  const std::string stage = app.get_subcommands().front()->get_name();
  try {
    if (gen->parsed()) return cmd_corpus_gen(args);
    if (ana->parsed()) return cmd_analyze(args);
    if (tr->parsed()) return cmd_train(args, mode, parent);
    if (syn->parsed()) return cmd_synthesize(args, system, utt);
    if (ev->parsed()) return cmd_evaluate(args);
    if (rep->parsed()) return cmd_report(args);
  } catch (const std::exception& e) {
    std::string msg = e.what();
    // keep each line machine-parsable
    std::size_t start = 0;
    while (start < msg.size()) {
      std::size_t end = msg.find('\n', start);
      if (end == std::string::npos) end = msg.size();
      if (end > start)
        std::cerr << "error: " << stage << ": " << msg.substr(start, end - start)
                  << "\n";
      start = end + 1;
    }
    return 1;
  }
  return 2;
}

}  // namespace mbg::cli
