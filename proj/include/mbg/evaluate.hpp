#pragma once
// System comparison over the test split: every system synthesizes under the
// generated conditions and the generated synthesis filter (the deployment
// scenario where only the front-end's outputs exist), and the result is
// scored against the ground-truth waveform.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mbg/container.hpp"
#include "mbg/metrics.hpp"
#include "mbg/net/checkpoint.hpp"
#include "mbg/net/trainer.hpp"

namespace mbg {

struct EvalConfig {
  LsdConfig lsd;
  std::size_t segsnr_frame = 240;
  std::uint64_t seed = 0;
};

struct UtteranceScore {
  std::string utt_id;
  double lsd_db = 0.0;
  double segsnr_db = 0.0;
};

struct SystemEval {
  std::string system;  // plain | g | mbg | mbg_star
  bool present = false;
  std::optional<double> final_valid_nll;
  std::vector<UtteranceScore> scores;  // one per test utterance
  double median_lsd_db = 0.0;
  double median_segsnr_db = 0.0;
};

struct PairDelta {
  std::string a, b;                   // delta = metric(a) - metric(b)
  std::vector<double> lsd_delta_db;   // per utterance
  std::vector<double> segsnr_delta_db;
  double median_lsd_delta_db = 0.0;
};

struct EvalReport {
  std::vector<std::string> utt_ids;       // test split order
  std::vector<double> silence_lsd_db;     // silence baseline per utterance
  std::vector<SystemEval> systems;        // fixed order: plain, g, mbg, mbg_star
  std::vector<PairDelta> deltas;          // each generated system vs plain
};

// Synthesizes one utterance with one system's checkpoint: sample symbols
// under the chosen conditions, expand, apply the stored gain, run the
// synthesis filter. use_generated selects the deployment path (generated
// conditions and filter); otherwise the system's native training sources.
Waveform synthesize_utterance(const net::Checkpoint& ckpt,
                              const UtteranceFeatures& u,
                              const FeatureContainer& feats,
                              bool use_generated, std::uint64_t seed);

// checkpoints: mode name -> checkpoint; missing systems yield absent rows.
EvalReport evaluate_systems(
    const FeatureContainer& feats,
    const std::map<std::string, net::Checkpoint>& checkpoints,
    const std::string& base_dir, const EvalConfig& cfg);

void write_report_csv(const EvalReport& report, const std::string& path);
void write_report_text(const EvalReport& report, const std::string& path);

// Aligns the per-step NLL columns of several training logs. Column order is
// fixed: for each mode in (plain, g, mbg, mbg_star) that is present, a
// train column then a valid column. Steps without a value stay empty in the
// CSV and are written as nan in the gnuplot data file.
void export_nll_curves(
    const std::map<std::string, std::vector<net::NllLogRow>>& logs,
    const std::string& csv_path, const std::string& dat_path);

}  // namespace mbg
