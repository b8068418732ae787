#include "mbg/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "mbg/lpfilter.hpp"
#include "mbg/mulaw.hpp"
#include "mbg/net/network.hpp"
#include "mbg/net/sampler.hpp"
#include "mbg/util.hpp"

namespace mbg {

namespace {

const char* kSystemOrder[] = {"plain", "g", "mbg", "mbg_star"};

double median(std::vector<double> v) {
  if (v.empty()) fail("median: empty");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

Waveform synthesize_utterance(const net::Checkpoint& ckpt,
                              const UtteranceFeatures& u,
                              const FeatureContainer& feats,
                              bool use_generated, std::uint64_t seed) {
  const bool closed_loop =
      ckpt.prov.mode == "mbg" || ckpt.prov.mode == "mbg_star";
  const bool generated_side = use_generated || ckpt.prov.mode != "plain";

  const ConditionTrack& cond = generated_side ? u.cond_gen : u.cond_gt;
  const CoeffTrack& filt = generated_side ? u.gen_coeff : u.gt_coeff;
  const double gain = closed_loop ? u.exc_mbg.gain : u.exc_plain.gain;

  if (feats.cond_dim != std::size_t(ckpt.config.condition_dim))
    fail("synthesize: checkpoint condition dim mismatch");

  net::Network<float> netw(ckpt.config, ckpt.params);
  const Mat<double> rows = upsample_conditions(cond, u.grid, u.n_samples);
  const auto symbols = net::sample_symbols(netw, rows, seed);

  std::vector<double> exc = mulaw_decode(symbols);
  for (auto& e : exc) e *= gain;
  return lp_synthesis_filter(exc, filt, u.grid, feats.sample_rate);
}

EvalReport evaluate_systems(
    const FeatureContainer& feats,
    const std::map<std::string, net::Checkpoint>& checkpoints,
    const std::string& base_dir, const EvalConfig& cfg) {
  namespace fs = std::filesystem;
  const auto test_idx = feats.split_indices("test");
  if (test_idx.empty()) fail("evaluate_systems: test split is empty");

  EvalReport report;
  std::vector<Waveform> references;
  for (std::size_t i : test_idx) {
    const auto& u = feats.utts[i];
    report.utt_ids.push_back(u.id);
    references.push_back(
        read_wav((fs::path(base_dir) / u.wav_path).string()));
    const std::vector<double> silence(references.back().samples.size(), 0.0);
    report.silence_lsd_db.push_back(log_spectral_distortion(
        references.back().samples, silence, cfg.lsd));
  }

  for (const char* system : kSystemOrder) {
    SystemEval ev;
    ev.system = system;
    const auto it = checkpoints.find(system);
    if (it == checkpoints.end()) {
      report.systems.push_back(std::move(ev));
      continue;
    }
    ev.present = true;
    if (it->second.prov.has_final_valid_nll)
      ev.final_valid_nll = it->second.prov.final_valid_nll;
    std::vector<double> lsds, snrs;
    for (std::size_t k = 0; k < test_idx.size(); ++k) {
      const auto& u = feats.utts[test_idx[k]];
      const Waveform synth = synthesize_utterance(
          it->second, u, feats, /*use_generated=*/true,
          derive_seed(cfg.seed, std::string("eval-sample-") + system, k));
      UtteranceScore sc;
      sc.utt_id = u.id;
      sc.lsd_db = log_spectral_distortion(references[k].samples,
                                          synth.samples, cfg.lsd);
      sc.segsnr_db = segmental_snr(references[k].samples, synth.samples,
                                   cfg.segsnr_frame);
      lsds.push_back(sc.lsd_db);
      snrs.push_back(sc.segsnr_db);
      ev.scores.push_back(std::move(sc));
    }
    ev.median_lsd_db = median(lsds);
    ev.median_segsnr_db = median(snrs);
    report.systems.push_back(std::move(ev));
  }

  const SystemEval* plain = nullptr;
  for (const auto& s : report.systems)
    if (s.system == "plain" && s.present) plain = &s;
  if (plain != nullptr) {
    for (const auto& s : report.systems) {
      if (!s.present || s.system == "plain") continue;
      PairDelta d;
      d.a = s.system;
      d.b = "plain";
      std::vector<double> lsd_deltas;
      for (std::size_t k = 0; k < s.scores.size(); ++k) {
        d.lsd_delta_db.push_back(s.scores[k].lsd_db - plain->scores[k].lsd_db);
        d.segsnr_delta_db.push_back(s.scores[k].segsnr_db -
                                    plain->scores[k].segsnr_db);
        lsd_deltas.push_back(d.lsd_delta_db.back());
      }
      d.median_lsd_delta_db = median(lsd_deltas);
      report.deltas.push_back(std::move(d));
    }
  }
  return report;
}

void write_report_csv(const EvalReport& report, const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) fail("cannot write report: " + path);
  f << "utt,system,lsd_db,segsnr_db\n";
  char buf[160];
  for (std::size_t k = 0; k < report.utt_ids.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%s,silence,%.6f,\n",
                  report.utt_ids[k].c_str(), report.silence_lsd_db[k]);
    f << buf;
  }
  for (const auto& s : report.systems) {
    if (!s.present) continue;
    for (const auto& sc : s.scores) {
      std::snprintf(buf, sizeof buf, "%s,%s,%.6f,%.6f\n", sc.utt_id.c_str(),
                    s.system.c_str(), sc.lsd_db, sc.segsnr_db);
      f << buf;
    }
  }
  for (const auto& d : report.deltas) {
    for (std::size_t k = 0; k < d.lsd_delta_db.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%s,delta:%s-%s,%.6f,%.6f\n",
                    report.utt_ids[k].c_str(), d.a.c_str(), d.b.c_str(),
                    d.lsd_delta_db[k], d.segsnr_delta_db[k]);
      f << buf;
    }
  }
}

void write_report_text(const EvalReport& report, const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) fail("cannot write report: " + path);
  char buf[200];
  f << "system comparison over the test split (generated conditions)\n";
  f << "utterances: " << report.utt_ids.size() << "\n\n";
  for (const auto& s : report.systems) {
    if (!s.present) {
      f << s.system << ": checkpoint missing, skipped\n";
      continue;
    }
    std::snprintf(buf, sizeof buf,
                  "%-9s median LSD %7.3f dB   median segSNR %7.3f dB",
                  s.system.c_str(), s.median_lsd_db, s.median_segsnr_db);
    f << buf;
    if (s.final_valid_nll) {
      std::snprintf(buf, sizeof buf, "   final valid NLL %.4f",
                    *s.final_valid_nll);
      f << buf;
    }
    f << "\n";
  }
  f << "\n";
  for (const auto& d : report.deltas) {
    std::snprintf(buf, sizeof buf, "%s - %s: median LSD delta %+.3f dB\n",
                  d.a.c_str(), d.b.c_str(), d.median_lsd_delta_db);
    f << buf;
  }
}

void export_nll_curves(
    const std::map<std::string, std::vector<net::NllLogRow>>& logs,
    const std::string& csv_path, const std::string& dat_path) {
  std::vector<std::string> modes;
  for (const char* m : kSystemOrder)
    if (logs.count(m)) modes.push_back(m);
  if (modes.empty()) fail("export_nll_curves: no logs");

  std::set<int> steps;
  std::map<std::string, std::map<int, double>> columns;
  for (const auto& mode : modes) {
    for (const auto& row : logs.at(mode)) {
      steps.insert(row.step);
      columns[mode + "_" + row.split][row.step] = row.nll;
    }
  }

  std::vector<std::string> col_names;
  for (const auto& mode : modes) {
    col_names.push_back(mode + "_train");
    col_names.push_back(mode + "_valid");
  }

  std::ofstream csv(csv_path, std::ios::trunc);
  if (!csv) fail("cannot write curves: " + csv_path);
  std::ofstream dat(dat_path, std::ios::trunc);
  if (!dat) fail("cannot write curves: " + dat_path);

  csv << "step";
  dat << "# step";
  for (const auto& c : col_names) {
    csv << "," << c;
    dat << " " << c;
  }
  csv << "\n";
  dat << "\n";

  char buf[64];
  for (int step : steps) {
    csv << step;
    dat << step;
    for (const auto& c : col_names) {
      const auto it = columns.find(c);
      const bool has =
          it != columns.end() && it->second.count(step) != 0;
      if (has) {
        std::snprintf(buf, sizeof buf, "%.9f", it->second.at(step));
        csv << "," << buf;
        dat << " " << buf;
      } else {
        csv << ",";
        dat << " nan";
      }
    }
    csv << "\n";
    dat << "\n";
  }
}

}  // namespace mbg
