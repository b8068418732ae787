#pragma once
// Experiment configuration: one INI-style file with sections for the
// corpus, the LP front-end, the surrogate, the network, training, and
// evaluation, validated as a whole before any stage runs.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mbg/container.hpp"
#include "mbg/corpus.hpp"
#include "mbg/evaluate.hpp"
#include "mbg/net/trainer.hpp"
#include "mbg/surrogate.hpp"

namespace mbg {

struct ExperimentConfig {
  std::string out_dir;
  CorpusSpec corpus;
  LpConfig lp;
  F0Config f0;
  SurrogateConfig surrogate;
  net::NetConfig net;
  net::TrainHyper train;
  EvalConfig eval;
  std::uint64_t seed_corpus = 1;
  std::uint64_t seed_surrogate = 2;
  std::uint64_t seed_train = 3;
  std::uint64_t seed_eval = 4;

  // raw file text, hashed into provenance records
  std::string source_text;
  std::uint64_t config_hash() const;
};

// Parses and cross-validates; throws with every violated constraint listed
// (one per line).
ExperimentConfig load_experiment_config(const std::string& path);
ExperimentConfig parse_experiment_config(const std::string& text,
                                         const std::string& origin);

}  // namespace mbg
