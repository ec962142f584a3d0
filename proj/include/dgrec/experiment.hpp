// Copyright 2026 The DGREC Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DGREC_EXPERIMENT_HPP_
#define DGREC_EXPERIMENT_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "dgrec/data.hpp"
#include "dgrec/privacy.hpp"
#include "dgrec/protocol.hpp"

namespace dgrec {

struct AblationFlags {
  bool no_item_graph = false;
  bool no_neighbor = false;
  bool no_attention = false;
  bool no_pearson = false;
  bool laplace_sharing = false;

  std::vector<std::string> active() const;
};

// Sets the named variant flag; throws on unknown names.
void set_ablation_flag(AblationFlags& flags, const std::string& variant);

struct ExperimentConfig {
  // dataset: a TSV directory or synthetic generation parameters
  std::string dataset_path;
  SynthParams synth;
  double publicized_ratio = 1.0;
  int min_interactions = 0;

  // model
  int embed_dim = 16;
  int interest_dim = 10;
  int num_interests = 6;
  int hidden_dim = 16;
  bool squared_l2 = false;

  // training
  double learning_rate = 0.01;
  double lambda = 1e-3;
  std::int64_t rounds = 50;
  int negatives_per_positive = 1;
  int workers = 0;

  // privacy
  double clip = 0.1;
  double beta = 1.0;
  LogBase log_base = LogBase::kNatural;
  double gamma = 0.01;
  bool reclip_decoded = false;
  double laplace_scale = 0.1;

  // protocol
  int hops = 4;
  int fanout = 3;

  // evaluation
  std::int64_t eval_every = 10;
  int top_k = 20;

  std::uint64_t seed = 1;
  AblationFlags ablation;

  // Parses the sectioned JSON config; every problem (unknown keys, type
  // mismatches, range violations) lands in `errors` so a config can be
  // fixed in one pass.
  static ExperimentConfig from_json(const nlohmann::json& j,
                                    std::vector<std::string>* errors);
  nlohmann::json to_json() const;
  std::vector<std::string> validate() const;

  ModelConfig model_config(std::int64_t num_items) const;
};

struct ExperimentSummary {
  std::int64_t rounds_run = 0;
  std::int64_t n_s = 0;
  std::size_t num_users = 0;
  std::size_t num_items = 0;
  double sparsity = 0.0;
  double first_mean_loss = 0.0;  // round-1 record (round-0 when untrained)
  double final_mean_loss = 0.0;
  double final_recall = 0.0;
  double final_ndcg = 0.0;
  double baseline_recall = 0.0;
  double baseline_ndcg = 0.0;
  double per_round_epsilon = 0.0;
  double cumulative_epsilon = 0.0;
  double dp_epsilon = 0.0;
  std::uint64_t total_bits = 0;

  nlohmann::json to_json() const;
};

// Runs the full experiment and writes metrics.jsonl, bus_trace.csv,
// privacy.json, summary.json and resolved_config.json under out_dir.
// Byte-identical outputs for identical config and seed.
ExperimentSummary run_experiment(const ExperimentConfig& cfg,
                                 const std::filesystem::path& out_dir);

}  // namespace dgrec

#endif  // DGREC_EXPERIMENT_HPP_
