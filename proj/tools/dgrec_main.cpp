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

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "dgrec/data.hpp"
#include "dgrec/experiment.hpp"
#include "dgrec/privacy.hpp"

namespace {

using dgrec::ExperimentConfig;
using dgrec::LogBase;

struct CommonOverrides {
  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> log_base;
  std::optional<std::int64_t> rounds;
  std::optional<double> learning_rate;
  std::optional<double> lambda;
  std::optional<double> clip;
  std::optional<double> beta;
  std::optional<int> hops;
  std::optional<int> fanout;
  std::optional<std::int64_t> eval_every;
  std::optional<int> top_k;
  std::optional<double> publicized_ratio;
  std::optional<std::string> dataset_path;
  std::string out_dir = "out";
};

void add_common_options(CLI::App* cmd, CommonOverrides& o) {
  cmd->add_option("--config", o.config_path, "JSON config file");
  cmd->add_option("--out-dir", o.out_dir, "output directory");
  cmd->add_option("--seed", o.seed, "global random seed");
  cmd->add_option("--log-base", o.log_base, "epsilon log base: e or 10")
      ->check(CLI::IsMember({"e", "10"}));
  cmd->add_option("--rounds", o.rounds, "training rounds");
  cmd->add_option("--learning-rate", o.learning_rate, "SGD step size");
  cmd->add_option("--lambda", o.lambda, "L2 weight");
  cmd->add_option("--clip", o.clip, "gradient clip radius");
  cmd->add_option("--beta", o.beta, "perturbation strength");
  cmd->add_option("--hops", o.hops, "sampling hops");
  cmd->add_option("--fanout", o.fanout, "sampled neighbors per user");
  cmd->add_option("--eval-every", o.eval_every, "evaluation cadence");
  cmd->add_option("--top-k", o.top_k, "ranking cutoff");
  cmd->add_option("--publicized-ratio", o.publicized_ratio,
                  "fraction of interactions users publicize");
  cmd->add_option("--dataset", o.dataset_path, "TSV dataset directory");
}

ExperimentConfig resolve_config(const CommonOverrides& o,
                                std::vector<std::string>* errors) {
  ExperimentConfig cfg;
  if (o.config_path) {
    std::ifstream in(*o.config_path);
    if (!in) {
      errors->push_back("cannot open config file " + *o.config_path);
      return cfg;
    }
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      errors->push_back(std::string("config is not valid JSON: ") + e.what());
      return cfg;
    }
    cfg = ExperimentConfig::from_json(j, errors);
  }
  if (o.seed) cfg.seed = *o.seed;
  if (o.log_base) {
    cfg.log_base = *o.log_base == "10" ? LogBase::kBase10 : LogBase::kNatural;
  }
  if (o.rounds) cfg.rounds = *o.rounds;
  if (o.learning_rate) cfg.learning_rate = *o.learning_rate;
  if (o.lambda) cfg.lambda = *o.lambda;
  if (o.clip) cfg.clip = *o.clip;
  if (o.beta) cfg.beta = *o.beta;
  if (o.hops) cfg.hops = *o.hops;
  if (o.fanout) cfg.fanout = *o.fanout;
  if (o.eval_every) cfg.eval_every = *o.eval_every;
  if (o.top_k) cfg.top_k = *o.top_k;
  if (o.publicized_ratio) cfg.publicized_ratio = *o.publicized_ratio;
  if (o.dataset_path) cfg.dataset_path = *o.dataset_path;
  return cfg;
}

int run_with_config(const ExperimentConfig& cfg, const std::string& out_dir) {
  const auto summary = dgrec::run_experiment(cfg, out_dir);
  std::cout << summary.to_json().dump(2) << "\n";
  std::cout << "reports written to " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"decentralized private recommender simulator"};
  app.require_subcommand(1);

  CommonOverrides run_opts;
  CLI::App* run_cmd = app.add_subcommand("run", "run a full experiment");
  add_common_options(run_cmd, run_opts);

  CommonOverrides ablate_opts;
  std::string variant;
  CLI::App* ablate_cmd =
      app.add_subcommand("ablate", "run a single-variant ablation");
  add_common_options(ablate_cmd, ablate_opts);
  ablate_cmd
      ->add_option("--variant", variant,
                   "no_item_graph | no_neighbor | no_attention | no_pearson "
                   "| laplace_sharing")
      ->required();

  CLI::App* synth_cmd =
      app.add_subcommand("synth", "generate a synthetic TSV dataset");
  dgrec::SynthParams synth;
  std::string synth_out = "dataset";
  std::uint64_t synth_seed = 1;
  synth_cmd->add_option("--users", synth.users, "user count");
  synth_cmd->add_option("--items", synth.items, "item count");
  synth_cmd->add_option("--tags", synth.tags, "tag count");
  synth_cmd->add_option("--interactions-per-user", synth.interactions_per_user,
                        "interactions per user");
  synth_cmd->add_option("--edges-per-user", synth.edges_per_user,
                        "graph edges per user");
  synth_cmd->add_option("--clusters", synth.clusters, "latent clusters");
  synth_cmd->add_option("--cluster-affinity", synth.cluster_affinity,
                        "in-cluster interaction probability");
  synth_cmd->add_option("--edge-affinity", synth.edge_affinity,
                        "in-cluster edge probability");
  synth_cmd->add_option("--seed", synth_seed, "generator seed");
  synth_cmd->add_option("--out", synth_out, "output directory")->required();

  CLI::App* validate_cmd =
      app.add_subcommand("validate-config", "check a config file");
  std::string validate_path;
  validate_cmd->add_option("--config", validate_path, "JSON config file")
      ->required();

  CLI::App* budget_cmd = app.add_subcommand(
      "privacy-budget", "closed-form privacy budget calculator");
  std::int64_t budget_ns = 1;
  double budget_clip = 0.1;
  double budget_beta = 1.0;
  std::int64_t budget_rounds = 1;
  double budget_gamma = 0.01;
  std::string budget_base = "e";
  budget_cmd->add_option("--n-s", budget_ns, "gradient size");
  budget_cmd->add_option("--delta", budget_clip, "clip radius");
  budget_cmd->add_option("--beta", budget_beta, "perturbation strength");
  budget_cmd->add_option("--rounds", budget_rounds, "training rounds");
  budget_cmd->add_option("--gamma", budget_gamma, "DP failure probability");
  budget_cmd->add_option("--log-base", budget_base, "e or 10")
      ->check(CLI::IsMember({"e", "10"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      std::vector<std::string> errors;
      const ExperimentConfig cfg = resolve_config(run_opts, &errors);
      if (!errors.empty()) {
        for (const auto& e : errors) std::cerr << "error: " << e << "\n";
        return 1;
      }
      return run_with_config(cfg, run_opts.out_dir);
    }
    if (ablate_cmd->parsed()) {
      std::vector<std::string> errors;
      ExperimentConfig cfg = resolve_config(ablate_opts, &errors);
      if (!errors.empty()) {
        for (const auto& e : errors) std::cerr << "error: " << e << "\n";
        return 1;
      }
      dgrec::set_ablation_flag(cfg.ablation, variant);
      return run_with_config(cfg, ablate_opts.out_dir);
    }
    if (synth_cmd->parsed()) {
      const dgrec::Dataset ds = dgrec::synth_generate(synth, synth_seed);
      dgrec::write_tsv(ds, synth_out);
      std::cout << "users        = " << ds.num_users() << "\n"
                << "items        = " << ds.num_items() << "\n"
                << "tags         = " << ds.num_tags() << "\n"
                << "interactions = " << ds.num_interactions() << "\n"
                << "sparsity     = " << ds.sparsity() << "\n"
                << "written to " << synth_out << "\n";
      return 0;
    }
    if (validate_cmd->parsed()) {
      std::ifstream in(validate_path);
      if (!in) {
        std::cerr << "error: cannot open " << validate_path << "\n";
        return 1;
      }
      nlohmann::json j;
      try {
        in >> j;
      } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: config is not valid JSON: " << e.what() << "\n";
        return 1;
      }
      std::vector<std::string> errors;
      const ExperimentConfig cfg = ExperimentConfig::from_json(j, &errors);
      if (!errors.empty()) {
        for (const auto& e : errors) std::cerr << "error: " << e << "\n";
        return 1;
      }
      std::cout << "config ok\n" << cfg.to_json().dump(2) << "\n";
      return 0;
    }
    if (budget_cmd->parsed()) {
      const LogBase base =
          budget_base == "10" ? LogBase::kBase10 : LogBase::kNatural;
      const double eps =
          dgrec::rdp_epsilon(budget_ns, budget_clip, budget_beta, base);
      const double composed =
          dgrec::compose_to_dp(eps, budget_rounds, budget_gamma, base);
      std::cout << "order              = 1.5\n"
                << "log_base           = " << budget_base << "\n"
                << "n_s                = " << budget_ns << "\n"
                << "epsilon_per_round  = " << eps << "\n"
                << "rounds             = " << budget_rounds << "\n"
                << "cumulative_epsilon = " << eps * budget_rounds << "\n"
                << "dp_gamma           = " << budget_gamma << "\n"
                << "dp_epsilon         = " << composed << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
