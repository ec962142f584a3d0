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

#include "dgrec/experiment.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "dgrec/metrics.hpp"

namespace dgrec {
namespace {

using nlohmann::json;

// Section-aware reader that records unknown keys and type mismatches
// instead of throwing on the first one.
class ConfigReader {
 public:
  ConfigReader(const json& j, std::string section,
               std::vector<std::string>* errors)
      : j_(j), section_(std::move(section)), errors_(errors) {}

  template <typename T>
  void read(const char* key, T& out) {
    known_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->get<T>();
    } catch (const json::exception&) {
      error(std::string(key) + ": unexpected type");
    }
  }

  void mark_known(const char* key) { known_.insert(key); }

  void finish() {
    for (const auto& [key, value] : j_.items()) {
      if (known_.count(key) == 0) error("unknown key '" + key + "'");
    }
  }

  void error(const std::string& msg) {
    if (errors_) errors_->push_back(section_ + ": " + msg);
  }

 private:
  const json& j_;
  std::string section_;
  std::vector<std::string>* errors_;
  std::set<std::string> known_;
};

const json* section(const json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end()) return nullptr;
  return &*it;
}

}  // namespace

std::vector<std::string> AblationFlags::active() const {
  std::vector<std::string> out;
  if (no_item_graph) out.push_back("no_item_graph");
  if (no_neighbor) out.push_back("no_neighbor");
  if (no_attention) out.push_back("no_attention");
  if (no_pearson) out.push_back("no_pearson");
  if (laplace_sharing) out.push_back("laplace_sharing");
  return out;
}

void set_ablation_flag(AblationFlags& flags, const std::string& variant) {
  if (variant == "no_item_graph") {
    flags.no_item_graph = true;
  } else if (variant == "no_neighbor") {
    flags.no_neighbor = true;
  } else if (variant == "no_attention") {
    flags.no_attention = true;
  } else if (variant == "no_pearson") {
    flags.no_pearson = true;
  } else if (variant == "laplace_sharing") {
    flags.laplace_sharing = true;
  } else {
    throw std::invalid_argument("unknown ablation variant '" + variant + "'");
  }
}

ExperimentConfig ExperimentConfig::from_json(const json& j,
                                             std::vector<std::string>* errors) {
  ExperimentConfig cfg;
  std::set<std::string> known{"dataset",  "model",      "training", "privacy",
                              "protocol", "evaluation", "ablation", "seed"};
  for (const auto& [key, value] : j.items()) {
    if (known.count(key) == 0 && errors) {
      errors->push_back("config: unknown section '" + key + "'");
    }
  }

  if (const json* s = section(j, "dataset")) {
    ConfigReader r(*s, "dataset", errors);
    r.read("path", cfg.dataset_path);
    r.read("publicized_ratio", cfg.publicized_ratio);
    r.read("min_interactions", cfg.min_interactions);
    if (const json* syn = section(*s, "synthetic")) {
      ConfigReader rs(*syn, "dataset.synthetic", errors);
      rs.read("users", cfg.synth.users);
      rs.read("items", cfg.synth.items);
      rs.read("tags", cfg.synth.tags);
      rs.read("interactions_per_user", cfg.synth.interactions_per_user);
      rs.read("edges_per_user", cfg.synth.edges_per_user);
      rs.read("clusters", cfg.synth.clusters);
      rs.read("cluster_affinity", cfg.synth.cluster_affinity);
      rs.read("edge_affinity", cfg.synth.edge_affinity);
      rs.finish();
    }
    r.mark_known("synthetic");  // handled above
    r.finish();
  }
  if (const json* s = section(j, "model")) {
    ConfigReader r(*s, "model", errors);
    r.read("embed_dim", cfg.embed_dim);
    r.read("interest_dim", cfg.interest_dim);
    r.read("num_interests", cfg.num_interests);
    r.read("hidden_dim", cfg.hidden_dim);
    r.read("squared_l2", cfg.squared_l2);
    r.finish();
  }
  if (const json* s = section(j, "training")) {
    ConfigReader r(*s, "training", errors);
    r.read("learning_rate", cfg.learning_rate);
    r.read("lambda", cfg.lambda);
    r.read("rounds", cfg.rounds);
    r.read("negatives_per_positive", cfg.negatives_per_positive);
    r.read("workers", cfg.workers);
    r.finish();
  }
  if (const json* s = section(j, "privacy")) {
    ConfigReader r(*s, "privacy", errors);
    r.read("clip", cfg.clip);
    r.read("beta", cfg.beta);
    r.read("gamma", cfg.gamma);
    r.read("reclip_decoded", cfg.reclip_decoded);
    r.read("laplace_scale", cfg.laplace_scale);
    std::string base = "e";
    r.read("log_base", base);
    if (base == "e") {
      cfg.log_base = LogBase::kNatural;
    } else if (base == "10") {
      cfg.log_base = LogBase::kBase10;
    } else {
      r.error("log_base must be 'e' or '10'");
    }
    r.finish();
  }
  if (const json* s = section(j, "protocol")) {
    ConfigReader r(*s, "protocol", errors);
    r.read("hops", cfg.hops);
    r.read("fanout", cfg.fanout);
    r.finish();
  }
  if (const json* s = section(j, "evaluation")) {
    ConfigReader r(*s, "evaluation", errors);
    r.read("every", cfg.eval_every);
    r.read("top_k", cfg.top_k);
    r.finish();
  }
  if (const json* s = section(j, "ablation")) {
    ConfigReader r(*s, "ablation", errors);
    r.read("no_item_graph", cfg.ablation.no_item_graph);
    r.read("no_neighbor", cfg.ablation.no_neighbor);
    r.read("no_attention", cfg.ablation.no_attention);
    r.read("no_pearson", cfg.ablation.no_pearson);
    r.read("laplace_sharing", cfg.ablation.laplace_sharing);
    r.finish();
  }
  if (j.contains("seed")) {
    try {
      cfg.seed = j.at("seed").get<std::uint64_t>();
    } catch (const json::exception&) {
      if (errors) errors->push_back("seed: unexpected type");
    }
  }
  if (errors) {
    const auto more = cfg.validate();
    errors->insert(errors->end(), more.begin(), more.end());
  }
  return cfg;
}

json ExperimentConfig::to_json() const {
  json j;
  j["dataset"]["path"] = dataset_path;
  j["dataset"]["publicized_ratio"] = publicized_ratio;
  j["dataset"]["min_interactions"] = min_interactions;
  j["dataset"]["synthetic"] = {
      {"users", synth.users},
      {"items", synth.items},
      {"tags", synth.tags},
      {"interactions_per_user", synth.interactions_per_user},
      {"edges_per_user", synth.edges_per_user},
      {"clusters", synth.clusters},
      {"cluster_affinity", synth.cluster_affinity},
      {"edge_affinity", synth.edge_affinity}};
  j["model"] = {{"embed_dim", embed_dim},
                {"interest_dim", interest_dim},
                {"num_interests", num_interests},
                {"hidden_dim", hidden_dim},
                {"squared_l2", squared_l2}};
  j["training"] = {{"learning_rate", learning_rate},
                   {"lambda", lambda},
                   {"rounds", rounds},
                   {"negatives_per_positive", negatives_per_positive},
                   {"workers", workers}};
  j["privacy"] = {{"clip", clip},
                  {"beta", beta},
                  {"gamma", gamma},
                  {"reclip_decoded", reclip_decoded},
                  {"laplace_scale", laplace_scale},
                  {"log_base", log_base == LogBase::kNatural ? "e" : "10"}};
  j["protocol"] = {{"hops", hops}, {"fanout", fanout}};
  j["evaluation"] = {{"every", eval_every}, {"top_k", top_k}};
  j["ablation"] = {{"no_item_graph", ablation.no_item_graph},
                   {"no_neighbor", ablation.no_neighbor},
                   {"no_attention", ablation.no_attention},
                   {"no_pearson", ablation.no_pearson},
                   {"laplace_sharing", ablation.laplace_sharing}};
  j["seed"] = seed;
  return j;
}

std::vector<std::string> ExperimentConfig::validate() const {
  std::vector<std::string> errors;
  const auto check = [&errors](bool ok, const char* msg) {
    if (!ok) errors.push_back(msg);
  };
  check(embed_dim > 0, "model: embed_dim must be positive");
  check(interest_dim >= 2, "model: interest_dim must be at least 2");
  check(num_interests > 0, "model: num_interests must be positive");
  check(hidden_dim > 0, "model: hidden_dim must be positive");
  check(learning_rate > 0.0, "training: learning_rate must be positive");
  check(lambda >= 0.0, "training: lambda must be nonnegative");
  check(rounds >= 0, "training: rounds must be nonnegative");
  check(negatives_per_positive > 0,
        "training: negatives_per_positive must be positive");
  check(workers >= 0, "training: workers must be nonnegative");
  check(clip > 0.0, "privacy: clip must be positive");
  check(beta > 0.0, "privacy: beta must be positive");
  check(gamma > 0.0 && gamma <= 1.0, "privacy: gamma must be in (0, 1]");
  check(laplace_scale >= 0.0, "privacy: laplace_scale must be nonnegative");
  check(hops >= 1, "protocol: hops must be at least 1");
  check(fanout >= 1, "protocol: fanout must be at least 1");
  check(eval_every >= 1, "evaluation: every must be at least 1");
  check(top_k >= 1, "evaluation: top_k must be at least 1");
  check(publicized_ratio >= 0.0 && publicized_ratio <= 1.0,
        "dataset: publicized_ratio must be in [0, 1]");
  check(min_interactions >= 0,
        "dataset: min_interactions must be nonnegative");
  if (dataset_path.empty()) {
    check(synth.users >= 1 && synth.items >= 1 && synth.tags >= 1,
          "dataset.synthetic: sizes must be positive");
    check(synth.clusters >= 1, "dataset.synthetic: clusters must be positive");
    check(synth.interactions_per_user >= 1,
          "dataset.synthetic: interactions_per_user must be positive");
  }
  if (ablation.no_item_graph &&
      (ablation.no_neighbor || ablation.no_attention || ablation.no_pearson)) {
    errors.push_back(
        "ablation: no_item_graph conflicts with the other hypergraph "
        "variants");
  }
  return errors;
}

ModelConfig ExperimentConfig::model_config(std::int64_t num_items) const {
  ModelConfig mc;
  mc.num_items = num_items;
  mc.embed_dim = embed_dim;
  mc.interest_dim = interest_dim;
  mc.num_interests = num_interests;
  mc.hidden_dim = hidden_dim;
  mc.squared_l2 = squared_l2;
  if (ablation.no_item_graph) {
    mc.variant = PreferenceVariant::kMeanEmbedding;
  } else if (ablation.no_attention) {
    mc.variant = PreferenceVariant::kNoAttention;
  }
  return mc;
}

json ExperimentSummary::to_json() const {
  json j;
  j["rounds_run"] = rounds_run;
  j["n_s"] = n_s;
  j["num_users"] = num_users;
  j["num_items"] = num_items;
  j["sparsity"] = sparsity;
  j["first_mean_loss"] = first_mean_loss;
  j["final_mean_loss"] = final_mean_loss;
  j["final_recall_at_k"] = final_recall;
  j["final_ndcg_at_k"] = final_ndcg;
  j["baseline_recall_at_k"] = baseline_recall;
  j["baseline_ndcg_at_k"] = baseline_ndcg;
  j["per_round_epsilon"] = per_round_epsilon;
  j["cumulative_epsilon"] = cumulative_epsilon;
  j["dp_epsilon"] = dp_epsilon;
  j["total_bits"] = total_bits;
  return j;
}

namespace {

struct EvalOutcome {
  double mean_loss = 0.0;
  double recall = 0.0;
  double ndcg = 0.0;
};

class ExperimentRun {
 public:
  ExperimentRun(const ExperimentConfig& cfg,
                const std::filesystem::path& out_dir)
      : cfg_(cfg), out_dir_(out_dir), state_(cfg.seed) {}

  ExperimentSummary run();

 private:
  void load_dataset();
  void build_state();
  EvalOutcome evaluate();
  void compute_baseline();
  void emit_metrics(std::ostream& os, std::int64_t round,
                    const EvalOutcome& eval, double cumulative_epsilon,
                    std::uint64_t total_bits);

  ExperimentConfig cfg_;
  std::filesystem::path out_dir_;

  Dataset dataset_;
  SplitDataset splits_;
  InterUserGraph graph_;
  TrainingState state_;
  MessageBus bus_;
  CostMeter meter_;
  double baseline_recall_ = 0.0;
  double baseline_ndcg_ = 0.0;
};

void ExperimentRun::load_dataset() {
  if (!cfg_.dataset_path.empty()) {
    dataset_ = parse_tsv(cfg_.dataset_path);
  } else {
    dataset_ = synth_generate(cfg_.synth, cfg_.seed);
  }
  if (cfg_.min_interactions > 1) {
    dataset_ = filter_min_interactions(dataset_, cfg_.min_interactions);
  }
  bool has_explicit_public = false;
  for (const auto& v : dataset_.publicized) {
    has_explicit_public |= !v.empty();
  }
  if (!has_explicit_public) {
    dataset_ =
        apply_publicized_ratio(dataset_, cfg_.publicized_ratio, cfg_.seed);
  }
  splits_ = split(dataset_, cfg_.seed);
}

void ExperimentRun::build_state() {
  std::vector<UserId> all_users;
  for (std::size_t u = 0; u < dataset_.num_users(); ++u) {
    all_users.push_back(static_cast<UserId>(u));
  }
  graph_ = InterUserGraph::from_edges(dataset_.user_edges, all_users);

  const ModelConfig mc =
      cfg_.model_config(static_cast<std::int64_t>(dataset_.num_items()));
  LocalModel seed_model(mc);
  Rng init_rng = Rng::keyed(cfg_.seed, "init");
  seed_model.init_uniform(init_rng);

  std::map<ItemId, std::vector<TagId>> tag_map;
  for (std::size_t i = 0; i < dataset_.num_items(); ++i) {
    tag_map[static_cast<ItemId>(i)] = dataset_.item_tags[i];
  }
  // Publicized interactions shared with neighbors are restricted to the
  // sharing user's training split.
  std::vector<std::vector<ItemId>> shared(dataset_.num_users());
  for (std::size_t u = 0; u < dataset_.num_users(); ++u) {
    std::set_intersection(dataset_.publicized[u].begin(),
                          dataset_.publicized[u].end(),
                          splits_.train[u].begin(), splits_.train[u].end(),
                          std::back_inserter(shared[u]));
  }

  for (std::size_t u = 0; u < dataset_.num_users(); ++u) {
    UserState& st =
        state_.add_user(static_cast<UserId>(u), LocalModel(seed_model));
    st.train_items = splits_.train[u];
    if (mc.variant == PreferenceVariant::kMeanEmbedding ||
        st.train_items.empty()) {
      continue;
    }
    std::map<UserId, std::vector<ItemId>> neighbor_public;
    if (!cfg_.ablation.no_neighbor) {
      for (UserId v : graph_.neighbors(static_cast<UserId>(u))) {
        const auto& pub = shared[static_cast<std::size_t>(v)];
        if (!pub.empty()) neighbor_public[v] = pub;
      }
    }
    st.hypergraph = build_item_hypergraph(static_cast<UserId>(u),
                                          st.train_items, neighbor_public,
                                          tag_map);
    st.adjacency = normalized_adjacency(st.hypergraph);
    st.has_hypergraph = true;
  }
}

EvalOutcome ExperimentRun::evaluate() {
  EvalOutcome out;
  double loss_sum = 0.0;
  std::int64_t loss_n = 0;
  RankingResult result;
  result.k = cfg_.top_k;
  const auto num_items = static_cast<std::int64_t>(dataset_.num_items());

  for (const auto& [u, st] : state_.users()) {
    if (st.train_items.empty()) continue;
    if (st.model.config().variant != PreferenceVariant::kMeanEmbedding &&
        !st.has_hypergraph) {
      continue;
    }
    const Eigen::VectorXd pref = compute_preference(st.model, st.view());

    // Fixed per-user negatives keep the ranking loss comparable across
    // evaluation rounds.
    Rng neg_rng = Rng::keyed(cfg_.seed, "eval-negatives",
                             static_cast<std::uint64_t>(u));
    if (static_cast<std::int64_t>(st.train_items.size()) < num_items) {
      std::vector<double> pos_scores, neg_scores;
      for (ItemId pos : st.train_items) {
        ItemId neg = 0;
        do {
          neg = static_cast<ItemId>(
              neg_rng.uniform_index(static_cast<std::size_t>(num_items)));
        } while (std::binary_search(st.train_items.begin(),
                                    st.train_items.end(), neg));
        pos_scores.push_back(predict(st.model, pref, pos));
        neg_scores.push_back(predict(st.model, pref, neg));
      }
      loss_sum += bpr_loss(pos_scores, neg_scores, st.train_items.size());
      ++loss_n;
    }

    std::vector<ItemId> exclude = st.train_items;
    const auto& val = splits_.validation[static_cast<std::size_t>(u)];
    exclude.insert(exclude.end(), val.begin(), val.end());
    std::sort(exclude.begin(), exclude.end());
    result.add(u,
               rank_items(
                   [&](ItemId item) { return predict(st.model, pref, item); },
                   num_items, exclude),
               splits_.test[static_cast<std::size_t>(u)]);
  }
  result.finalize();
  out.mean_loss = loss_n > 0 ? loss_sum / static_cast<double>(loss_n) : 0.0;
  out.recall = result.mean_recall;
  out.ndcg = result.mean_ndcg;
  return out;
}

void ExperimentRun::compute_baseline() {
  RankingResult result;
  result.k = cfg_.top_k;
  const auto num_items = static_cast<std::int64_t>(dataset_.num_items());
  for (std::size_t u = 0; u < dataset_.num_users(); ++u) {
    std::set<ItemId> exclude(splits_.train[u].begin(), splits_.train[u].end());
    exclude.insert(splits_.validation[u].begin(), splits_.validation[u].end());
    std::vector<ItemId> candidates;
    for (ItemId i = 0; i < num_items; ++i) {
      if (exclude.count(i) == 0) candidates.push_back(i);
    }
    Rng rng = Rng::keyed(cfg_.seed, "baseline", static_cast<std::uint64_t>(u));
    rng.shuffle(candidates);
    result.add(static_cast<UserId>(u), std::move(candidates), splits_.test[u]);
  }
  result.finalize();
  baseline_recall_ = result.mean_recall;
  baseline_ndcg_ = result.mean_ndcg;
}

void ExperimentRun::emit_metrics(std::ostream& os, std::int64_t round,
                                 const EvalOutcome& eval,
                                 double cumulative_epsilon,
                                 std::uint64_t total_bits) {
  json j;
  j["round"] = round;
  j["recall_at_k"] = eval.recall;
  j["ndcg_at_k"] = eval.ndcg;
  j["mean_loss"] = eval.mean_loss;
  j["cumulative_epsilon"] = cumulative_epsilon;
  j["total_bits"] = total_bits;
  os << j.dump() << "\n";
}

ExperimentSummary ExperimentRun::run() {
  const auto errors = cfg_.validate();
  if (!errors.empty()) {
    std::string msg = "invalid config:";
    for (const auto& e : errors) msg += "\n  - " + e;
    throw std::invalid_argument(msg);
  }
  std::filesystem::create_directories(out_dir_);
  load_dataset();
  build_state();
  compute_baseline();

  const ModelConfig mc =
      cfg_.model_config(static_cast<std::int64_t>(dataset_.num_items()));
  const auto n_s = ParamLayout(mc).total();
  const double per_round_eps =
      rdp_epsilon(n_s, cfg_.clip, cfg_.beta, cfg_.log_base);
  PrivacyAccountant accountant(per_round_eps, cfg_.log_base);
  const LdpConfig ldp{cfg_.clip, cfg_.beta};

  TrainOptions opts;
  opts.hops = cfg_.hops;
  opts.fanout = cfg_.fanout;
  opts.learning_rate = cfg_.learning_rate;
  opts.lambda = cfg_.lambda;
  opts.negatives_per_positive = cfg_.negatives_per_positive;
  opts.include_pearson = !cfg_.ablation.no_pearson;
  opts.reclip_decoded = cfg_.reclip_decoded;
  opts.workers = cfg_.workers;
  if (cfg_.ablation.laplace_sharing) {
    opts.sharing = TrainOptions::Sharing::kLaplace;
    opts.laplace_scale = cfg_.laplace_scale;
  }

  std::ofstream metrics(out_dir_ / "metrics.jsonl");
  if (!metrics) {
    throw std::runtime_error("cannot write metrics.jsonl under " +
                             out_dir_.string());
  }

  ExperimentSummary summary;
  summary.n_s = n_s;
  summary.num_users = dataset_.num_users();
  summary.num_items = dataset_.num_items();
  summary.sparsity = dataset_.sparsity();
  summary.per_round_epsilon = per_round_eps;

  // Round 0: untrained models.
  EvalOutcome eval = evaluate();
  emit_metrics(metrics, 0, eval, 0.0, 0);
  summary.first_mean_loss = eval.mean_loss;
  summary.final_mean_loss = eval.mean_loss;
  summary.final_recall = eval.recall;
  summary.final_ndcg = eval.ndcg;

  std::vector<UserId> order;
  for (const auto& [u, st] : state_.users()) order.push_back(u);

  for (std::int64_t round = 1; round <= cfg_.rounds; ++round) {
    const UserId initiator =
        order[static_cast<std::size_t>((round - 1) %
                                       static_cast<std::int64_t>(order.size()))];
    training_round(state_, graph_, initiator, opts, ldp, &accountant, &meter_,
                   &bus_);
    if (round == 1 || round % cfg_.eval_every == 0 || round == cfg_.rounds) {
      eval = evaluate();
      emit_metrics(metrics, round, eval, accountant.cumulative_epsilon(),
                   bus_.total_bytes() * 8);
      if (round == 1) summary.first_mean_loss = eval.mean_loss;
      summary.final_mean_loss = eval.mean_loss;
      summary.final_recall = eval.recall;
      summary.final_ndcg = eval.ndcg;
    }
  }
  metrics.close();

  summary.rounds_run = cfg_.rounds;
  summary.baseline_recall = baseline_recall_;
  summary.baseline_ndcg = baseline_ndcg_;
  summary.cumulative_epsilon = accountant.cumulative_epsilon();
  summary.dp_epsilon = accountant.dp_epsilon(cfg_.gamma);
  summary.total_bits = bus_.total_bytes() * 8;

  {
    std::ofstream trace(out_dir_ / "bus_trace.csv");
    bus_.write_csv(trace);
  }
  {
    json privacy;
    privacy["order"] = PrivacyAccountant::kOrder;
    privacy["log_base"] = cfg_.log_base == LogBase::kNatural ? "e" : "10";
    privacy["mechanism"] =
        cfg_.ablation.laplace_sharing ? "laplace" : "one_bit";
    privacy["n_s"] = n_s;
    privacy["per_round_epsilon"] = per_round_eps;
    privacy["rounds"] = accountant.rounds();
    privacy["cumulative_epsilon"] = accountant.cumulative_epsilon();
    privacy["dp_gamma"] = cfg_.gamma;
    privacy["dp_epsilon"] = accountant.dp_epsilon(cfg_.gamma);
    json per_user = json::object();
    for (const auto& [u, st] : state_.users()) {
      json e;
      e["rounds_participated"] = st.train_count;
      e["cumulative_epsilon"] =
          per_round_eps * static_cast<double>(st.train_count);
      per_user[std::to_string(u)] = e;
    }
    privacy["per_user"] = per_user;
    if (cfg_.ablation.laplace_sharing) {
      // pure-DP budget of per-coordinate Laplace with sensitivity 2*clip
      privacy["laplace_scale"] = cfg_.laplace_scale;
      if (cfg_.laplace_scale > 0.0) {
        privacy["laplace_per_round_epsilon"] =
            2.0 * cfg_.clip * static_cast<double>(n_s) / cfg_.laplace_scale;
      }
    }
    std::ofstream out(out_dir_ / "privacy.json");
    out << privacy.dump(2) << "\n";
  }
  {
    std::ofstream out(out_dir_ / "summary.json");
    out << summary.to_json().dump(2) << "\n";
  }
  {
    std::ofstream out(out_dir_ / "resolved_config.json");
    out << cfg_.to_json().dump(2) << "\n";
  }
  return summary;
}

}  // namespace

ExperimentSummary run_experiment(const ExperimentConfig& cfg,
                                 const std::filesystem::path& out_dir) {
  ExperimentRun run(cfg, out_dir);
  return run.run();
}

}  // namespace dgrec
