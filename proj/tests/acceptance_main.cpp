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
//
// Acceptance suite: one check per release criterion, one pass/fail line
// each. Exits nonzero if any criterion fails. argv[1] must point at the
// CLI binary.

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <queue>
#include <sstream>
#include <string>
#include <vector>

#include "dgrec/data.hpp"
#include "dgrec/experiment.hpp"
#include "dgrec/graph.hpp"
#include "dgrec/metrics.hpp"
#include "dgrec/model.hpp"
#include "dgrec/privacy.hpp"
#include "dgrec/protocol.hpp"

namespace {

using Clock = std::chrono::steady_clock;

struct Criterion {
  int id;
  std::string description;
  bool passed;
  double seconds;
  std::string detail;
};

std::vector<Criterion> g_results;

void report(int id, const std::string& description, bool passed,
            double seconds, const std::string& detail = "") {
  g_results.push_back({id, description, passed, seconds, detail});
  std::cout << (passed ? "[PASS]" : "[FAIL]") << " criterion " << id << ": "
            << description << "  (" << seconds << " s)";
  if (!detail.empty()) std::cout << "  -- " << detail;
  std::cout << "\n" << std::flush;
}

std::string run_command(const std::string& cmd) {
  std::string output;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return output;
  char buf[512];
  while (fgets(buf, sizeof(buf), pipe)) output += buf;
  pclose(pipe);
  return output;
}

double parse_field(const std::string& text, const std::string& field) {
  const auto pos = text.find(field);
  if (pos == std::string::npos) return std::nan("");
  const auto eq = text.find('=', pos);
  if (eq == std::string::npos) return std::nan("");
  return std::strtod(text.c_str() + eq + 1, nullptr);
}

std::filesystem::path scratch_dir() {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("dgrec_acceptance_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return dir;
}

// Experiment configuration for the end-to-end criteria. Sampling and
// privacy parameters are the published defaults (clip 0.1, beta 1,
// hops 4, fanout 3); the step size and negative sampling are scaled up so
// the 50-round desk budget produces measurable learning.
dgrec::ExperimentConfig learning_config(std::uint64_t seed) {
  dgrec::ExperimentConfig cfg;
  cfg.synth.users = 50;
  cfg.synth.items = 100;
  cfg.synth.tags = 20;
  cfg.synth.interactions_per_user = 30;
  cfg.synth.edges_per_user = 4;
  cfg.synth.clusters = 2;
  cfg.synth.cluster_affinity = 0.97;
  cfg.synth.edge_affinity = 0.95;
  cfg.embed_dim = 16;
  cfg.interest_dim = 10;
  cfg.num_interests = 6;
  cfg.hidden_dim = 16;
  cfg.learning_rate = 1.0;
  cfg.lambda = 1e-3;
  cfg.rounds = 50;
  cfg.negatives_per_positive = 8;
  cfg.clip = 0.1;
  cfg.beta = 1.0;
  cfg.hops = 4;
  cfg.fanout = 3;
  cfg.eval_every = 10;
  cfg.top_k = 20;
  cfg.seed = seed;
  return cfg;
}

void criterion_1_budget_anchor(const std::string& cli) {
  const auto t0 = Clock::now();
  const std::string base10 = run_command(
      cli + " privacy-budget --n-s 1 --delta 0.1 --beta 1 --log-base 10");
  const std::string natural = run_command(
      cli + " privacy-budget --n-s 1 --delta 0.1 --beta 1 --log-base e");
  const double eps10 = parse_field(base10, "epsilon_per_round");
  const double epse = parse_field(natural, "epsilon_per_round");
  const double seconds =
      std::chrono::duration<double>(Clock::now() - t0).count();
  const bool ok = std::fabs(eps10 - 0.5475) <= 0.01 &&
                  std::fabs(eps10 - 0.54) <= 0.01 &&
                  std::fabs(epse - 1.2609) <= 0.01 && seconds < 1.0;
  std::ostringstream detail;
  detail << "base10=" << eps10 << " natural=" << epse;
  report(1, "privacy-budget anchor (0.5475 base-10 / 1.2609 natural)", ok,
         seconds, detail.str());
}

void criterion_2_unbiasedness() {
  const auto t0 = Clock::now();
  const dgrec::LdpConfig cfg{0.1, 1.0};
  const int dim = 16;
  const int samples = 100000;
  dgrec::Rng gen_rng(2026);
  bool ok = true;
  double worst_sigma_ratio = 0.0;
  for (int trial = 0; trial < 20 && ok; ++trial) {
    Eigen::VectorXd g(dim);
    for (int i = 0; i < dim; ++i) {
      g(i) = (gen_rng.uniform() * 2.0 - 1.0) * cfg.clip;
    }
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(dim);
    Eigen::VectorXd sum_sq = Eigen::VectorXd::Zero(dim);
    dgrec::Rng enc_rng = dgrec::Rng::keyed(2026, "unbiased",
                                           static_cast<std::uint64_t>(trial));
    const double scale = cfg.decode_scale();
    for (int s = 0; s < samples; ++s) {
      for (int i = 0; i < dim; ++i) {
        const double bit =
            enc_rng.bernoulli(cfg.positive_probability(g(i))) ? 1.0 : -1.0;
        const double decoded = scale * bit;
        sum(i) += decoded;
        sum_sq(i) += decoded * decoded;
      }
    }
    for (int i = 0; i < dim; ++i) {
      const double mean = sum(i) / samples;
      const double var = sum_sq(i) / samples - mean * mean;
      const double stderr_i = std::sqrt(var / samples);
      const double ratio = std::fabs(mean - g(i)) / stderr_i;
      worst_sigma_ratio = std::max(worst_sigma_ratio, ratio);
      if (std::fabs(mean - g(i)) > 4.0 * stderr_i) ok = false;
    }
  }
  const double seconds =
      std::chrono::duration<double>(Clock::now() - t0).count();
  std::ostringstream detail;
  detail << "worst |mean-g|/stderr = " << worst_sigma_ratio;
  report(2, "decode(encode(g)) unbiased within 4 standard errors",
         ok && seconds < 30.0, seconds, detail.str());
}

void criterion_3_rdp_bound() {
  const auto t0 = Clock::now();
  bool ok = true;
  double worst_margin = 1e9;
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      const double delta = 0.05 + i * (0.45 / 4.0);
      const double beta = 0.5 + j * (3.5 / 4.0);
      const dgrec::LdpConfig cfg{delta, beta};
      const double div =
          dgrec::two_point_renyi_divergence(cfg, delta, -delta);
      const double eps = dgrec::rdp_epsilon(1, delta, beta);
      worst_margin = std::min(worst_margin, eps - div);
      if (div > eps) ok = false;
    }
  }
  const double seconds =
      std::chrono::duration<double>(Clock::now() - t0).count();
  std::ostringstream detail;
  detail << "smallest epsilon - divergence margin = " << worst_margin;
  report(3, "two-point Renyi-1.5 divergence within the closed-form budget",
         ok && seconds < 1.0, seconds, detail.str());
}

void criterion_4_gradient_check() {
  const auto t0 = Clock::now();
  std::map<dgrec::ItemId, std::vector<dgrec::TagId>> tags{
      {0, {0}}, {1, {0, 1}}, {2, {1}}, {3, {1}}};
  const std::vector<dgrec::ItemId> own{0, 1, 2, 3};
  const auto hypergraph = dgrec::build_item_hypergraph(0, own, {}, tags);
  const auto adjacency = dgrec::normalized_adjacency(hypergraph);
  dgrec::UserView view;
  view.hypergraph = &hypergraph;
  view.adjacency = &adjacency;
  view.own_items = own;
  const std::vector<dgrec::BatchPair> batch{{0, 4}, {1, 5}, {2, 4}, {3, 5}};

  dgrec::ModelConfig mc;
  mc.num_items = 6;
  mc.embed_dim = 4;
  mc.interest_dim = 3;
  mc.num_interests = 2;
  mc.hidden_dim = 4;

  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    dgrec::LocalModel model(mc);
    dgrec::Rng rng(seed);
    model.init_uniform(rng);
    const Eigen::VectorXd grad =
        dgrec::compute_local_gradients(model, view, batch, 0.01);

    dgrec::LocalModel probe(mc);
    const Eigen::VectorXd theta = model.params();
    const double h = 1e-5;
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
      Eigen::VectorXd t = theta;
      t(i) += h;
      probe.set_params(t);
      const double up = dgrec::forward(probe, view, batch, 0.01).loss.total;
      t(i) -= 2 * h;
      probe.set_params(t);
      const double dn = dgrec::forward(probe, view, batch, 0.01).loss.total;
      const double fd = (up - dn) / (2 * h);
      const double denom =
          std::max({std::fabs(grad(i)), std::fabs(fd), 1e-5});
      worst = std::max(worst, std::fabs(grad(i) - fd) / denom);
    }
  }
  const double seconds =
      std::chrono::duration<double>(Clock::now() - t0).count();
  std::ostringstream detail;
  detail << "max relative error = " << worst;
  report(4, "full-pipeline gradient matches finite differences (5 seeds)",
         worst <= 1e-4 && seconds < 10.0, seconds, detail.str());
}

void criterion_5_propagation_coverage() {
  const auto t0 = Clock::now();
  dgrec::Rng rng(515);
  int covered = 0;
  const int trials = 200;
  for (int trial = 0; trial < trials; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_index(29));
    std::vector<std::pair<dgrec::UserId, dgrec::UserId>> edges;
    for (dgrec::UserId u = 1; u < n; ++u) {
      edges.push_back({u, static_cast<dgrec::UserId>(rng.uniform_index(
                              static_cast<std::size_t>(u)))});
    }
    for (int extra = 0; extra < n / 3; ++extra) {
      const auto a = static_cast<dgrec::UserId>(
          rng.uniform_index(static_cast<std::size_t>(n)));
      const auto b = static_cast<dgrec::UserId>(
          rng.uniform_index(static_cast<std::size_t>(n)));
      if (a != b) edges.push_back({std::min(a, b), std::max(a, b)});
    }
    const auto nbhd = dgrec::SampledNeighborhood::from_edges(0, edges);

    int diameter = 0;
    for (dgrec::UserId s : nbhd.participants) {
      std::map<dgrec::UserId, int> dist{{s, 0}};
      std::queue<dgrec::UserId> q;
      q.push(s);
      while (!q.empty()) {
        const dgrec::UserId u = q.front();
        q.pop();
        for (dgrec::UserId v : nbhd.neighbors_of(u)) {
          if (dist.count(v) == 0) {
            dist[v] = dist[u] + 1;
            q.push(v);
          }
        }
      }
      for (const auto& [u, d] : dist) diameter = std::max(diameter, d);
    }
    const int hops = std::max(1, (diameter + 1) / 2);

    std::map<dgrec::UserId, dgrec::EncodedGradient> encoded;
    for (dgrec::UserId u : nbhd.participants) {
      dgrec::EncodedGradient e;
      e.origin = u;
      e.bits.assign(8, 1);
      encoded.emplace(u, std::move(e));
    }
    const auto result = dgrec::propagate(encoded, nbhd, hops);
    bool full = true;
    for (dgrec::UserId u : nbhd.participants) {
      full &= result.at(u).size() == nbhd.participants.size();
    }
    if (full) ++covered;
  }
  const double seconds =
      std::chrono::duration<double>(Clock::now() - t0).count();
  std::ostringstream detail;
  detail << covered << "/" << trials << " neighborhoods fully covered";
  report(5, "gradient propagation covers every participant within 2H steps",
         covered == trials, seconds, detail.str());
}

void criterion_6_communication_accounting() {
  const auto t0 = Clock::now();
  bool ok = true;
  std::ostringstream detail;
  for (int hops = 1; hops <= 3 && ok; ++hops) {
    for (int fanout = 1; fanout <= 3 && ok; ++fanout) {
      for (std::int64_t n_s : {8, 64}) {
        // full fanout-ary sampling tree with levels 0..hops-1
        std::vector<std::pair<dgrec::UserId, dgrec::UserId>> edges;
        std::int64_t next = 1;
        std::vector<dgrec::UserId> level{0};
        for (int depth = 1; depth < hops; ++depth) {
          std::vector<dgrec::UserId> below;
          for (dgrec::UserId parent : level) {
            for (int c = 0; c < fanout; ++c) {
              edges.push_back({parent, next});
              below.push_back(next++);
            }
          }
          level = below;
        }
        const auto nbhd = dgrec::SampledNeighborhood::from_edges(0, edges);
        std::map<dgrec::UserId, dgrec::EncodedGradient> encoded;
        for (dgrec::UserId u : nbhd.participants) {
          dgrec::EncodedGradient e;
          e.origin = u;
          e.bits.assign(static_cast<std::size_t>(n_s), 1);
          encoded.emplace(u, std::move(e));
        }
        dgrec::PropagationStats stats;
        dgrec::propagate(encoded, nbhd, hops, &stats);
        const auto measured = stats.worst_case_per_user_bits();
        const auto closed = dgrec::communication_cost(
            dgrec::CommunicationScheme::kDgrec, hops, fanout, n_s);
        if (measured != closed) {
          ok = false;
          detail << "mismatch at hops=" << hops << " fanout=" << fanout
                 << " n_s=" << n_s << ": " << measured << " != " << closed;
        }
        std::uint64_t series = 0;
        std::uint64_t pw = 1;
        for (int h = 0; h < hops; ++h) {
          series += pw;
          pw *= static_cast<std::uint64_t>(fanout);
        }
        const std::uint64_t expected_fed =
            64ULL * static_cast<std::uint64_t>(n_s) * series;
        if (dgrec::communication_cost(dgrec::CommunicationScheme::kFederated,
                                      hops, fanout, n_s) != expected_fed ||
            dgrec::communication_cost(
                dgrec::CommunicationScheme::kDecentralized, hops, fanout,
                n_s) != expected_fed) {
          ok = false;
          detail << "calculator mismatch at hops=" << hops
                 << " fanout=" << fanout;
        }
      }
    }
  }
  const double seconds =
      std::chrono::duration<double>(Clock::now() - t0).count();
  if (ok) detail << "all 18 tree configurations exact";
  report(6, "measured worst-case bits equal the closed forms", ok, seconds,
         detail.str());
}

void criterion_7_end_to_end_learning(const std::filesystem::path& scratch) {
  const auto t0 = Clock::now();
  const auto cfg = learning_config(1);
  const auto summary = dgrec::run_experiment(cfg, scratch / "learning");
  const double seconds =
      std::chrono::duration<double>(Clock::now() - t0).count();
  const double drop = (summary.first_mean_loss - summary.final_mean_loss) /
                      summary.first_mean_loss;
  const double ratio =
      summary.final_recall / std::max(summary.baseline_recall, 1e-12);
  const bool ok = drop >= 0.30 && ratio >= 2.0 && seconds < 300.0;
  std::ostringstream detail;
  detail << "loss drop = " << drop * 100 << "%, recall = "
         << summary.final_recall << " vs baseline " << summary.baseline_recall
         << " (x" << ratio << ")";
  report(7, "end-to-end learning beats chance on the synthetic clusters", ok,
         seconds, detail.str());
}

void criterion_8_sampling_distribution() {
  const auto t0 = Clock::now();
  const std::vector<std::pair<dgrec::UserId, dgrec::UserId>> edges{
      {0, 1}, {0, 2}, {0, 3}};
  const auto g = dgrec::InterUserGraph::from_edges(edges);
  const std::map<dgrec::UserId, dgrec::LossCount> weights{
      {1, {2.0, 0}}, {2, {1.0, 0}}, {3, {1.0, 0}}};
  const std::vector<double> expected{0.5, 0.25, 0.25};
  std::map<dgrec::UserId, int> counts{{1, 0}, {2, 0}, {3, 0}};
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    dgrec::Rng rng(static_cast<std::uint64_t>(i) + 1);
    const auto n = dgrec::neighbor_sampling(g, weights, 0, 1, 1, rng);
    for (dgrec::UserId leaf : n.neighbors_of(0)) counts[leaf]++;
  }
  double chi2 = 0.0;
  for (int j = 0; j < 3; ++j) {
    const double exp_count = expected[static_cast<std::size_t>(j)] * draws;
    const double delta = counts[j + 1] - exp_count;
    chi2 += delta * delta / exp_count;
  }
  const double p_value = std::exp(-chi2 / 2.0);  // chi-square with df = 2
  const double seconds =
      std::chrono::duration<double>(Clock::now() - t0).count();
  std::ostringstream detail;
  detail << "chi2 = " << chi2 << ", p = " << p_value;
  report(8, "neighbor draws fit the closed-form probabilities (chi-square)",
         p_value > 0.01, seconds, detail.str());
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion_9_determinism(const std::filesystem::path& scratch) {
  const auto t0 = Clock::now();
  dgrec::ExperimentConfig cfg = learning_config(7);
  cfg.rounds = 10;
  cfg.synth.users = 20;
  cfg.synth.items = 40;
  dgrec::run_experiment(cfg, scratch / "det_a");
  dgrec::run_experiment(cfg, scratch / "det_b");
  const bool ok = slurp(scratch / "det_a" / "metrics.jsonl") ==
                      slurp(scratch / "det_b" / "metrics.jsonl") &&
                  !slurp(scratch / "det_a" / "metrics.jsonl").empty();
  const double seconds =
      std::chrono::duration<double>(Clock::now() - t0).count();
  report(9, "identical config and seed produce byte-identical metrics", ok,
         seconds);
}

void criterion_10_ablation_direction(const std::filesystem::path& scratch) {
  const auto t0 = Clock::now();
  double default_sum = 0.0;
  double laplace_sum = 0.0;
  std::ostringstream detail;
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    dgrec::ExperimentConfig cfg = learning_config(seed);
    const auto base = dgrec::run_experiment(
        cfg, scratch / ("abl_default_" + std::to_string(seed)));
    cfg.ablation.laplace_sharing = true;
    cfg.laplace_scale = 0.1;
    const auto lap = dgrec::run_experiment(
        cfg, scratch / ("abl_laplace_" + std::to_string(seed)));
    default_sum += base.final_recall;
    laplace_sum += lap.final_recall;
    detail << "s" << seed << ": " << lap.final_recall << " vs "
           << base.final_recall << "; ";
  }
  const double seconds =
      std::chrono::duration<double>(Clock::now() - t0).count();
  const bool ok = laplace_sum / 3.0 <= default_sum / 3.0;
  detail << "mean " << laplace_sum / 3.0 << " vs " << default_sum / 3.0;
  report(10, "laplace-noise sharing does not beat secure sharing (3 seeds)",
         ok, seconds, detail.str());
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: dgrec_acceptance <path-to-cli>\n";
    return 2;
  }
  const std::string cli = argv[1];
  const auto scratch = scratch_dir();

  criterion_1_budget_anchor(cli);
  criterion_2_unbiasedness();
  criterion_3_rdp_bound();
  criterion_4_gradient_check();
  criterion_5_propagation_coverage();
  criterion_6_communication_accounting();
  criterion_7_end_to_end_learning(scratch);
  criterion_8_sampling_distribution();
  criterion_9_determinism(scratch);
  criterion_10_ablation_direction(scratch);

  std::filesystem::remove_all(scratch);

  int failed = 0;
  for (const auto& c : g_results) failed += c.passed ? 0 : 1;
  std::cout << (g_results.size() - static_cast<std::size_t>(failed)) << "/"
            << g_results.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
