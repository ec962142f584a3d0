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

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "dgrec/data.hpp"
#include "dgrec/experiment.hpp"
#include "dgrec/graph.hpp"
#include "dgrec/metrics.hpp"
#include "dgrec/privacy.hpp"
#include "dgrec/protocol.hpp"

namespace py = pybind11;

namespace {

dgrec::LogBase parse_base(const std::string& base) {
  if (base == "e") return dgrec::LogBase::kNatural;
  if (base == "10") return dgrec::LogBase::kBase10;
  throw std::invalid_argument("log_base must be 'e' or '10'");
}

dgrec::CommunicationScheme parse_scheme(const std::string& scheme) {
  if (scheme == "dgrec") return dgrec::CommunicationScheme::kDgrec;
  if (scheme == "federated") return dgrec::CommunicationScheme::kFederated;
  if (scheme == "decentralized") {
    return dgrec::CommunicationScheme::kDecentralized;
  }
  throw std::invalid_argument(
      "scheme must be dgrec, federated or decentralized");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "decentralized private recommender simulator core";

  m.def(
      "clip",
      [](const Eigen::VectorXd& g, double delta) {
        return dgrec::clip(g, delta);
      },
      py::arg("gradient"), py::arg("delta"),
      "Elementwise clamp to [-delta, delta].");

  m.def(
      "encode",
      [](const Eigen::VectorXd& g, double delta, double beta,
         std::uint64_t seed) {
        dgrec::LdpConfig cfg{delta, beta};
        dgrec::Rng rng(seed);
        const auto enc = dgrec::encode(g, cfg, rng);
        std::vector<int> bits(enc.bits.begin(), enc.bits.end());
        return bits;
      },
      py::arg("gradient"), py::arg("delta"), py::arg("beta"), py::arg("seed"),
      "One-bit Bernoulli encoding of a clipped gradient; returns +-1 ints.");

  m.def(
      "decode",
      [](const std::vector<std::vector<int>>& encodings, double delta,
         double beta) {
        dgrec::LdpConfig cfg{delta, beta};
        std::vector<dgrec::EncodedGradient> encs;
        dgrec::UserId origin = 0;
        for (const auto& bits : encodings) {
          dgrec::EncodedGradient e;
          e.origin = origin++;
          e.bits.assign(bits.begin(), bits.end());
          encs.push_back(std::move(e));
        }
        return dgrec::decode(encs, cfg);
      },
      py::arg("encodings"), py::arg("delta"), py::arg("beta"),
      "Unbiased mean-of-codes decoder.");

  m.def(
      "rdp_epsilon",
      [](std::int64_t n_s, double delta, double beta,
         const std::string& base) {
        return dgrec::rdp_epsilon(n_s, delta, beta, parse_base(base));
      },
      py::arg("n_s"), py::arg("delta"), py::arg("beta"),
      py::arg("log_base") = "e",
      "Closed-form order-1.5 RDP budget of one release.");

  m.def(
      "compose_to_dp",
      [](double per_round_epsilon, std::int64_t rounds, double gamma,
         const std::string& base) {
        return dgrec::compose_to_dp(per_round_epsilon, rounds, gamma,
                                    parse_base(base));
      },
      py::arg("per_round_epsilon"), py::arg("rounds"), py::arg("gamma"),
      py::arg("log_base") = "e",
      "Sequential composition and conversion to (epsilon', gamma)-DP.");

  m.def(
      "two_point_renyi_divergence",
      [](double g_a, double g_b, double delta, double beta,
         const std::string& base) {
        dgrec::LdpConfig cfg{delta, beta};
        return dgrec::two_point_renyi_divergence(cfg, g_a, g_b,
                                                 parse_base(base));
      },
      py::arg("g_a"), py::arg("g_b"), py::arg("delta"), py::arg("beta"),
      py::arg("log_base") = "e");

  m.def(
      "communication_cost",
      [](const std::string& scheme, int hops, int fanout, std::int64_t n_s,
         int bits_per_real) {
        return dgrec::communication_cost(parse_scheme(scheme), hops, fanout,
                                         n_s, bits_per_real);
      },
      py::arg("scheme"), py::arg("hops"), py::arg("fanout"), py::arg("n_s"),
      py::arg("bits_per_real") = 64,
      "Worst-case per-user communication bits.");

  m.def(
      "normalized_adjacency",
      [](const std::vector<std::int64_t>& items,
         const std::map<std::int64_t, std::vector<std::int64_t>>& item_tags) {
        std::map<dgrec::ItemId, std::vector<dgrec::TagId>> tags(
            item_tags.begin(), item_tags.end());
        const auto h = dgrec::build_item_hypergraph(0, items, {}, tags);
        return dgrec::normalized_adjacency(h).matrix;
      },
      py::arg("items"), py::arg("item_tags"),
      "Symmetric normalized hypergraph adjacency for an item/tag map.");

  m.def(
      "recall_at_k",
      [](const std::vector<std::int64_t>& ranking,
         const std::vector<std::int64_t>& test_items, int k) {
        return dgrec::recall_at_k(ranking, test_items, k);
      },
      py::arg("ranking"), py::arg("test_items"), py::arg("k"));

  m.def(
      "ndcg_at_k",
      [](const std::vector<std::int64_t>& ranking,
         const std::vector<std::int64_t>& test_items, int k) {
        return dgrec::ndcg_at_k(ranking, test_items, k);
      },
      py::arg("ranking"), py::arg("test_items"), py::arg("k"));

  m.def(
      "synth_dataset",
      [](int users, int items, int tags, int interactions_per_user,
         int edges_per_user, int clusters, std::uint64_t seed,
         const std::string& out_dir) {
        dgrec::SynthParams p;
        p.users = users;
        p.items = items;
        p.tags = tags;
        p.interactions_per_user = interactions_per_user;
        p.edges_per_user = edges_per_user;
        p.clusters = clusters;
        const auto ds = dgrec::synth_generate(p, seed);
        dgrec::write_tsv(ds, out_dir);
        return ds.sparsity();
      },
      py::arg("users"), py::arg("items"), py::arg("tags"),
      py::arg("interactions_per_user"), py::arg("edges_per_user"),
      py::arg("clusters"), py::arg("seed"), py::arg("out_dir"),
      "Writes a synthetic TSV dataset and returns its sparsity.");

  m.def(
      "run_experiment",
      [](const std::string& config_json, const std::string& out_dir) {
        std::vector<std::string> errors;
        const auto cfg = dgrec::ExperimentConfig::from_json(
            nlohmann::json::parse(config_json), &errors);
        if (!errors.empty()) {
          std::string msg = "invalid config:";
          for (const auto& e : errors) msg += "\n  - " + e;
          throw std::invalid_argument(msg);
        }
        const auto summary = dgrec::run_experiment(cfg, out_dir);
        return summary.to_json().dump();
      },
      py::arg("config_json"), py::arg("out_dir"),
      "Runs a full experiment; returns the summary as a JSON string.");

  m.attr("__version__") = "0.1.0";
}
