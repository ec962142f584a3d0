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

#ifndef DGREC_PROTOCOL_HPP_
#define DGREC_PROTOCOL_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <vector>

#include "dgrec/model.hpp"
#include "dgrec/privacy.hpp"

namespace dgrec {

// --- neighbor sampling ----------------------------------------------------

// Per-user inputs of the loss-weighted sampling probability: last recorded
// training loss and completed training iterations. Users that never
// trained keep the prior loss ln 2 (pairwise ranking at indifference).
struct LossCount {
  double loss = 0.6931471805599453;
  std::int64_t count = 0;
};

// p_v proportional to loss_v / (ln(count_v + 1) + 1), normalized to sum 1.
// An all-zero weight vector falls back to uniform and raises the flag.
std::vector<double> sample_probabilities(std::span<const LossCount> entries,
                                         bool* uniform_fallback = nullptr);

// Symmetric sampled sub-neighborhood around an initiator.
struct SampledNeighborhood {
  UserId initiator = 0;
  std::map<UserId, std::set<UserId>> sampled;  // symmetric adjacency
  std::vector<UserId> participants;            // sorted; nonempty N^s + initiator
  bool isolated_initiator = false;
  bool used_uniform_fallback = false;

  bool is_participant(UserId u) const;
  const std::set<UserId>& neighbors_of(UserId u) const;

  // Builds a neighborhood directly from symmetric edge pairs (fixtures and
  // tests); participants are the endpoints plus the initiator.
  static SampledNeighborhood from_edges(
      UserId initiator, std::span<const std::pair<UserId, UserId>> edges);
};

// Frontier expansion for `hops` hops; every popped user draws up to
// `fanout` of its graph neighbors without replacement with the
// loss-weighted probabilities. Sampled pairs are recorded symmetrically.
// Users missing from `weights` use LossCount defaults.
SampledNeighborhood neighbor_sampling(
    const InterUserGraph& graph, const std::map<UserId, LossCount>& weights,
    UserId initiator, int hops, int fanout, Rng& rng);

// --- gradient propagation ---------------------------------------------------

// (sender, receiver, wire bytes, training round) tuples of the simulated
// bus; every link delivery is one record.
struct BusRecord {
  UserId sender = 0;
  UserId receiver = 0;
  std::uint64_t bytes = 0;
  std::int64_t round = 0;
};

class MessageBus {
 public:
  void record(const BusRecord& r) { trace_.push_back(r); }
  const std::vector<BusRecord>& trace() const { return trace_; }
  std::uint64_t total_bytes() const;
  void write_csv(std::ostream& os) const;

 private:
  std::vector<BusRecord> trace_;
};

// Per-propagation payload accounting. A user's send in one step is one
// broadcast over its sampled links, so its payload is counted once per
// step regardless of degree; the per-link deliveries land in the bus
// trace instead.
struct PropagationStats {
  int steps = 0;  // 2H
  std::map<UserId, std::uint64_t> payload_bits_sent;
  std::map<UserId, std::uint64_t> max_step_payload_bits;

  // Worst-case envelope: every step as heavy as the heaviest observed
  // broadcast. On a full fanout-ary sampling tree this meets the
  // closed-form bound exactly.
  std::uint64_t worst_case_per_user_bits() const;
};

// 2H synchronized steps: every participant sends its current set to its
// sampled neighbors and unions what it received, deduplicated by origin.
// All sends of a step observe the state at the start of the step. Throws
// if any participant lacks an initial encoding.
std::map<UserId, std::vector<EncodedGradient>> propagate(
    const std::map<UserId, EncodedGradient>& encoded,
    const SampledNeighborhood& nbhd, int hops,
    PropagationStats* stats = nullptr, MessageBus* bus = nullptr,
    std::int64_t training_round = 0);

// Real-valued shared gradient, used by the Laplace-noise sharing variant.
struct SharedGradient {
  Eigen::VectorXd values;
  UserId origin = 0;
  std::int32_t round = 0;

  std::uint64_t payload_bits() const {
    return static_cast<std::uint64_t>(values.size()) * 64;
  }
  std::size_t wire_bytes() const {
    return 16 + static_cast<std::size_t>(values.size()) * 8;
  }
};

std::map<UserId, std::vector<SharedGradient>> propagate_shared(
    const std::map<UserId, SharedGradient>& shared,
    const SampledNeighborhood& nbhd, int hops,
    PropagationStats* stats = nullptr, MessageBus* bus = nullptr,
    std::int64_t training_round = 0);

// --- communication cost -----------------------------------------------------

enum class CommunicationScheme { kDgrec, kFederated, kDecentralized };

// Closed-form worst-case per-user bits. The geometric series
// (1 - fanout^hops) / (1 - fanout) evaluates to `hops` when fanout is 1.
// kDgrec: 2 * hops * n_s * series; the others: bits_per_real * n_s * series.
std::uint64_t communication_cost(CommunicationScheme scheme, int hops,
                                 int fanout, std::int64_t n_s,
                                 int bits_per_real = 64);

// Accumulates payload-bit counters across training rounds.
class CostMeter {
 public:
  void absorb(const PropagationStats& stats);
  const std::map<UserId, std::uint64_t>& bits_sent() const {
    return bits_sent_;
  }
  std::uint64_t total_payload_bits() const { return total_; }

 private:
  std::map<UserId, std::uint64_t> bits_sent_;
  std::uint64_t total_ = 0;
};

// --- training state and round ------------------------------------------------

struct UserState {
  LocalModel model;
  ItemHypergraph hypergraph;
  NormalizedAdjacency adjacency;
  bool has_hypergraph = false;
  std::vector<ItemId> train_items;  // sorted training positives
  double last_loss = 0.6931471805599453;
  std::int64_t train_count = 0;

  explicit UserState(LocalModel m) : model(std::move(m)) {}
  UserView view() const;
  bool trainable(std::int64_t num_items) const;
};

class TrainingState {
 public:
  explicit TrainingState(std::uint64_t seed) : seed_(seed) {}

  UserState& add_user(UserId u, LocalModel model);
  UserState& user(UserId u);
  const UserState& user(UserId u) const;
  bool has_user(UserId u) const { return users_.count(u) != 0; }
  const std::map<UserId, UserState>& users() const { return users_; }
  std::map<UserId, UserState>& users() { return users_; }

  std::map<UserId, LossCount> loss_counts() const;

  std::uint64_t seed() const { return seed_; }
  std::int64_t round() const { return round_; }
  void advance_round() { ++round_; }

 private:
  std::uint64_t seed_;
  std::int64_t round_ = 0;
  std::map<UserId, UserState> users_;
};

struct TrainOptions {
  int hops = 4;
  int fanout = 3;
  double learning_rate = 0.01;
  double lambda = 1e-3;
  int negatives_per_positive = 1;
  bool include_pearson = true;
  bool reclip_decoded = false;
  int workers = 0;  // 0/1: single-threaded; >1: deterministic worker pool

  enum class Sharing { kOneBit, kLaplace };
  Sharing sharing = Sharing::kOneBit;
  double laplace_scale = 0.1;
};

struct TrainingRoundReport {
  std::vector<UserId> participants;
  std::vector<UserId> trained;
  std::vector<UserId> skipped;  // sampled but without usable training data
  bool isolated_initiator = false;
  double mean_loss = 0.0;  // over trained participants
};

// One global step: sample the neighborhood, let every trainable
// participant compute and share its gradient, propagate for 2H steps,
// then decode and apply one SGD update per participant.
TrainingRoundReport training_round(TrainingState& state,
                                   const InterUserGraph& graph,
                                   UserId initiator, const TrainOptions& opts,
                                   const LdpConfig& ldp,
                                   PrivacyAccountant* accountant = nullptr,
                                   CostMeter* meter = nullptr,
                                   MessageBus* bus = nullptr);

}  // namespace dgrec

#endif  // DGREC_PROTOCOL_HPP_
