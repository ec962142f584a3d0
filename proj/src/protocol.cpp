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

#include "dgrec/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace dgrec {
namespace {

constexpr double kPriorLoss = 0.6931471805599453;  // ln 2

double eq_weight(const LossCount& lc) {
  return lc.loss / (std::log(static_cast<double>(lc.count) + 1.0) + 1.0);
}

// Runs fn(i) for i in [0, n) on `workers` threads with static chunking.
// Each index writes only its own slot, so the result is order-independent.
void parallel_for(std::size_t n, int workers,
                  const std::function<void(std::size_t)>& fn) {
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
  std::vector<std::thread> threads;
  threads.reserve(k);
  for (std::size_t t = 0; t < k; ++t) {
    threads.emplace_back([&, t]() {
      for (std::size_t i = t; i < n; i += k) fn(i);
    });
  }
  for (auto& th : threads) th.join();
}

}  // namespace

std::vector<double> sample_probabilities(std::span<const LossCount> entries,
                                         bool* uniform_fallback) {
  if (uniform_fallback) *uniform_fallback = false;
  if (entries.empty()) return {};
  std::vector<double> w(entries.size());
  double total = 0.0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].loss < 0.0) {
      throw std::invalid_argument("negative loss weight");
    }
    w[i] = eq_weight(entries[i]);
    total += w[i];
  }
  if (total <= 0.0) {
    if (uniform_fallback) *uniform_fallback = true;
    std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(w.size()));
    return w;
  }
  for (double& x : w) x /= total;
  return w;
}

bool SampledNeighborhood::is_participant(UserId u) const {
  return std::binary_search(participants.begin(), participants.end(), u);
}

const std::set<UserId>& SampledNeighborhood::neighbors_of(UserId u) const {
  static const std::set<UserId> kEmpty;
  auto it = sampled.find(u);
  return it == sampled.end() ? kEmpty : it->second;
}

SampledNeighborhood SampledNeighborhood::from_edges(
    UserId initiator, std::span<const std::pair<UserId, UserId>> edges) {
  SampledNeighborhood n;
  n.initiator = initiator;
  std::set<UserId> users{initiator};
  for (const auto& [a, b] : edges) {
    if (a == b) throw std::invalid_argument("self edge in neighborhood");
    n.sampled[a].insert(b);
    n.sampled[b].insert(a);
    users.insert(a);
    users.insert(b);
  }
  n.participants.assign(users.begin(), users.end());
  n.isolated_initiator = edges.empty();
  return n;
}

SampledNeighborhood neighbor_sampling(
    const InterUserGraph& graph, const std::map<UserId, LossCount>& weights,
    UserId initiator, int hops, int fanout, Rng& rng) {
  if (!graph.contains(initiator)) {
    throw std::invalid_argument("initiator " + std::to_string(initiator) +
                                " not in graph");
  }
  if (hops < 1 || fanout < 1) {
    throw std::invalid_argument("hops and fanout must be at least 1");
  }

  SampledNeighborhood out;
  out.initiator = initiator;
  std::deque<UserId> frontier{initiator};

  const auto loss_count = [&weights](UserId u) {
    auto it = weights.find(u);
    return it == weights.end() ? LossCount{} : it->second;
  };

  for (int h = 0; h < hops; ++h) {
    std::size_t level = frontier.size();
    for (std::size_t i = 0; i < level; ++i) {
      const UserId v = frontier.front();
      frontier.pop_front();
      const auto& nbrs = graph.neighbors(v);
      if (nbrs.empty()) continue;

      // Draw up to `fanout` distinct neighbors, sequentially removing the
      // chosen one and renormalizing.
      std::vector<UserId> pool(nbrs.begin(), nbrs.end());
      std::vector<double> w(pool.size());
      for (std::size_t j = 0; j < pool.size(); ++j) {
        w[j] = eq_weight(loss_count(pool[j]));
      }
      const std::size_t draws =
          std::min<std::size_t>(static_cast<std::size_t>(fanout), pool.size());
      for (std::size_t d = 0; d < draws; ++d) {
        double total = 0.0;
        for (double x : w) total += x;
        std::size_t pick = 0;
        if (total <= 0.0) {
          out.used_uniform_fallback = true;
          pick = rng.uniform_index(pool.size());
        } else {
          const double r = rng.uniform() * total;
          double acc = 0.0;
          pick = pool.size() - 1;
          for (std::size_t j = 0; j < pool.size(); ++j) {
            acc += w[j];
            if (r < acc) {
              pick = j;
              break;
            }
          }
        }
        const UserId chosen = pool[pick];
        frontier.push_back(chosen);
        out.sampled[v].insert(chosen);
        out.sampled[chosen].insert(v);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
        w.erase(w.begin() + static_cast<std::ptrdiff_t>(pick));
      }
    }
  }

  std::set<UserId> users{initiator};
  for (const auto& [u, nbrs] : out.sampled) {
    if (!nbrs.empty()) users.insert(u);
  }
  out.participants.assign(users.begin(), users.end());
  out.isolated_initiator = out.sampled.empty();
  return out;
}

std::uint64_t MessageBus::total_bytes() const {
  std::uint64_t total = 0;
  for (const auto& r : trace_) total += r.bytes;
  return total;
}

void MessageBus::write_csv(std::ostream& os) const {
  os << "sender,receiver,bytes,round\n";
  for (const auto& r : trace_) {
    os << r.sender << ',' << r.receiver << ',' << r.bytes << ',' << r.round
       << '\n';
  }
}

std::uint64_t PropagationStats::worst_case_per_user_bits() const {
  std::uint64_t worst = 0;
  for (const auto& [u, bits] : max_step_payload_bits) {
    worst = std::max(worst, static_cast<std::uint64_t>(steps) * bits);
  }
  return worst;
}

namespace {

template <typename Payload>
std::map<UserId, std::vector<Payload>> propagate_impl(
    const std::map<UserId, Payload>& initial, const SampledNeighborhood& nbhd,
    int hops, PropagationStats* stats, MessageBus* bus,
    std::int64_t training_round) {
  if (hops < 1) throw std::invalid_argument("hops must be at least 1");
  for (UserId u : nbhd.participants) {
    if (initial.find(u) == initial.end()) {
      throw std::invalid_argument("participant " + std::to_string(u) +
                                  " supplied no encoding");
    }
  }

  // Per-user accumulated payloads keyed by origin.
  std::map<UserId, std::map<UserId, Payload>> held;
  for (UserId u : nbhd.participants) {
    held[u].emplace(initial.at(u).origin, initial.at(u));
  }

  const int steps = 2 * hops;
  if (stats) stats->steps = steps;
  for (int step = 0; step < steps; ++step) {
    const auto snapshot = held;
    for (UserId u : nbhd.participants) {
      const auto& outgoing = snapshot.at(u);
      std::uint64_t payload_bits = 0;
      std::uint64_t wire = 0;
      for (const auto& [origin, p] : outgoing) {
        payload_bits += p.payload_bits();
        wire += p.wire_bytes();
      }
      if (stats) {
        stats->payload_bits_sent[u] += payload_bits;
        auto& mx = stats->max_step_payload_bits[u];
        mx = std::max(mx, payload_bits);
      }
      for (UserId v : nbhd.neighbors_of(u)) {
        if (!nbhd.is_participant(v)) continue;
        if (bus) bus->record({u, v, wire, training_round});
        auto& inbox = held[v];
        for (const auto& [origin, p] : outgoing) {
          inbox.emplace(origin, p);  // no-op for already-held origins
        }
      }
    }
  }

  std::map<UserId, std::vector<Payload>> out;
  for (UserId u : nbhd.participants) {
    auto& vec = out[u];
    for (const auto& [origin, p] : held[u]) vec.push_back(p);
  }
  return out;
}

}  // namespace

std::map<UserId, std::vector<EncodedGradient>> propagate(
    const std::map<UserId, EncodedGradient>& encoded,
    const SampledNeighborhood& nbhd, int hops, PropagationStats* stats,
    MessageBus* bus, std::int64_t training_round) {
  return propagate_impl(encoded, nbhd, hops, stats, bus, training_round);
}

std::map<UserId, std::vector<SharedGradient>> propagate_shared(
    const std::map<UserId, SharedGradient>& shared,
    const SampledNeighborhood& nbhd, int hops, PropagationStats* stats,
    MessageBus* bus, std::int64_t training_round) {
  return propagate_impl(shared, nbhd, hops, stats, bus, training_round);
}

std::uint64_t communication_cost(CommunicationScheme scheme, int hops,
                                 int fanout, std::int64_t n_s,
                                 int bits_per_real) {
  if (hops < 1 || fanout < 1 || n_s < 1 || bits_per_real < 1) {
    throw std::invalid_argument("communication_cost arguments must be >= 1");
  }
  std::uint64_t series = 0;
  if (fanout == 1) {
    series = static_cast<std::uint64_t>(hops);
  } else {
    std::uint64_t pow = 1;
    for (int h = 0; h < hops; ++h) {
      series += pow;
      pow *= static_cast<std::uint64_t>(fanout);
    }
  }
  const auto ns = static_cast<std::uint64_t>(n_s);
  if (scheme == CommunicationScheme::kDgrec) {
    return 2ULL * static_cast<std::uint64_t>(hops) * ns * series;
  }
  return static_cast<std::uint64_t>(bits_per_real) * ns * series;
}

void CostMeter::absorb(const PropagationStats& stats) {
  for (const auto& [u, bits] : stats.payload_bits_sent) {
    bits_sent_[u] += bits;
    total_ += bits;
  }
}

UserView UserState::view() const {
  UserView v;
  if (has_hypergraph) {
    v.hypergraph = &hypergraph;
    v.adjacency = &adjacency;
  }
  v.own_items = train_items;
  return v;
}

bool UserState::trainable(std::int64_t num_items) const {
  if (train_items.empty()) return false;
  if (static_cast<std::int64_t>(train_items.size()) >= num_items) {
    return false;  // no unobserved item left to sample as a negative
  }
  if (model.config().variant != PreferenceVariant::kMeanEmbedding &&
      !has_hypergraph) {
    return false;
  }
  return true;
}

UserState& TrainingState::add_user(UserId u, LocalModel model) {
  auto [it, inserted] = users_.emplace(u, UserState(std::move(model)));
  if (!inserted) {
    throw std::invalid_argument("user " + std::to_string(u) +
                                " already present");
  }
  it->second.last_loss = kPriorLoss;
  return it->second;
}

UserState& TrainingState::user(UserId u) {
  auto it = users_.find(u);
  if (it == users_.end()) {
    throw std::out_of_range("unknown user " + std::to_string(u));
  }
  return it->second;
}

const UserState& TrainingState::user(UserId u) const {
  auto it = users_.find(u);
  if (it == users_.end()) {
    throw std::out_of_range("unknown user " + std::to_string(u));
  }
  return it->second;
}

std::map<UserId, LossCount> TrainingState::loss_counts() const {
  std::map<UserId, LossCount> out;
  for (const auto& [u, st] : users_) {
    out[u] = LossCount{st.last_loss, st.train_count};
  }
  return out;
}

namespace {

std::vector<BatchPair> build_batch(const UserState& st, std::int64_t num_items,
                                   int negatives_per_positive, Rng& rng) {
  std::vector<BatchPair> batch;
  batch.reserve(st.train_items.size() *
                static_cast<std::size_t>(negatives_per_positive));
  for (ItemId pos : st.train_items) {
    for (int k = 0; k < negatives_per_positive; ++k) {
      ItemId neg = 0;
      do {
        neg = static_cast<ItemId>(
            rng.uniform_index(static_cast<std::size_t>(num_items)));
      } while (std::binary_search(st.train_items.begin(),
                                  st.train_items.end(), neg));
      batch.push_back({pos, neg});
    }
  }
  return batch;
}

SampledNeighborhood restrict_to(const SampledNeighborhood& nbhd,
                                const std::set<UserId>& keep) {
  SampledNeighborhood out;
  out.initiator = nbhd.initiator;
  out.isolated_initiator = nbhd.isolated_initiator;
  out.used_uniform_fallback = nbhd.used_uniform_fallback;
  for (const auto& [u, nbrs] : nbhd.sampled) {
    if (keep.count(u) == 0) continue;
    for (UserId v : nbrs) {
      if (keep.count(v) != 0) out.sampled[u].insert(v);
    }
  }
  out.participants.assign(keep.begin(), keep.end());
  return out;
}

}  // namespace

TrainingRoundReport training_round(TrainingState& state,
                                   const InterUserGraph& graph,
                                   UserId initiator, const TrainOptions& opts,
                                   const LdpConfig& ldp,
                                   PrivacyAccountant* accountant,
                                   CostMeter* meter, MessageBus* bus) {
  ldp.validate();
  if (!(opts.learning_rate > 0.0)) {
    throw std::invalid_argument("learning_rate must be positive");
  }
  const std::int64_t round = state.round();
  Rng sample_rng = Rng::keyed(state.seed(), "sample",
                              static_cast<std::uint64_t>(round),
                              static_cast<std::uint64_t>(initiator));
  const SampledNeighborhood full =
      neighbor_sampling(graph, state.loss_counts(), initiator, opts.hops,
                        opts.fanout, sample_rng);

  TrainingRoundReport report;
  report.participants = full.participants;
  report.isolated_initiator = full.isolated_initiator;

  std::set<UserId> trainable;
  for (UserId u : full.participants) {
    const UserState& st = state.user(u);
    if (st.trainable(st.model.config().num_items)) {
      trainable.insert(u);
    } else {
      report.skipped.push_back(u);
    }
  }
  report.trained.assign(trainable.begin(), trainable.end());
  if (trainable.empty()) {
    state.advance_round();
    return report;
  }
  const SampledNeighborhood nbhd = restrict_to(full, trainable);

  // Every trainable participant computes its gradient on a snapshot of its
  // own model; RNG substreams are keyed per user, so parallel execution is
  // bitwise identical to serial.
  struct Slot {
    Eigen::VectorXd gradient;
    LossBreakdown loss;
  };
  std::vector<UserId> order(trainable.begin(), trainable.end());
  std::vector<Slot> slots(order.size());
  std::exception_ptr failure;
  std::mutex failure_mu;
  parallel_for(order.size(), opts.workers, [&](std::size_t i) {
    try {
      const UserId u = order[i];
      const UserState& st = state.user(u);
      Rng neg_rng = Rng::keyed(state.seed(), "negatives",
                               static_cast<std::uint64_t>(round),
                               static_cast<std::uint64_t>(u));
      const std::vector<BatchPair> batch =
          build_batch(st, st.model.config().num_items,
                      opts.negatives_per_positive, neg_rng);
      slots[i].gradient = compute_local_gradients(
          st.model, st.view(), batch, opts.lambda, opts.include_pearson,
          &slots[i].loss);
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mu);
      if (!failure) failure = std::current_exception();
    }
  });
  if (failure) std::rethrow_exception(failure);

  PropagationStats stats;
  std::map<UserId, Eigen::VectorXd> decoded;
  if (opts.sharing == TrainOptions::Sharing::kOneBit) {
    std::map<UserId, EncodedGradient> encoded;
    for (std::size_t i = 0; i < order.size(); ++i) {
      const UserId u = order[i];
      Rng enc_rng = Rng::keyed(state.seed(), "encode",
                               static_cast<std::uint64_t>(round),
                               static_cast<std::uint64_t>(u));
      encoded.emplace(u, encode(slots[i].gradient, ldp, enc_rng, u,
                                static_cast<std::int32_t>(round)));
    }
    auto collected = propagate(encoded, nbhd, opts.hops, &stats, bus, round);
    for (const auto& [u, encs] : collected) {
      Eigen::VectorXd g = decode(encs, ldp);
      if (opts.reclip_decoded) g = clip(g, ldp.clip);
      decoded.emplace(u, std::move(g));
    }
  } else {
    std::map<UserId, SharedGradient> shared;
    for (std::size_t i = 0; i < order.size(); ++i) {
      const UserId u = order[i];
      SharedGradient sg;
      sg.origin = u;
      sg.round = static_cast<std::int32_t>(round);
      sg.values = clip(slots[i].gradient, ldp.clip);
      if (opts.laplace_scale > 0.0) {
        Rng noise_rng = Rng::keyed(state.seed(), "laplace",
                                   static_cast<std::uint64_t>(round),
                                   static_cast<std::uint64_t>(u));
        for (Eigen::Index j = 0; j < sg.values.size(); ++j) {
          sg.values(j) += noise_rng.laplace(opts.laplace_scale);
        }
      }
      shared.emplace(u, std::move(sg));
    }
    auto collected =
        propagate_shared(shared, nbhd, opts.hops, &stats, bus, round);
    for (const auto& [u, grads] : collected) {
      Eigen::VectorXd mean = Eigen::VectorXd::Zero(grads.front().values.size());
      for (const auto& sg : grads) mean += sg.values;
      mean /= static_cast<double>(grads.size());
      decoded.emplace(u, std::move(mean));
    }
  }
  if (meter) meter->absorb(stats);

  double loss_sum = 0.0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const UserId u = order[i];
    UserState& st = state.user(u);
    st.model.mutable_params() -= opts.learning_rate * decoded.at(u);
    if (!st.model.params().allFinite()) {
      throw std::runtime_error("non-finite parameters after update for user " +
                               std::to_string(u));
    }
    st.last_loss = slots[i].loss.total;
    ++st.train_count;
    loss_sum += slots[i].loss.total;
  }
  report.mean_loss = loss_sum / static_cast<double>(order.size());

  if (accountant) accountant->record_round();
  state.advance_round();
  return report;
}

}  // namespace dgrec
