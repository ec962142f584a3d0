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

#include "dgrec/graph.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace dgrec {

InterUserGraph InterUserGraph::from_edges(
    std::span<const std::pair<UserId, UserId>> edges,
    std::span<const UserId> isolated_users) {
  InterUserGraph g;
  std::map<UserId, std::set<UserId>> adj;
  for (UserId u : isolated_users) adj.try_emplace(u);
  for (const auto& [a, b] : edges) {
    if (a == b) {
      throw std::invalid_argument("self-loop edge (" + std::to_string(a) +
                                  ", " + std::to_string(b) + ") rejected");
    }
    adj[a].insert(b);
    adj[b].insert(a);
  }
  for (auto& [u, nbrs] : adj) {
    g.users_.push_back(u);
    g.adjacency_.emplace(u, std::vector<UserId>(nbrs.begin(), nbrs.end()));
    g.num_edges_ += nbrs.size();
  }
  g.num_edges_ /= 2;
  return g;
}

const std::vector<UserId>& InterUserGraph::neighbors(UserId u) const {
  auto it = adjacency_.find(u);
  if (it == adjacency_.end()) {
    throw std::out_of_range("unknown user " + std::to_string(u));
  }
  return it->second;
}

ItemHypergraph build_item_hypergraph(
    UserId owner, std::span<const ItemId> own_items,
    const std::map<UserId, std::vector<ItemId>>& neighbor_public,
    const std::map<ItemId, std::vector<TagId>>& item_tags) {
  ItemHypergraph h;
  h.owner_ = owner;

  std::set<ItemId> item_set(own_items.begin(), own_items.end());
  for (const auto& [v, pub] : neighbor_public) {
    item_set.insert(pub.begin(), pub.end());
  }
  h.items_.assign(item_set.begin(), item_set.end());

  // Tag columns: tags occurring on the collected items, plus one singleton
  // self-edge per tagless item.
  std::set<TagId> tag_set;
  for (ItemId i : h.items_) {
    auto it = item_tags.find(i);
    if (it == item_tags.end() || it->second.empty()) {
      tag_set.insert(self_tag_for(i));
      h.self_tagged_.push_back(i);
    } else {
      tag_set.insert(it->second.begin(), it->second.end());
    }
  }
  h.tags_.assign(tag_set.begin(), tag_set.end());

  std::map<TagId, std::int32_t> tag_index;
  for (std::size_t c = 0; c < h.tags_.size(); ++c) {
    tag_index[h.tags_[c]] = static_cast<std::int32_t>(c);
  }

  h.rows_.resize(h.items_.size());
  h.tag_counts_.assign(h.tags_.size(), 0);
  for (std::size_t r = 0; r < h.items_.size(); ++r) {
    const ItemId i = h.items_[r];
    auto it = item_tags.find(i);
    if (it == item_tags.end() || it->second.empty()) {
      h.rows_[r].push_back(tag_index.at(self_tag_for(i)));
    } else {
      std::set<TagId> uniq(it->second.begin(), it->second.end());
      for (TagId t : uniq) h.rows_[r].push_back(tag_index.at(t));
    }
    for (std::int32_t c : h.rows_[r]) ++h.tag_counts_[c];
  }
  return h;
}

Eigen::MatrixXd ItemHypergraph::dense_incidence() const {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(
      static_cast<Eigen::Index>(items_.size()),
      static_cast<Eigen::Index>(tags_.size()));
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    for (std::int32_t c : rows_[r]) {
      a(static_cast<Eigen::Index>(r), c) = 1.0;
    }
  }
  return a;
}

NormalizedAdjacency normalized_adjacency(const ItemHypergraph& h) {
  const auto n = static_cast<Eigen::Index>(h.num_items());
  for (std::size_t r = 0; r < h.num_items(); ++r) {
    if (h.item_degree(r) <= 0.0) {
      throw std::invalid_argument("item " + std::to_string(h.items()[r]) +
                                  " has zero degree");
    }
  }
  for (std::size_t c = 0; c < h.num_tags(); ++c) {
    if (h.tag_degree(c) <= 0.0) {
      throw std::invalid_argument("tag " + std::to_string(h.tags()[c]) +
                                  " has zero degree");
    }
  }

  const Eigen::MatrixXd a = h.dense_incidence();
  Eigen::VectorXd dv_isqrt(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    dv_isqrt(r) = 1.0 / std::sqrt(h.item_degree(static_cast<std::size_t>(r)));
  }
  Eigen::VectorXd dt_inv(static_cast<Eigen::Index>(h.num_tags()));
  for (Eigen::Index c = 0; c < dt_inv.size(); ++c) {
    dt_inv(c) = 1.0 / h.tag_degree(static_cast<std::size_t>(c));
  }

  const Eigen::MatrixXd scaled = dv_isqrt.asDiagonal() * a;
  NormalizedAdjacency out;
  out.matrix = scaled * dt_inv.asDiagonal() * scaled.transpose();
  return out;
}

}  // namespace dgrec
