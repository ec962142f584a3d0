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

#ifndef DGREC_GRAPH_HPP_
#define DGREC_GRAPH_HPP_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace dgrec {

using UserId = std::int64_t;
using ItemId = std::int64_t;

// Hyperedge identifier. Non-negative values are shared tags; a negative
// value encodes the singleton self-edge attached to an otherwise tagless
// item, so every item keeps a positive degree.
using TagId = std::int64_t;

inline TagId self_tag_for(ItemId item) { return -item - 1; }
inline bool is_self_tag(TagId tag) { return tag < 0; }

// Undirected global user graph. Immutable once built; safe to share
// read-only across parallel per-user computations.
class InterUserGraph {
 public:
  // Builds the graph from unordered user pairs. Duplicate edges collapse,
  // self-loops are rejected. `isolated_users` adds vertices that appear in
  // no edge.
  static InterUserGraph from_edges(
      std::span<const std::pair<UserId, UserId>> edges,
      std::span<const UserId> isolated_users = {});

  const std::vector<UserId>& users() const { return users_; }
  bool contains(UserId u) const { return adjacency_.count(u) != 0; }

  // Sorted neighbor list; throws if `u` is not a vertex.
  const std::vector<UserId>& neighbors(UserId u) const;

  std::size_t num_users() const { return users_.size(); }
  std::size_t num_edges() const { return num_edges_; }

 private:
  std::vector<UserId> users_;
  std::map<UserId, std::vector<UserId>> adjacency_;
  std::size_t num_edges_ = 0;
};

// Per-user item/tag incidence structure. Items are the owner's own items
// plus the publicized items of 1-hop neighbors; hyperedges are tags.
// Incidence is kept row-compressed; dense realizations are produced on
// demand (per-user graphs are small at simulation scale).
class ItemHypergraph {
 public:
  UserId owner() const { return owner_; }
  const std::vector<ItemId>& items() const { return items_; }
  const std::vector<TagId>& tags() const { return tags_; }
  std::size_t num_items() const { return items_.size(); }
  std::size_t num_tags() const { return tags_.size(); }

  // Sorted tag-column indexes per item row.
  const std::vector<std::vector<std::int32_t>>& rows() const { return rows_; }

  double item_degree(std::size_t item_idx) const {
    return static_cast<double>(rows_[item_idx].size());
  }
  double tag_degree(std::size_t tag_idx) const {
    return static_cast<double>(tag_counts_[tag_idx]);
  }

  Eigen::MatrixXd dense_incidence() const;

  // Items that received a synthetic self-edge because they had no tags.
  const std::vector<ItemId>& self_tagged_items() const {
    return self_tagged_;
  }

  friend ItemHypergraph build_item_hypergraph(
      UserId owner, std::span<const ItemId> own_items,
      const std::map<UserId, std::vector<ItemId>>& neighbor_public,
      const std::map<ItemId, std::vector<TagId>>& item_tags);

 private:
  UserId owner_ = 0;
  std::vector<ItemId> items_;                     // sorted
  std::vector<TagId> tags_;                       // sorted
  std::vector<std::vector<std::int32_t>> rows_;   // per item, sorted columns
  std::vector<std::int64_t> tag_counts_;
  std::vector<ItemId> self_tagged_;
};

// Union of the owner's items and neighbors' publicized items, with the
// incidence restricted to tags that occur on those items. Items, tags and
// incidence columns come out in globally sorted id order, so construction
// is order-insensitive in its inputs.
ItemHypergraph build_item_hypergraph(
    UserId owner, std::span<const ItemId> own_items,
    const std::map<UserId, std::vector<ItemId>>& neighbor_public,
    const std::map<ItemId, std::vector<TagId>>& item_tags);

// Symmetric nonnegative matrix D_v^{-1/2} A D_t^{-1} A^T D_v^{-1/2}.
struct NormalizedAdjacency {
  Eigen::MatrixXd matrix;
};

// Throws if any item or tag has zero degree, naming the offending id.
NormalizedAdjacency normalized_adjacency(const ItemHypergraph& h);

}  // namespace dgrec

#endif  // DGREC_GRAPH_HPP_
