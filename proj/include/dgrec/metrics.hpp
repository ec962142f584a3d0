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

#ifndef DGREC_METRICS_HPP_
#define DGREC_METRICS_HPP_

#include <functional>
#include <span>
#include <vector>

#include "dgrec/graph.hpp"

namespace dgrec {

using ItemScorer = std::function<double(ItemId)>;

// All items except the exclusions, sorted by score descending with ties
// broken by ascending item id.
std::vector<ItemId> rank_items(const ItemScorer& scorer,
                               std::int64_t num_items,
                               std::span<const ItemId> exclude);

// |top-K intersect test| / |test|. Returns -1 for an empty test set so the
// caller can skip the user.
double recall_at_k(std::span<const ItemId> ranking,
                   std::span<const ItemId> test_items, int k);

// Binary-relevance DCG with 1/log2(rank+1) discounts, normalized by the
// ideal ordering. Returns -1 for an empty test set.
double ndcg_at_k(std::span<const ItemId> ranking,
                 std::span<const ItemId> test_items, int k);

// Per-user rankings and metrics; users with empty test sets are excluded
// from the aggregation.
struct RankingResult {
  int k = 0;
  std::vector<UserId> users;
  std::vector<std::vector<ItemId>> rankings;  // aligned with users
  std::vector<double> recall;
  std::vector<double> ndcg;
  double mean_recall = 0.0;
  double mean_ndcg = 0.0;

  // Records one user's ranking; returns false (and stores nothing) for an
  // empty test set.
  bool add(UserId user, std::vector<ItemId> ranking,
           std::span<const ItemId> test_items);
  void finalize();  // fills the means
};

}  // namespace dgrec

#endif  // DGREC_METRICS_HPP_
