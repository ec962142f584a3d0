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

#include "dgrec/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace dgrec {

std::vector<ItemId> rank_items(const ItemScorer& scorer,
                               std::int64_t num_items,
                               std::span<const ItemId> exclude) {
  const std::set<ItemId> excluded(exclude.begin(), exclude.end());
  std::vector<std::pair<double, ItemId>> scored;
  scored.reserve(static_cast<std::size_t>(num_items));
  for (ItemId i = 0; i < num_items; ++i) {
    if (excluded.count(i) != 0) continue;
    scored.emplace_back(scorer(i), i);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::vector<ItemId> out;
  out.reserve(scored.size());
  for (const auto& [s, i] : scored) out.push_back(i);
  return out;
}

double recall_at_k(std::span<const ItemId> ranking,
                   std::span<const ItemId> test_items, int k) {
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  if (test_items.empty()) return -1.0;
  const std::set<ItemId> test(test_items.begin(), test_items.end());
  const std::size_t top =
      std::min(ranking.size(), static_cast<std::size_t>(k));
  std::size_t hits = 0;
  for (std::size_t r = 0; r < top; ++r) {
    if (test.count(ranking[r]) != 0) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(test.size());
}

bool RankingResult::add(UserId user, std::vector<ItemId> ranking,
                        std::span<const ItemId> test_items) {
  if (test_items.empty()) return false;
  recall.push_back(recall_at_k(ranking, test_items, k));
  ndcg.push_back(ndcg_at_k(ranking, test_items, k));
  users.push_back(user);
  rankings.push_back(std::move(ranking));
  return true;
}

void RankingResult::finalize() {
  mean_recall = 0.0;
  mean_ndcg = 0.0;
  if (users.empty()) return;
  for (double r : recall) mean_recall += r;
  for (double n : ndcg) mean_ndcg += n;
  mean_recall /= static_cast<double>(users.size());
  mean_ndcg /= static_cast<double>(users.size());
}

double ndcg_at_k(std::span<const ItemId> ranking,
                 std::span<const ItemId> test_items, int k) {
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  if (test_items.empty()) return -1.0;
  const std::set<ItemId> test(test_items.begin(), test_items.end());
  const std::size_t top =
      std::min(ranking.size(), static_cast<std::size_t>(k));
  double dcg = 0.0;
  for (std::size_t r = 0; r < top; ++r) {
    if (test.count(ranking[r]) != 0) {
      dcg += 1.0 / std::log2(static_cast<double>(r) + 2.0);
    }
  }
  const std::size_t ideal =
      std::min(test.size(), static_cast<std::size_t>(k));
  double idcg = 0.0;
  for (std::size_t r = 0; r < ideal; ++r) {
    idcg += 1.0 / std::log2(static_cast<double>(r) + 2.0);
  }
  return idcg > 0.0 ? dcg / idcg : 0.0;
}

}  // namespace dgrec
