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
#include <map>
#include <vector>

#include "dgrec/rng.hpp"
#include "doctest.h"

namespace dgrec {
namespace {

TEST_CASE("rank_items sorts by score with id tie-break") {
  // constant scorer: ranking is sorted item ids
  const auto constant = rank_items([](ItemId) { return 1.0; }, 5, {});
  CHECK(constant == std::vector<ItemId>{0, 1, 2, 3, 4});

  // exclusions never appear
  const std::vector<ItemId> exclude{1, 3};
  const auto pruned = rank_items([](ItemId) { return 0.0; }, 5, exclude);
  CHECK(pruned == std::vector<ItemId>{0, 2, 4});

  // hand-computed three-item ordering
  std::map<ItemId, double> scores{{0, 0.2}, {1, 0.9}, {2, 0.5}};
  const auto ranked =
      rank_items([&scores](ItemId i) { return scores.at(i); }, 3, {});
  CHECK(ranked == std::vector<ItemId>{1, 2, 0});
}

TEST_CASE("recall@k frozen examples") {
  const std::vector<ItemId> ranking{5, 3, 8, 1, 9};
  CHECK(recall_at_k(ranking, std::vector<ItemId>{5, 7}, 3) ==
        doctest::Approx(0.5));
  CHECK(recall_at_k(ranking, std::vector<ItemId>{5, 3}, 2) ==
        doctest::Approx(1.0));
  CHECK(recall_at_k(ranking, std::vector<ItemId>{7, 6}, 3) ==
        doctest::Approx(0.0));
  CHECK(recall_at_k(ranking, {}, 3) == doctest::Approx(-1.0));  // skip marker
}

TEST_CASE("ndcg@k frozen examples") {
  const std::vector<ItemId> ranking{5, 3, 8, 1, 9};
  CHECK(ndcg_at_k(ranking, std::vector<ItemId>{5}, 5) == doctest::Approx(1.0));
  // single test item at rank 3: 1/log2(4)
  CHECK(ndcg_at_k(ranking, std::vector<ItemId>{8}, 5) == doctest::Approx(0.5));
  CHECK(ndcg_at_k(ranking, std::vector<ItemId>{9}, 3) == doctest::Approx(0.0));
}

TEST_CASE("ndcg is 1 exactly when test items fill the top ranks") {
  const std::vector<ItemId> ranking{4, 2, 7, 1};
  CHECK(ndcg_at_k(ranking, std::vector<ItemId>{2, 4}, 4) ==
        doctest::Approx(1.0));
  CHECK(ndcg_at_k(ranking, std::vector<ItemId>{2, 7}, 4) < 1.0);
}

TEST_CASE("ranking result aggregates only users with test items") {
  RankingResult result;
  result.k = 2;
  CHECK(result.add(0, {4, 2, 7}, std::vector<ItemId>{4}));
  CHECK(result.add(1, {1, 3, 5}, std::vector<ItemId>{5}));
  CHECK_FALSE(result.add(2, {1, 2, 3}, {}));
  result.finalize();
  CHECK(result.users == std::vector<UserId>{0, 1});
  CHECK(result.rankings.size() == 2);
  CHECK(result.mean_recall == doctest::Approx(0.5));  // (1.0 + 0.0) / 2
  for (double r : result.recall) {
    CHECK(r >= 0.0);
    CHECK(r <= 1.0);
  }
}

TEST_CASE("moving a test item up never hurts either metric") {
  Rng rng(55);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<ItemId> ranking(20);
    for (int i = 0; i < 20; ++i) ranking[static_cast<std::size_t>(i)] = i;
    rng.shuffle(ranking);
    std::vector<ItemId> test{ranking[15], ranking[4]};
    const int k = 5;
    const double r0 = recall_at_k(ranking, test, k);
    const double n0 = ndcg_at_k(ranking, test, k);
    // move the test item at position 15 one slot up
    std::swap(ranking[15], ranking[14]);
    CHECK(recall_at_k(ranking, test, k) >= r0);
    CHECK(ndcg_at_k(ranking, test, k) >= n0);
  }
}

}  // namespace
}  // namespace dgrec
