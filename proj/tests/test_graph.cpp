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

#include <utility>
#include <vector>

#include "dgrec/rng.hpp"
#include "doctest.h"

namespace dgrec {
namespace {

TEST_CASE("inter-user graph is symmetric and deduplicated") {
  const std::vector<std::pair<UserId, UserId>> edges{{1, 2}};
  const auto g = InterUserGraph::from_edges(edges);
  CHECK(g.neighbors(1) == std::vector<UserId>{2});
  CHECK(g.neighbors(2) == std::vector<UserId>{1});
  CHECK(g.num_edges() == 1);

  const std::vector<std::pair<UserId, UserId>> dup{{1, 2}, {2, 1}};
  const auto g2 = InterUserGraph::from_edges(dup);
  CHECK(g2.num_edges() == 1);
  CHECK(g2.neighbors(1) == std::vector<UserId>{2});
}

TEST_CASE("inter-user graph rejects self-loops") {
  const std::vector<std::pair<UserId, UserId>> edges{{3, 3}};
  CHECK_THROWS_WITH_AS(InterUserGraph::from_edges(edges),
                       doctest::Contains("self-loop"), std::invalid_argument);
}

TEST_CASE("empty edge list keeps isolated users") {
  const std::vector<UserId> users{7, 8};
  const auto g = InterUserGraph::from_edges({}, users);
  CHECK(g.num_users() == 2);
  CHECK(g.num_edges() == 0);
  CHECK(g.neighbors(7).empty());
}

TEST_CASE("symmetry holds for every endpoint") {
  const std::vector<std::pair<UserId, UserId>> edges{
      {0, 1}, {1, 2}, {2, 0}, {3, 1}};
  const auto g = InterUserGraph::from_edges(edges);
  for (UserId u : g.users()) {
    for (UserId v : g.neighbors(u)) {
      const auto& back = g.neighbors(v);
      CHECK(std::find(back.begin(), back.end(), u) != back.end());
      CHECK(v != u);
    }
  }
}

TEST_CASE("hypergraph from a single own item") {
  std::map<ItemId, std::vector<TagId>> tags{{1, {10}}};
  const std::vector<ItemId> own{1};
  const auto h = build_item_hypergraph(0, own, {}, tags);
  CHECK(h.items() == std::vector<ItemId>{1});
  CHECK(h.num_tags() == 1);
  CHECK(h.dense_incidence() == Eigen::MatrixXd::Ones(1, 1));
}

TEST_CASE("hypergraph unions own and publicized items") {
  std::map<ItemId, std::vector<TagId>> tags{{1, {10}}, {2, {10}}};
  std::map<UserId, std::vector<ItemId>> pub{{5, {2}}};
  const std::vector<ItemId> own{1};
  const auto h = build_item_hypergraph(0, own, pub, tags);
  CHECK(h.items() == std::vector<ItemId>{1, 2});
  const Eigen::MatrixXd a = h.dense_incidence();
  CHECK(a.rows() == 2);
  CHECK(a.cols() == 1);
  CHECK(a(0, 0) == 1.0);
  CHECK(a(1, 0) == 1.0);
}

TEST_CASE("hypergraph degrees count rows and columns") {
  // two items, tags {t1,t2} and {t2}: deg(i1)=2, deg(t2)=2
  std::map<ItemId, std::vector<TagId>> tags{{1, {10, 11}}, {2, {11}}};
  const std::vector<ItemId> own{1, 2};
  const auto h = build_item_hypergraph(0, own, {}, tags);
  CHECK(h.item_degree(0) == 2.0);
  CHECK(h.item_degree(1) == 1.0);
  const auto& cols = h.tags();
  const auto t2 = static_cast<std::size_t>(
      std::find(cols.begin(), cols.end(), 11) - cols.begin());
  CHECK(h.tag_degree(t2) == 2.0);
}

TEST_CASE("tagless items receive a singleton self-edge") {
  std::map<ItemId, std::vector<TagId>> tags{{1, {10}}};
  const std::vector<ItemId> own{1, 2};
  const auto h = build_item_hypergraph(0, own, {}, tags);
  CHECK(h.self_tagged_items() == std::vector<ItemId>{2});
  CHECK(h.item_degree(1) == 1.0);  // item 2 row
  CHECK_NOTHROW(normalized_adjacency(h));
}

TEST_CASE("hypergraph construction is order-insensitive") {
  std::map<ItemId, std::vector<TagId>> tags{
      {1, {10, 11}}, {2, {11}}, {3, {12}}};
  const std::vector<ItemId> own_a{3, 1, 2};
  const std::vector<ItemId> own_b{1, 2, 3};
  const auto ha = build_item_hypergraph(0, own_a, {}, tags);
  const auto hb = build_item_hypergraph(0, own_b, {}, tags);
  CHECK(ha.items() == hb.items());
  CHECK(ha.tags() == hb.tags());
  CHECK(ha.dense_incidence() == hb.dense_incidence());
}

TEST_CASE("normalized adjacency on a single item") {
  std::map<ItemId, std::vector<TagId>> tags{{1, {10}}};
  const std::vector<ItemId> own{1};
  const auto h = build_item_hypergraph(0, own, {}, tags);
  const auto adj = normalized_adjacency(h);
  CHECK(adj.matrix.rows() == 1);
  CHECK(adj.matrix(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("two items sharing one tag mix evenly") {
  std::map<ItemId, std::vector<TagId>> tags{{1, {10}}, {2, {10}}};
  const std::vector<ItemId> own{1, 2};
  const auto adj = normalized_adjacency(build_item_hypergraph(0, own, {}, tags));
  for (Eigen::Index r = 0; r < 2; ++r) {
    for (Eigen::Index c = 0; c < 2; ++c) {
      CHECK(adj.matrix(r, c) == doctest::Approx(0.5));
    }
  }
}

TEST_CASE("disjoint tags give the identity") {
  std::map<ItemId, std::vector<TagId>> tags{{1, {10}}, {2, {11}}};
  const std::vector<ItemId> own{1, 2};
  const auto adj = normalized_adjacency(build_item_hypergraph(0, own, {}, tags));
  CHECK(adj.matrix.isApprox(Eigen::MatrixXd::Identity(2, 2), 1e-12));
}

TEST_CASE("normalized adjacency is symmetric nonnegative with tag-share support") {
  // random hypergraphs; entry (i,j) is nonzero iff the items share a tag
  Rng rng(13);
  for (int trial = 0; trial < 25; ++trial) {
    const int n_items = 2 + static_cast<int>(rng.uniform_index(6));
    const int n_tags = 1 + static_cast<int>(rng.uniform_index(4));
    std::map<ItemId, std::vector<TagId>> tags;
    std::vector<ItemId> own;
    for (int i = 0; i < n_items; ++i) {
      own.push_back(i);
      std::vector<TagId> ts;
      for (int t = 0; t < n_tags; ++t) {
        if (rng.bernoulli(0.5)) ts.push_back(t);
      }
      tags[i] = ts;  // possibly empty -> self-edge
    }
    const auto h = build_item_hypergraph(0, own, {}, tags);
    const auto adj = normalized_adjacency(h);
    const auto& m = adj.matrix;
    CHECK((m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK(m.minCoeff() >= 0.0);
    const Eigen::MatrixXd inc = h.dense_incidence();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        const bool share = (inc.row(i).cwiseProduct(inc.row(j))).sum() > 0.0;
        CHECK((m(i, j) != 0.0) == share);
      }
    }
  }
}

}  // namespace
}  // namespace dgrec
