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

#ifndef DGREC_DATA_HPP_
#define DGREC_DATA_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dgrec/graph.hpp"

namespace dgrec {

// In-memory dataset with interned vocabularies. Users, items and tags are
// referred to by their index in the sorted id vocabulary everywhere else
// in the system.
struct Dataset {
  std::vector<std::string> user_vocab;  // sorted external ids
  std::vector<std::string> item_vocab;
  std::vector<std::string> tag_vocab;

  std::vector<std::vector<ItemId>> interactions;  // per user, sorted
  std::vector<std::pair<UserId, UserId>> user_edges;  // deduped, a < b
  std::vector<std::vector<TagId>> item_tags;      // per item, sorted
  std::vector<std::vector<ItemId>> publicized;    // per user, sorted subset

  std::size_t num_users() const { return user_vocab.size(); }
  std::size_t num_items() const { return item_vocab.size(); }
  std::size_t num_tags() const { return tag_vocab.size(); }
  std::int64_t num_interactions() const;
  double sparsity() const;  // 1 - interactions / (users * items)

  void validate() const;  // invariants: publicized subset, ids resolve
};

// Reads edges.tsv (user<TAB>user), interactions.tsv (user<TAB>item) and
// item_tags.tsv (item<TAB>tag) from `dir`, plus optional publicized.tsv
// (user<TAB>item, must reference existing interactions). Lines starting
// with '#' and blank lines are skipped; malformed rows report file and
// line number. Duplicate rows collapse; ids intern in sorted order.
Dataset parse_tsv(const std::filesystem::path& dir);

// Inverse of parse_tsv; writing then re-parsing reproduces the dataset.
void write_tsv(const Dataset& ds, const std::filesystem::path& dir);

// Marks floor(ratio * |interactions_u|) uniformly chosen interactions of
// every user as publicized. Replaces any previous selection.
Dataset apply_publicized_ratio(Dataset ds, double ratio, std::uint64_t seed);

// Iteratively keeps only users and items with at least `min_count`
// interactions (k-core style fixpoint). min_count <= 1 is a no-op.
Dataset filter_min_interactions(Dataset ds, int min_count);

struct SplitDataset {
  std::vector<std::vector<ItemId>> train;       // per user, sorted
  std::vector<std::vector<ItemId>> validation;  // per user, sorted
  std::vector<std::vector<ItemId>> test;        // per user, sorted
  std::uint64_t seed = 0;
  std::vector<UserId> all_train_users;  // users with < 2 interactions
};

// Per-user 80/20 train/test split, then 10% of the train pool becomes
// validation (at least one training item is always kept). Users with a
// single interaction put it in train and are flagged.
SplitDataset split(const Dataset& ds, std::uint64_t seed);

struct SynthParams {
  int users = 50;
  int items = 100;
  int tags = 20;
  int interactions_per_user = 20;
  int edges_per_user = 4;
  int clusters = 2;
  double cluster_affinity = 0.85;  // probability an interaction stays in-cluster
  double edge_affinity = 0.9;      // probability an edge stays in-cluster
};

// Cluster-structured synthetic dataset: users, items and tags are assigned
// to latent clusters round-robin; interactions, tags and edges prefer the
// own cluster so that learned rankings are separable from chance.
Dataset synth_generate(const SynthParams& params, std::uint64_t seed);

}  // namespace dgrec

#endif  // DGREC_DATA_HPP_
