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

#include "dgrec/data.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

#include "dgrec/rng.hpp"

namespace dgrec {
namespace {

struct RawRow {
  std::string a;
  std::string b;
};

// Reads two-column TSV rows, skipping blanks and '#' comments. `required`
// controls whether a missing file is an error.
std::vector<RawRow> read_rows(const std::filesystem::path& file,
                              bool required) {
  std::vector<RawRow> rows;
  std::ifstream in(file);
  if (!in) {
    if (required) {
      throw std::runtime_error("cannot open " + file.string());
    }
    return rows;
  }
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size() ||
        line.find('\t', tab + 1) != std::string::npos) {
      throw std::runtime_error(file.filename().string() + ":" +
                               std::to_string(lineno) +
                               ": expected two tab-separated fields");
    }
    rows.push_back({line.substr(0, tab), line.substr(tab + 1)});
  }
  return rows;
}

std::vector<std::string> sorted_vocab(const std::set<std::string>& ids) {
  return {ids.begin(), ids.end()};
}

std::map<std::string, std::int64_t> index_of(
    const std::vector<std::string>& vocab) {
  std::map<std::string, std::int64_t> idx;
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    idx[vocab[i]] = static_cast<std::int64_t>(i);
  }
  return idx;
}

void sort_unique(std::vector<std::int64_t>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

std::int64_t Dataset::num_interactions() const {
  std::int64_t n = 0;
  for (const auto& items : interactions) {
    n += static_cast<std::int64_t>(items.size());
  }
  return n;
}

double Dataset::sparsity() const {
  if (num_users() == 0 || num_items() == 0) return 1.0;
  return 1.0 - static_cast<double>(num_interactions()) /
                   (static_cast<double>(num_users()) *
                    static_cast<double>(num_items()));
}

void Dataset::validate() const {
  if (interactions.size() != num_users() || publicized.size() != num_users()) {
    throw std::runtime_error("per-user tables do not match user vocabulary");
  }
  if (item_tags.size() != num_items()) {
    throw std::runtime_error("item_tags does not match item vocabulary");
  }
  const auto n_items = static_cast<std::int64_t>(num_items());
  const auto n_users = static_cast<std::int64_t>(num_users());
  const auto n_tags = static_cast<std::int64_t>(num_tags());
  for (std::size_t u = 0; u < num_users(); ++u) {
    for (ItemId i : interactions[u]) {
      if (i < 0 || i >= n_items) {
        throw std::runtime_error("interaction item index out of range");
      }
    }
    for (ItemId i : publicized[u]) {
      if (!std::binary_search(interactions[u].begin(), interactions[u].end(),
                              i)) {
        throw std::runtime_error("publicized item not among user " +
                                 std::to_string(u) + "'s interactions");
      }
    }
  }
  for (const auto& [a, b] : user_edges) {
    if (a < 0 || a >= n_users || b < 0 || b >= n_users || a == b) {
      throw std::runtime_error("invalid user edge");
    }
  }
  for (const auto& tags : item_tags) {
    for (TagId t : tags) {
      if (t < 0 || t >= n_tags) {
        throw std::runtime_error("tag index out of range");
      }
    }
  }
}

Dataset parse_tsv(const std::filesystem::path& dir) {
  const auto edges_rows = read_rows(dir / "edges.tsv", true);
  const auto inter_rows = read_rows(dir / "interactions.tsv", true);
  const auto tag_rows = read_rows(dir / "item_tags.tsv", true);
  const auto pub_rows = read_rows(dir / "publicized.tsv", false);

  if (inter_rows.empty()) {
    throw std::runtime_error("interactions.tsv holds no training signal");
  }

  std::set<std::string> users, items, tags;
  for (const auto& r : edges_rows) {
    users.insert(r.a);
    users.insert(r.b);
  }
  for (const auto& r : inter_rows) {
    users.insert(r.a);
    items.insert(r.b);
  }
  for (const auto& r : tag_rows) {
    items.insert(r.a);
    tags.insert(r.b);
  }

  Dataset ds;
  ds.user_vocab = sorted_vocab(users);
  ds.item_vocab = sorted_vocab(items);
  ds.tag_vocab = sorted_vocab(tags);
  const auto uidx = index_of(ds.user_vocab);
  const auto iidx = index_of(ds.item_vocab);
  const auto tidx = index_of(ds.tag_vocab);

  ds.interactions.resize(ds.num_users());
  ds.publicized.resize(ds.num_users());
  ds.item_tags.resize(ds.num_items());

  for (const auto& r : inter_rows) {
    ds.interactions[static_cast<std::size_t>(uidx.at(r.a))].push_back(
        iidx.at(r.b));
  }
  for (auto& v : ds.interactions) sort_unique(v);

  std::set<std::pair<UserId, UserId>> edge_set;
  for (const auto& r : edges_rows) {
    const UserId a = uidx.at(r.a);
    const UserId b = uidx.at(r.b);
    if (a == b) {
      throw std::runtime_error("edges.tsv: self-loop edge " + r.a);
    }
    edge_set.insert({std::min(a, b), std::max(a, b)});
  }
  ds.user_edges.assign(edge_set.begin(), edge_set.end());

  for (const auto& r : tag_rows) {
    ds.item_tags[static_cast<std::size_t>(iidx.at(r.a))].push_back(
        tidx.at(r.b));
  }
  for (auto& v : ds.item_tags) sort_unique(v);

  for (const auto& r : pub_rows) {
    auto uit = uidx.find(r.a);
    auto iit = iidx.find(r.b);
    if (uit == uidx.end() || iit == iidx.end()) {
      throw std::runtime_error("publicized.tsv: dangling id " + r.a + "\t" +
                               r.b);
    }
    ds.publicized[static_cast<std::size_t>(uit->second)].push_back(
        iit->second);
  }
  for (auto& v : ds.publicized) sort_unique(v);

  ds.validate();
  return ds;
}

void write_tsv(const Dataset& ds, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto open = [&dir](const char* name) {
    std::ofstream out(dir / name);
    if (!out) {
      throw std::runtime_error("cannot write " + (dir / name).string());
    }
    return out;
  };

  auto edges = open("edges.tsv");
  for (const auto& [a, b] : ds.user_edges) {
    edges << ds.user_vocab[static_cast<std::size_t>(a)] << '\t'
          << ds.user_vocab[static_cast<std::size_t>(b)] << '\n';
  }
  auto inter = open("interactions.tsv");
  for (std::size_t u = 0; u < ds.num_users(); ++u) {
    for (ItemId i : ds.interactions[u]) {
      inter << ds.user_vocab[u] << '\t'
            << ds.item_vocab[static_cast<std::size_t>(i)] << '\n';
    }
  }
  auto tags = open("item_tags.tsv");
  for (std::size_t i = 0; i < ds.num_items(); ++i) {
    for (TagId t : ds.item_tags[i]) {
      tags << ds.item_vocab[i] << '\t'
           << ds.tag_vocab[static_cast<std::size_t>(t)] << '\n';
    }
  }
  bool any_public = false;
  for (const auto& v : ds.publicized) any_public |= !v.empty();
  if (any_public) {
    auto pub = open("publicized.tsv");
    for (std::size_t u = 0; u < ds.num_users(); ++u) {
      for (ItemId i : ds.publicized[u]) {
        pub << ds.user_vocab[u] << '\t'
            << ds.item_vocab[static_cast<std::size_t>(i)] << '\n';
      }
    }
  }
}

Dataset apply_publicized_ratio(Dataset ds, double ratio, std::uint64_t seed) {
  if (ratio < 0.0 || ratio > 1.0) {
    throw std::invalid_argument("publicized ratio must be in [0, 1]");
  }
  for (std::size_t u = 0; u < ds.num_users(); ++u) {
    const auto& items = ds.interactions[u];
    const auto k = static_cast<std::size_t>(
        ratio * static_cast<double>(items.size()));
    std::vector<ItemId> pool = items;
    Rng rng = Rng::keyed(seed, "publicized", static_cast<std::uint64_t>(u));
    rng.shuffle(pool);
    pool.resize(k);
    std::sort(pool.begin(), pool.end());
    ds.publicized[u] = std::move(pool);
  }
  return ds;
}

Dataset filter_min_interactions(Dataset ds, int min_count) {
  if (min_count <= 1) return ds;
  const auto threshold = static_cast<std::int64_t>(min_count);
  std::vector<bool> keep_user(ds.num_users(), true);
  std::vector<bool> keep_item(ds.num_items(), true);

  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<std::int64_t> item_count(ds.num_items(), 0);
    for (std::size_t u = 0; u < ds.num_users(); ++u) {
      if (!keep_user[u]) continue;
      std::int64_t cnt = 0;
      for (ItemId i : ds.interactions[u]) {
        if (keep_item[static_cast<std::size_t>(i)]) {
          ++cnt;
          ++item_count[static_cast<std::size_t>(i)];
        }
      }
      if (cnt < threshold) {
        keep_user[u] = false;
        changed = true;
      }
    }
    for (std::size_t i = 0; i < ds.num_items(); ++i) {
      if (keep_item[i] && item_count[i] < threshold) {
        // recount without dropped users already reflected above
        keep_item[i] = false;
        changed = true;
      }
    }
  }

  Dataset out;
  std::vector<std::int64_t> user_map(ds.num_users(), -1);
  std::vector<std::int64_t> item_map(ds.num_items(), -1);
  for (std::size_t u = 0; u < ds.num_users(); ++u) {
    if (keep_user[u]) {
      user_map[u] = static_cast<std::int64_t>(out.user_vocab.size());
      out.user_vocab.push_back(ds.user_vocab[u]);
    }
  }
  for (std::size_t i = 0; i < ds.num_items(); ++i) {
    if (keep_item[i]) {
      item_map[i] = static_cast<std::int64_t>(out.item_vocab.size());
      out.item_vocab.push_back(ds.item_vocab[i]);
    }
  }
  out.tag_vocab = ds.tag_vocab;
  out.interactions.resize(out.num_users());
  out.publicized.resize(out.num_users());
  out.item_tags.resize(out.num_items());
  for (std::size_t u = 0; u < ds.num_users(); ++u) {
    if (!keep_user[u]) continue;
    const auto nu = static_cast<std::size_t>(user_map[u]);
    for (ItemId i : ds.interactions[u]) {
      if (keep_item[static_cast<std::size_t>(i)]) {
        out.interactions[nu].push_back(item_map[static_cast<std::size_t>(i)]);
      }
    }
    for (ItemId i : ds.publicized[u]) {
      if (keep_item[static_cast<std::size_t>(i)]) {
        out.publicized[nu].push_back(item_map[static_cast<std::size_t>(i)]);
      }
    }
  }
  for (std::size_t i = 0; i < ds.num_items(); ++i) {
    if (keep_item[i]) {
      out.item_tags[static_cast<std::size_t>(item_map[i])] = ds.item_tags[i];
    }
  }
  for (const auto& [a, b] : ds.user_edges) {
    const std::int64_t na = user_map[static_cast<std::size_t>(a)];
    const std::int64_t nb = user_map[static_cast<std::size_t>(b)];
    if (na >= 0 && nb >= 0) {
      out.user_edges.push_back({std::min(na, nb), std::max(na, nb)});
    }
  }
  out.validate();
  return out;
}

SplitDataset split(const Dataset& ds, std::uint64_t seed) {
  SplitDataset out;
  out.seed = seed;
  out.train.resize(ds.num_users());
  out.validation.resize(ds.num_users());
  out.test.resize(ds.num_users());

  for (std::size_t u = 0; u < ds.num_users(); ++u) {
    std::vector<ItemId> pool = ds.interactions[u];
    if (pool.size() < 2) {
      out.train[u] = pool;
      if (!pool.empty()) {
        out.all_train_users.push_back(static_cast<UserId>(u));
      }
      continue;
    }
    Rng rng = Rng::keyed(seed, "split", static_cast<std::uint64_t>(u));
    rng.shuffle(pool);
    const auto n = pool.size();
    const auto train_pool = static_cast<std::size_t>(0.8 * static_cast<double>(n));
    const auto train_n = std::max<std::size_t>(
        1, static_cast<std::size_t>(0.9 * static_cast<double>(train_pool)));
    out.train[u].assign(pool.begin(),
                        pool.begin() + static_cast<std::ptrdiff_t>(train_n));
    out.validation[u].assign(
        pool.begin() + static_cast<std::ptrdiff_t>(train_n),
        pool.begin() + static_cast<std::ptrdiff_t>(train_pool));
    out.test[u].assign(pool.begin() + static_cast<std::ptrdiff_t>(train_pool),
                       pool.end());
    std::sort(out.train[u].begin(), out.train[u].end());
    std::sort(out.validation[u].begin(), out.validation[u].end());
    std::sort(out.test[u].begin(), out.test[u].end());
  }
  return out;
}

Dataset synth_generate(const SynthParams& p, std::uint64_t seed) {
  if (p.users < 1 || p.items < 1 || p.tags < 1 || p.clusters < 1 ||
      p.interactions_per_user < 1 || p.edges_per_user < 0) {
    throw std::invalid_argument("synthetic dataset sizes must be positive");
  }
  if (p.clusters > std::min(p.items, std::min(p.users, p.tags))) {
    throw std::invalid_argument("more clusters than users, items or tags");
  }

  Dataset ds;
  const auto pad_id = [](const char* prefix, int i) {
    std::string s = std::to_string(i);
    return std::string(prefix) + std::string(4 - std::min<std::size_t>(4, s.size()), '0') + s;
  };
  for (int u = 0; u < p.users; ++u) ds.user_vocab.push_back(pad_id("u", u));
  for (int i = 0; i < p.items; ++i) ds.item_vocab.push_back(pad_id("i", i));
  for (int t = 0; t < p.tags; ++t) ds.tag_vocab.push_back(pad_id("t", t));
  ds.interactions.resize(ds.num_users());
  ds.publicized.resize(ds.num_users());
  ds.item_tags.resize(ds.num_items());

  const auto cluster_of = [&p](int idx) { return idx % p.clusters; };
  std::vector<std::vector<ItemId>> cluster_items(
      static_cast<std::size_t>(p.clusters));
  for (int i = 0; i < p.items; ++i) {
    cluster_items[static_cast<std::size_t>(cluster_of(i))].push_back(i);
  }
  std::vector<std::vector<TagId>> cluster_tags(
      static_cast<std::size_t>(p.clusters));
  for (int t = 0; t < p.tags; ++t) {
    cluster_tags[static_cast<std::size_t>(cluster_of(t))].push_back(t);
  }

  // Items carry 1-2 tags, mostly from the own cluster.
  Rng tag_rng = Rng::keyed(seed, "synth-tags");
  for (int i = 0; i < p.items; ++i) {
    const auto c = static_cast<std::size_t>(cluster_of(i));
    std::set<TagId> chosen;
    const int n_tags = 1 + static_cast<int>(tag_rng.uniform_index(2));
    while (static_cast<int>(chosen.size()) < n_tags) {
      if (p.clusters == 1 || tag_rng.bernoulli(p.cluster_affinity)) {
        chosen.insert(
            cluster_tags[c][tag_rng.uniform_index(cluster_tags[c].size())]);
      } else {
        chosen.insert(static_cast<TagId>(tag_rng.uniform_index(
            static_cast<std::size_t>(p.tags))));
      }
    }
    ds.item_tags[static_cast<std::size_t>(i)].assign(chosen.begin(),
                                                     chosen.end());
  }

  // Interactions prefer the user's cluster items.
  const int per_user = std::min(p.interactions_per_user, p.items);
  for (int u = 0; u < p.users; ++u) {
    const auto c = static_cast<std::size_t>(cluster_of(u));
    Rng rng = Rng::keyed(seed, "synth-inter", static_cast<std::uint64_t>(u));
    std::set<ItemId> chosen;
    while (static_cast<int>(chosen.size()) < per_user) {
      if (p.clusters == 1 || rng.bernoulli(p.cluster_affinity)) {
        chosen.insert(
            cluster_items[c][rng.uniform_index(cluster_items[c].size())]);
      } else {
        chosen.insert(static_cast<ItemId>(
            rng.uniform_index(static_cast<std::size_t>(p.items))));
      }
    }
    ds.interactions[static_cast<std::size_t>(u)].assign(chosen.begin(),
                                                        chosen.end());
  }

  // Edges prefer same-cluster partners.
  std::set<std::pair<UserId, UserId>> edges;
  Rng edge_rng = Rng::keyed(seed, "synth-edges");
  std::vector<std::vector<UserId>> cluster_users(
      static_cast<std::size_t>(p.clusters));
  for (int u = 0; u < p.users; ++u) {
    cluster_users[static_cast<std::size_t>(cluster_of(u))].push_back(u);
  }
  for (int u = 0; u < p.users && p.users > 1; ++u) {
    const auto c = static_cast<std::size_t>(cluster_of(u));
    int added = 0;
    int guard = 0;
    while (added < p.edges_per_user && guard++ < 100 * p.edges_per_user) {
      UserId v = 0;
      if ((p.clusters == 1 || edge_rng.bernoulli(p.edge_affinity)) &&
          cluster_users[c].size() > 1) {
        v = cluster_users[c][edge_rng.uniform_index(cluster_users[c].size())];
      } else {
        v = static_cast<UserId>(
            edge_rng.uniform_index(static_cast<std::size_t>(p.users)));
      }
      if (v == u) continue;
      const auto e = std::make_pair(std::min<UserId>(u, v),
                                    std::max<UserId>(u, v));
      if (edges.insert(e).second) ++added;
    }
  }
  ds.user_edges.assign(edges.begin(), edges.end());
  ds.validate();
  return ds;
}

}  // namespace dgrec
