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

#ifndef DGREC_MODEL_HPP_
#define DGREC_MODEL_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dgrec/graph.hpp"
#include "dgrec/rng.hpp"

namespace dgrec {

// Preference pipeline variants. kFull is the default; the others back the
// ablation switches.
enum class PreferenceVariant {
  kFull,           // hypergraph -> interests -> graph-structured attention
  kNoAttention,    // plain softmax attention pooling, no adjacency term
  kMeanEmbedding,  // preference = mean of the user's own item embeddings
};

struct ModelConfig {
  std::int64_t num_items = 0;  // global item vocabulary size
  int embed_dim = 16;          // item embedding width
  int interest_dim = 10;       // interest embedding width
  int num_interests = 6;       // interest nodes after condensation
  int hidden_dim = 16;         // MLP hidden width
  PreferenceVariant variant = PreferenceVariant::kFull;
  bool squared_l2 = false;     // use ||theta||^2 instead of ||theta||
  double variance_floor = 1e-8;

  int preference_dim() const {
    return variant == PreferenceVariant::kMeanEmbedding ? embed_dim
                                                        : interest_dim;
  }
  void validate() const;
};

struct ParamBlock {
  std::string name;
  Eigen::Index offset = 0;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  Eigen::Index size() const { return rows * cols; }
};

// Fixed flat ordering of the trainable blocks for a given config. The
// whole parameter set lives in one contiguous vector so gradients can be
// shared as flat vectors of equal length across users.
class ParamLayout {
 public:
  explicit ParamLayout(const ModelConfig& cfg);

  Eigen::Index total() const { return total_; }
  const std::vector<ParamBlock>& blocks() const { return blocks_; }
  const ParamBlock& block(std::string_view name) const;
  bool has_block(std::string_view name) const;

 private:
  std::vector<ParamBlock> blocks_;
  Eigen::Index total_ = 0;
};

// Per-user preference model over the global item vocabulary. Parameters
// are stored flat; block accessors return Eigen maps into that storage.
class LocalModel {
 public:
  explicit LocalModel(const ModelConfig& cfg);

  const ModelConfig& config() const { return cfg_; }
  const ParamLayout& layout() const { return layout_; }

  // Entrywise uniform(-scale, scale) initialization.
  void init_uniform(Rng& rng, double scale = 0.1);

  const Eigen::VectorXd& params() const { return params_; }
  void set_params(const Eigen::VectorXd& theta);
  Eigen::VectorXd& mutable_params() { return params_; }

  Eigen::Map<const Eigen::MatrixXd> block(std::string_view name) const;
  Eigen::Map<Eigen::MatrixXd> mutable_block(std::string_view name);

  Eigen::Map<const Eigen::MatrixXd> item_embeddings() const {
    return block("item_embeddings");
  }

 private:
  ModelConfig cfg_;
  ParamLayout layout_;
  Eigen::VectorXd params_;
};

// Immutable per-user training context: the item structure the preference
// pipeline reads plus the user's own training positives.
struct UserView {
  const ItemHypergraph* hypergraph = nullptr;      // unused by kMeanEmbedding
  const NormalizedAdjacency* adjacency = nullptr;  // paired with hypergraph
  std::vector<ItemId> own_items;                   // sorted
};

struct BatchPair {
  ItemId pos = 0;
  ItemId neg = 0;
};

struct LossBreakdown {
  double bpr = 0.0;
  double pearson = 0.0;
  double l2 = 0.0;
  double total = 0.0;
};

struct CondensedInterestGraph {
  Eigen::MatrixXd interest_embeddings;  // num_interests x interest_dim
  Eigen::MatrixXd interest_adjacency;   // num_interests x num_interests
  Eigen::MatrixXd assignment;           // |V_u| x num_interests, row-softmax
};

// --- pipeline building blocks -------------------------------------------

// E' = adj * E_u * w_aggregate, S = row_softmax(adj * E_u * w_assign).
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> aggregate_and_assign(
    const NormalizedAdjacency& adj, const Eigen::MatrixXd& item_features,
    const Eigen::MatrixXd& w_aggregate, const Eigen::MatrixXd& w_assign);

// interests = S^T E', interest adjacency = S^T adj S.
CondensedInterestGraph condense(const Eigen::MatrixXd& assignment,
                                const Eigen::MatrixXd& aggregated,
                                const NormalizedAdjacency& adj);

// Mean pairwise Pearson correlation across interest rows, diagonal terms
// included (each exactly 1). Rows whose variance falls below the floor
// are reported through `floored`.
double pearson_loss(const Eigen::MatrixXd& interest_embeddings,
                    double variance_floor = 1e-8, bool* floored = nullptr);

// Scores every interest against its neighbors and pools with softmax
// weights; the result lies in the convex hull of the interest rows.
Eigen::VectorXd interest_attention(const CondensedInterestGraph& cg,
                                   const Eigen::VectorXd& w_score,
                                   const Eigen::VectorXd& w_self,
                                   const Eigen::VectorXd& w_neighbor);

// MLP score for a (preference, item embedding) pair.
double predict(const LocalModel& model, const Eigen::VectorXd& preference,
               const Eigen::VectorXd& item_embedding);
double predict(const LocalModel& model, const Eigen::VectorXd& preference,
               ItemId item);

// (1/n_pos) * sum of -log sigmoid(pos - neg) over aligned score pairs.
double bpr_loss(std::span<const double> pos_scores,
                std::span<const double> neg_scores, std::size_t n_pos);

LossBreakdown local_loss(double bpr, double pearson, double lambda,
                         const Eigen::VectorXd& theta, bool squared_l2);

// --- full pipeline -------------------------------------------------------

struct ForwardResult {
  LossBreakdown loss;
  Eigen::VectorXd preference;
};

// Runs the preference pipeline only (no batch); used for ranking.
Eigen::VectorXd compute_preference(const LocalModel& model,
                                   const UserView& view);

ForwardResult forward(const LocalModel& model, const UserView& view,
                      std::span<const BatchPair> batch, double lambda,
                      bool include_pearson = true);

// Flat d(total loss)/d(theta) by reverse accumulation through the fixed
// pipeline. Entries of parameters the batch never touches are zero for
// lambda = 0. Throws if any block comes out non-finite.
Eigen::VectorXd compute_local_gradients(const LocalModel& model,
                                        const UserView& view,
                                        std::span<const BatchPair> batch,
                                        double lambda,
                                        bool include_pearson = true,
                                        LossBreakdown* loss_out = nullptr);

}  // namespace dgrec

#endif  // DGREC_MODEL_HPP_
