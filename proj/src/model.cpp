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

#include "dgrec/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dgrec {
namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

std::string shape_of(const Eigen::MatrixXd& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

Eigen::MatrixXd row_softmax(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd out(logits.rows(), logits.cols());
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const double mx = logits.row(r).maxCoeff();
    Eigen::ArrayXd e = (logits.row(r).array() - mx).exp();
    out.row(r) = (e / e.sum()).matrix();
  }
  return out;
}

Eigen::VectorXd softmax(const Eigen::VectorXd& v) {
  const double mx = v.maxCoeff();
  Eigen::ArrayXd e = (v.array() - mx).exp();
  return (e / e.sum()).matrix();
}

double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double sigmoid(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x))
                  : std::exp(x) / (1.0 + std::exp(x));
}

}  // namespace

void ModelConfig::validate() const {
  require(num_items > 0, "num_items must be positive");
  require(embed_dim > 0, "embed_dim must be positive");
  require(hidden_dim > 0, "hidden_dim must be positive");
  if (variant != PreferenceVariant::kMeanEmbedding) {
    require(interest_dim >= 2, "interest_dim must be at least 2");
    require(num_interests > 0, "num_interests must be positive");
  }
  require(variance_floor > 0.0, "variance_floor must be positive");
}

ParamLayout::ParamLayout(const ModelConfig& cfg) {
  cfg.validate();
  const auto add = [this](std::string name, Eigen::Index rows,
                          Eigen::Index cols) {
    blocks_.push_back({std::move(name), total_, rows, cols});
    total_ += rows * cols;
  };
  add("item_embeddings", cfg.num_items, cfg.embed_dim);
  if (cfg.variant != PreferenceVariant::kMeanEmbedding) {
    add("w_aggregate", cfg.embed_dim, cfg.interest_dim);
    add("w_assign", cfg.embed_dim, cfg.num_interests);
    add("w_att_score", cfg.interest_dim, 1);
    if (cfg.variant == PreferenceVariant::kFull) {
      add("w_att_self", cfg.interest_dim, 1);
      add("w_att_neighbor", cfg.interest_dim, 1);
    }
  }
  const Eigen::Index in_dim = cfg.preference_dim() + cfg.embed_dim;
  add("mlp_w1", in_dim, cfg.hidden_dim);
  add("mlp_b1", cfg.hidden_dim, 1);
  add("mlp_w2", cfg.hidden_dim, 1);
  add("mlp_b2", 1, 1);
}

const ParamBlock& ParamLayout::block(std::string_view name) const {
  for (const auto& b : blocks_) {
    if (b.name == name) return b;
  }
  throw std::out_of_range("unknown parameter block: " + std::string(name));
}

bool ParamLayout::has_block(std::string_view name) const {
  for (const auto& b : blocks_) {
    if (b.name == name) return true;
  }
  return false;
}

LocalModel::LocalModel(const ModelConfig& cfg)
    : cfg_(cfg), layout_(cfg), params_(Eigen::VectorXd::Zero(layout_.total())) {}

void LocalModel::init_uniform(Rng& rng, double scale) {
  for (Eigen::Index i = 0; i < params_.size(); ++i) {
    params_(i) = (2.0 * rng.uniform() - 1.0) * scale;
  }
}

void LocalModel::set_params(const Eigen::VectorXd& theta) {
  require(theta.size() == params_.size(),
          "parameter vector length mismatch: expected " +
              std::to_string(params_.size()) + ", got " +
              std::to_string(theta.size()));
  require(theta.allFinite(), "parameter vector contains non-finite values");
  params_ = theta;
}

Eigen::Map<const Eigen::MatrixXd> LocalModel::block(
    std::string_view name) const {
  const ParamBlock& b = layout_.block(name);
  return {params_.data() + b.offset, b.rows, b.cols};
}

Eigen::Map<Eigen::MatrixXd> LocalModel::mutable_block(std::string_view name) {
  const ParamBlock& b = layout_.block(name);
  return {params_.data() + b.offset, b.rows, b.cols};
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> aggregate_and_assign(
    const NormalizedAdjacency& adj, const Eigen::MatrixXd& item_features,
    const Eigen::MatrixXd& w_aggregate, const Eigen::MatrixXd& w_assign) {
  require(adj.matrix.rows() == adj.matrix.cols(),
          "adjacency must be square, got " + shape_of(adj.matrix));
  require(adj.matrix.rows() == item_features.rows(),
          "adjacency " + shape_of(adj.matrix) + " vs features " +
              shape_of(item_features));
  require(item_features.cols() == w_aggregate.rows(),
          "features " + shape_of(item_features) + " vs w_aggregate " +
              shape_of(w_aggregate));
  require(item_features.cols() == w_assign.rows(),
          "features " + shape_of(item_features) + " vs w_assign " +
              shape_of(w_assign));
  const Eigen::MatrixXd mixed = adj.matrix * item_features;
  return {mixed * w_aggregate, row_softmax(mixed * w_assign)};
}

CondensedInterestGraph condense(const Eigen::MatrixXd& assignment,
                                const Eigen::MatrixXd& aggregated,
                                const NormalizedAdjacency& adj) {
  require(assignment.rows() == aggregated.rows(),
          "assignment " + shape_of(assignment) + " vs aggregated " +
              shape_of(aggregated));
  require(adj.matrix.rows() == assignment.rows(),
          "adjacency " + shape_of(adj.matrix) + " vs assignment " +
              shape_of(assignment));
  CondensedInterestGraph cg;
  cg.assignment = assignment;
  cg.interest_embeddings = assignment.transpose() * aggregated;
  cg.interest_adjacency = assignment.transpose() * adj.matrix * assignment;
  return cg;
}

double pearson_loss(const Eigen::MatrixXd& interest_embeddings,
                    double variance_floor, bool* floored) {
  const Eigen::Index n = interest_embeddings.rows();
  const Eigen::Index m = interest_embeddings.cols();
  require(n >= 1, "at least one interest row required");
  require(m >= 2, "interest_dim must be at least 2 for variance");
  if (floored) *floored = false;

  const Eigen::MatrixXd centered =
      interest_embeddings.colwise() - interest_embeddings.rowwise().mean();
  const Eigen::MatrixXd cov =
      centered * centered.transpose() / static_cast<double>(m);
  Eigen::VectorXd var_floored(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    var_floored(j) = std::max(cov(j, j), variance_floor);
    if (cov(j, j) < variance_floor && floored) *floored = true;
  }

  double sum = static_cast<double>(n);  // diagonal correlations
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = 0; k < n; ++k) {
      if (j == k) continue;
      sum += cov(j, k) / std::sqrt(var_floored(j) * var_floored(k));
    }
  }
  return sum / static_cast<double>(n * n);
}

Eigen::VectorXd interest_attention(const CondensedInterestGraph& cg,
                                   const Eigen::VectorXd& w_score,
                                   const Eigen::VectorXd& w_self,
                                   const Eigen::VectorXd& w_neighbor) {
  const Eigen::MatrixXd& e = cg.interest_embeddings;
  const Eigen::MatrixXd& a = cg.interest_adjacency;
  require(e.cols() == w_score.size(),
          "interests " + shape_of(e) + " vs w_score length " +
              std::to_string(w_score.size()));
  require(w_self.size() == w_score.size() &&
              w_neighbor.size() == w_score.size(),
          "attention weight dimensions differ");
  const Eigen::VectorXd self_scores = e * w_self;
  const Eigen::VectorXd neighbor_scores = e * w_neighbor;
  Eigen::VectorXd p = e * w_score;
  p += a.rowwise().sum().cwiseProduct(self_scores);
  p -= a * neighbor_scores;
  return e.transpose() * softmax(p);
}

double predict(const LocalModel& model, const Eigen::VectorXd& preference,
               const Eigen::VectorXd& item_embedding) {
  const auto w1 = model.block("mlp_w1");
  const auto b1 = model.block("mlp_b1");
  const auto w2 = model.block("mlp_w2");
  const auto b2 = model.block("mlp_b2");
  require(preference.size() + item_embedding.size() == w1.rows(),
          "mlp input dim " + std::to_string(w1.rows()) + ", got " +
              std::to_string(preference.size() + item_embedding.size()));
  Eigen::VectorXd x(w1.rows());
  x << preference, item_embedding;
  const Eigen::VectorXd z1 = w1.transpose() * x + b1.col(0);
  const Eigen::VectorXd h1 = z1.cwiseMax(0.0);
  return w2.col(0).dot(h1) + b2(0, 0);
}

double predict(const LocalModel& model, const Eigen::VectorXd& preference,
               ItemId item) {
  require(item >= 0 && item < model.config().num_items,
          "item " + std::to_string(item) + " outside vocabulary");
  return predict(model, preference,
                 model.item_embeddings().row(item).transpose());
}

double bpr_loss(std::span<const double> pos_scores,
                std::span<const double> neg_scores, std::size_t n_pos) {
  require(pos_scores.size() == neg_scores.size(),
          "pos/neg score lists must align pairwise");
  if (n_pos == 0) {
    throw std::invalid_argument("user has no training positives");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < pos_scores.size(); ++i) {
    sum += softplus(neg_scores[i] - pos_scores[i]);
  }
  return sum / static_cast<double>(n_pos);
}

LossBreakdown local_loss(double bpr, double pearson, double lambda,
                         const Eigen::VectorXd& theta, bool squared_l2) {
  require(lambda >= 0.0, "lambda must be nonnegative");
  LossBreakdown out;
  out.bpr = bpr;
  out.pearson = pearson;
  out.l2 = lambda * (squared_l2 ? theta.squaredNorm() : theta.norm());
  out.total = out.bpr + out.pearson + out.l2;
  return out;
}

namespace {

struct PairCache {
  Eigen::Index pos = 0;
  Eigen::Index neg = 0;
  Eigen::VectorXd x_pos, x_neg;    // mlp inputs
  Eigen::VectorXd z1_pos, z1_neg;  // pre-activations
  double score_pos = 0.0, score_neg = 0.0;
};

struct PipelineCache {
  std::vector<Eigen::Index> item_rows;  // hypergraph item -> embedding row
  Eigen::MatrixXd mixed;                // adj * E_u
  Eigen::MatrixXd aggregated;           // E'
  Eigen::MatrixXd assignment;           // S
  Eigen::MatrixXd interests;            // S^T E'
  Eigen::MatrixXd interest_adj;         // S^T adj S
  Eigen::VectorXd attention;            // softmax of interest scores
  Eigen::VectorXd preference;           // pooled user vector
};

PipelineCache run_pipeline(const LocalModel& model, const UserView& view) {
  const ModelConfig& cfg = model.config();
  PipelineCache c;

  if (cfg.variant == PreferenceVariant::kMeanEmbedding) {
    require(!view.own_items.empty(), "user has no items to average");
    c.preference = Eigen::VectorXd::Zero(cfg.embed_dim);
    const auto emb = model.item_embeddings();
    for (ItemId i : view.own_items) {
      require(i >= 0 && i < cfg.num_items,
              "item " + std::to_string(i) + " outside vocabulary");
      c.preference += emb.row(i).transpose();
    }
    c.preference /= static_cast<double>(view.own_items.size());
    return c;
  }

  require(view.hypergraph != nullptr && view.adjacency != nullptr,
          "hypergraph view required for this variant");
  const auto& items = view.hypergraph->items();
  require(!items.empty(), "hypergraph has no items");
  c.item_rows.reserve(items.size());
  const auto emb = model.item_embeddings();
  Eigen::MatrixXd features(static_cast<Eigen::Index>(items.size()),
                           cfg.embed_dim);
  for (std::size_t r = 0; r < items.size(); ++r) {
    require(items[r] >= 0 && items[r] < cfg.num_items,
            "item " + std::to_string(items[r]) + " outside vocabulary");
    c.item_rows.push_back(static_cast<Eigen::Index>(items[r]));
    features.row(static_cast<Eigen::Index>(r)) = emb.row(items[r]);
  }

  c.mixed = view.adjacency->matrix * features;
  c.aggregated = c.mixed * model.block("w_aggregate");
  c.assignment = row_softmax(c.mixed * model.block("w_assign"));
  c.interests = c.assignment.transpose() * c.aggregated;
  c.interest_adj =
      c.assignment.transpose() * view.adjacency->matrix * c.assignment;

  Eigen::VectorXd scores = c.interests * model.block("w_att_score").col(0);
  if (cfg.variant == PreferenceVariant::kFull) {
    const Eigen::VectorXd self_scores =
        c.interests * model.block("w_att_self").col(0);
    const Eigen::VectorXd neighbor_scores =
        c.interests * model.block("w_att_neighbor").col(0);
    scores += c.interest_adj.rowwise().sum().cwiseProduct(self_scores);
    scores -= c.interest_adj * neighbor_scores;
  }
  c.attention = softmax(scores);
  c.preference = c.interests.transpose() * c.attention;
  return c;
}

PairCache score_pair(const LocalModel& model, const PipelineCache& pipe,
                     const BatchPair& pair) {
  const ModelConfig& cfg = model.config();
  require(pair.pos >= 0 && pair.pos < cfg.num_items &&
              pair.neg >= 0 && pair.neg < cfg.num_items,
          "batch item outside vocabulary");
  const auto emb = model.item_embeddings();
  const auto w1 = model.block("mlp_w1");
  const auto b1 = model.block("mlp_b1");
  const auto w2 = model.block("mlp_w2");
  const auto b2 = model.block("mlp_b2");

  PairCache pc;
  pc.pos = static_cast<Eigen::Index>(pair.pos);
  pc.neg = static_cast<Eigen::Index>(pair.neg);
  pc.x_pos.resize(w1.rows());
  pc.x_pos << pipe.preference, emb.row(pc.pos).transpose();
  pc.x_neg.resize(w1.rows());
  pc.x_neg << pipe.preference, emb.row(pc.neg).transpose();
  pc.z1_pos = w1.transpose() * pc.x_pos + b1.col(0);
  pc.z1_neg = w1.transpose() * pc.x_neg + b1.col(0);
  pc.score_pos = w2.col(0).dot(pc.z1_pos.cwiseMax(0.0)) + b2(0, 0);
  pc.score_neg = w2.col(0).dot(pc.z1_neg.cwiseMax(0.0)) + b2(0, 0);
  return pc;
}

}  // namespace

Eigen::VectorXd compute_preference(const LocalModel& model,
                                   const UserView& view) {
  return run_pipeline(model, view).preference;
}

ForwardResult forward(const LocalModel& model, const UserView& view,
                      std::span<const BatchPair> batch, double lambda,
                      bool include_pearson) {
  const PipelineCache pipe = run_pipeline(model, view);
  std::vector<double> pos, neg;
  pos.reserve(batch.size());
  neg.reserve(batch.size());
  for (const auto& pair : batch) {
    const PairCache pc = score_pair(model, pipe, pair);
    pos.push_back(pc.score_pos);
    neg.push_back(pc.score_neg);
  }
  const double bpr = bpr_loss(pos, neg, view.own_items.size());
  double pearson = 0.0;
  if (include_pearson &&
      model.config().variant != PreferenceVariant::kMeanEmbedding) {
    pearson = pearson_loss(pipe.interests, model.config().variance_floor);
  }
  ForwardResult out;
  out.loss = local_loss(bpr, pearson, lambda, model.params(),
                        model.config().squared_l2);
  out.preference = pipe.preference;
  return out;
}

Eigen::VectorXd compute_local_gradients(const LocalModel& model,
                                        const UserView& view,
                                        std::span<const BatchPair> batch,
                                        double lambda, bool include_pearson,
                                        LossBreakdown* loss_out) {
  const ModelConfig& cfg = model.config();
  const ParamLayout& layout = model.layout();
  const PipelineCache pipe = run_pipeline(model, view);

  Eigen::VectorXd grad = Eigen::VectorXd::Zero(layout.total());
  const auto gblock = [&grad, &layout](std::string_view name) {
    const ParamBlock& b = layout.block(name);
    return Eigen::Map<Eigen::MatrixXd>(grad.data() + b.offset, b.rows,
                                       b.cols);
  };

  // BPR over the batch, back through the MLP into the preference vector
  // and the pos/neg item embeddings.
  std::vector<double> pos, neg;
  pos.reserve(batch.size());
  neg.reserve(batch.size());
  const auto w1 = model.block("mlp_w1");
  const auto w2 = model.block("mlp_w2");
  const int pref_dim = cfg.preference_dim();
  Eigen::VectorXd g_pref = Eigen::VectorXd::Zero(pref_dim);
  auto g_emb = gblock("item_embeddings");
  auto g_w1 = gblock("mlp_w1");
  auto g_b1 = gblock("mlp_b1");
  auto g_w2 = gblock("mlp_w2");
  auto g_b2 = gblock("mlp_b2");
  const double n_pos = static_cast<double>(view.own_items.size());
  if (n_pos == 0.0) {
    throw std::invalid_argument("user has no training positives");
  }

  for (const auto& pair : batch) {
    const PairCache pc = score_pair(model, pipe, pair);
    pos.push_back(pc.score_pos);
    neg.push_back(pc.score_neg);
    const double diff = pc.score_pos - pc.score_neg;
    const double w = sigmoid(-diff) / n_pos;  // d(pair loss)/d(-diff)

    const auto backprop = [&](const Eigen::VectorXd& x,
                              const Eigen::VectorXd& z1, Eigen::Index item,
                              double gy) {
      const Eigen::VectorXd h1 = z1.cwiseMax(0.0);
      g_w2.col(0) += gy * h1;
      g_b2(0, 0) += gy;
      Eigen::VectorXd gz1 = gy * w2.col(0);
      for (Eigen::Index i = 0; i < gz1.size(); ++i) {
        if (z1(i) <= 0.0) gz1(i) = 0.0;
      }
      g_w1 += x * gz1.transpose();
      g_b1.col(0) += gz1;
      const Eigen::VectorXd gx = w1 * gz1;
      g_pref += gx.head(pref_dim);
      g_emb.row(item) += gx.tail(cfg.embed_dim).transpose();
    };
    backprop(pc.x_pos, pc.z1_pos, pc.pos, -w);
    backprop(pc.x_neg, pc.z1_neg, pc.neg, w);
  }
  const double bpr = bpr_loss(pos, neg, view.own_items.size());

  double pearson = 0.0;
  if (cfg.variant == PreferenceVariant::kMeanEmbedding) {
    // preference = mean of own item embeddings
    const double inv = 1.0 / static_cast<double>(view.own_items.size());
    for (ItemId i : view.own_items) {
      g_emb.row(i) += inv * g_pref.transpose();
    }
  } else {
    const Eigen::Index n_int = pipe.interests.rows();
    const Eigen::MatrixXd& interests = pipe.interests;
    const Eigen::MatrixXd& iadj = pipe.interest_adj;
    const Eigen::VectorXd& att = pipe.attention;

    Eigen::MatrixXd g_interests =
        Eigen::MatrixXd::Zero(n_int, cfg.interest_dim);
    Eigen::MatrixXd g_iadj = Eigen::MatrixXd::Zero(n_int, n_int);

    // preference = interests^T att
    g_interests += att * g_pref.transpose();
    const Eigen::VectorXd g_att = interests * g_pref;
    const Eigen::VectorXd g_scores =
        att.cwiseProduct(g_att - Eigen::VectorXd::Constant(
                                     n_int, att.dot(g_att)));

    const Eigen::VectorXd w_score = model.block("w_att_score").col(0);
    gblock("w_att_score").col(0) += interests.transpose() * g_scores;
    g_interests += g_scores * w_score.transpose();
    if (cfg.variant == PreferenceVariant::kFull) {
      const Eigen::VectorXd w_self = model.block("w_att_self").col(0);
      const Eigen::VectorXd w_neighbor = model.block("w_att_neighbor").col(0);
      const Eigen::VectorXd rowsum = iadj.rowwise().sum();
      const Eigen::VectorXd self_scores = interests * w_self;
      const Eigen::VectorXd neighbor_scores = interests * w_neighbor;

      gblock("w_att_self").col(0) +=
          interests.transpose() * g_scores.cwiseProduct(rowsum);
      gblock("w_att_neighbor").col(0) -=
          interests.transpose() * (iadj.transpose() * g_scores);
      g_interests +=
          g_scores.cwiseProduct(rowsum) * w_self.transpose();
      g_interests -= (iadj.transpose() * g_scores) * w_neighbor.transpose();
      g_iadj += g_scores.cwiseProduct(self_scores) *
                Eigen::RowVectorXd::Ones(n_int);
      g_iadj -= g_scores * neighbor_scores.transpose();
    }

    if (include_pearson) {
      bool floored = false;
      pearson =
          pearson_loss(interests, cfg.variance_floor, &floored);
      const Eigen::Index m = interests.cols();
      const Eigen::MatrixXd centered =
          interests.colwise() - interests.rowwise().mean();
      const Eigen::MatrixXd cov =
          centered * centered.transpose() / static_cast<double>(m);
      Eigen::VectorXd var_floored(n_int);
      for (Eigen::Index j = 0; j < n_int; ++j) {
        var_floored(j) = std::max(cov(j, j), cfg.variance_floor);
      }
      const double inv_nn = 1.0 / static_cast<double>(n_int * n_int);
      Eigen::MatrixXd g_cov = Eigen::MatrixXd::Zero(n_int, n_int);
      for (Eigen::Index j = 0; j < n_int; ++j) {
        for (Eigen::Index k = 0; k < n_int; ++k) {
          if (j == k) continue;
          const double denom =
              std::sqrt(var_floored(j) * var_floored(k));
          g_cov(j, k) += inv_nn / denom;
          if (cov(j, j) > cfg.variance_floor) {
            g_cov(j, j) += inv_nn * cov(j, k) * -0.5 /
                           (var_floored(j) * denom);
          }
          if (cov(k, k) > cfg.variance_floor) {
            g_cov(k, k) += inv_nn * cov(j, k) * -0.5 /
                           (var_floored(k) * denom);
          }
        }
      }
      Eigen::MatrixXd g_centered =
          (g_cov + g_cov.transpose()) * centered / static_cast<double>(m);
      g_interests +=
          g_centered.colwise() - g_centered.rowwise().mean();
    }

    // condensation: interests = S^T E', iadj = S^T adj S
    const Eigen::MatrixXd& adj = view.adjacency->matrix;
    const Eigen::MatrixXd& s = pipe.assignment;
    Eigen::MatrixXd g_assign = pipe.aggregated * g_interests.transpose();
    Eigen::MatrixXd g_aggregated = s * g_interests;
    g_assign += adj * s * (g_iadj + g_iadj.transpose());

    // aggregation and assignment
    const auto w_agg = model.block("w_aggregate");
    const auto w_asn = model.block("w_assign");
    gblock("w_aggregate") += pipe.mixed.transpose() * g_aggregated;
    Eigen::MatrixXd g_mixed = g_aggregated * w_agg.transpose();
    Eigen::MatrixXd g_logits(s.rows(), s.cols());
    for (Eigen::Index r = 0; r < s.rows(); ++r) {
      const double dot = s.row(r).dot(g_assign.row(r));
      g_logits.row(r) =
          s.row(r).cwiseProduct(g_assign.row(r) -
                                Eigen::RowVectorXd::Constant(s.cols(), dot));
    }
    gblock("w_assign") += pipe.mixed.transpose() * g_logits;
    g_mixed += g_logits * w_asn.transpose();

    const Eigen::MatrixXd g_features = adj * g_mixed;  // adj symmetric
    for (std::size_t r = 0; r < pipe.item_rows.size(); ++r) {
      g_emb.row(pipe.item_rows[r]) +=
          g_features.row(static_cast<Eigen::Index>(r));
    }
  }
  if (!include_pearson) pearson = 0.0;

  if (lambda > 0.0) {
    if (cfg.squared_l2) {
      grad += 2.0 * lambda * model.params();
    } else {
      const double norm = model.params().norm();
      if (norm > 0.0) grad += (lambda / norm) * model.params();
    }
  }

  for (const auto& b : layout.blocks()) {
    if (!grad.segment(b.offset, b.size()).allFinite()) {
      throw std::runtime_error("non-finite gradient in block " + b.name);
    }
  }

  if (loss_out) {
    *loss_out =
        local_loss(bpr, pearson, lambda, model.params(), cfg.squared_l2);
  }
  return grad;
}

}  // namespace dgrec
