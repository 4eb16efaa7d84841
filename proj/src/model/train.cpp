#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

#include "mvdp/error.hpp"
#include "mvdp/eval/metrics.hpp"
#include "mvdp/model.hpp"
#include "mvdp/nn/optim.hpp"

namespace mvdp::model {

namespace {

bool has_both_classes(const std::vector<int>& labels, std::span<const std::size_t> rows) {
  bool pos = false;
  bool neg = false;
  for (std::size_t r : rows) (labels[r] == 1 ? pos : neg) = true;
  return pos && neg;
}

double mean_cross_entropy(const Tensor& probs, const std::vector<int>& labels, std::span<const std::size_t> rows) {
  double total = 0.0;
  for (std::size_t r : rows) {
    total -= std::log(std::max(probs(r, static_cast<std::size_t>(labels[r])), nn::kLogClampFloor));
  }
  return total / static_cast<double>(rows.size());
}

}  // namespace

TrainResult train(const graph::DependencyGraph& g, const NodeFeatureMatrix& x, const std::vector<int>& labels,
                  const sampling::NodeMasks& masks, const ModelConfig& config, Rng& rng) {
  config.validate();
  if (labels.size() != g.node_count() || x.rows() != g.node_count()) {
    throw ShapeError("train: " + std::to_string(g.node_count()) + " nodes, " + std::to_string(x.rows()) +
                     " feature rows, " + std::to_string(labels.size()) + " labels");
  }
  masks.validate(g.node_count());
  {
    const auto rows = masks.train_indices();
    if (rows.empty()) throw TrainingError("training split is empty");
    if (!has_both_classes(labels, rows)) throw TrainingError("training split contains a single class");
  }

  sampling::AugmentedDataset data =
      config.use_smote ? sampling::smote_augment(g, x, labels, masks, {config.sampling_ratio}, rng)
                       : sampling::without_augmentation(g, x, labels, masks);
  const std::vector<std::size_t> train_rows = data.masks.train_indices();
  const std::vector<std::size_t> val_rows = data.masks.val_indices();
  const Adjacency adj = Adjacency::of(data.graph);

  BiGGNNParams params(x.cols(), config.hidden_size, config.mlp_hidden, rng);
  std::vector<nn::Parameter*> plist = params.parameters();
  nn::AdamState adam;
  adam.lr = config.lr;

  TrainHistory history;
  const bool val_auc = !val_rows.empty() && has_both_classes(data.labels, val_rows);
  history.val_metric_name = val_auc ? "auc" : "neg_loss";
  const std::vector<std::size_t>& score_rows = val_rows.empty() ? train_rows : val_rows;

  BiGGNNParams best = params;
  double best_score = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> order = train_rows;

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    double loss_sum = 0.0;
    std::size_t loss_rows = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      const std::span<const std::size_t> batch(order.data() + start, stop - start);
      nn::zero_grads(plist);
      nn::Tape tape;
      auto out = forward(tape, adj, data.features, params, config.graph_hops, config.weighted_aggregation);
      nn::Var loss = nn::cross_entropy(out.probs, data.labels, batch);
      const double value = loss.value()[0];
      if (!std::isfinite(value)) {
        throw TrainingError("non-finite loss at epoch " + std::to_string(epoch));
      }
      tape.backward(loss);
      nn::adam_step(plist, adam);
      loss_sum += value * static_cast<double>(batch.size());
      loss_rows += batch.size();
    }
    history.train_loss.push_back(loss_sum / static_cast<double>(loss_rows));

    const Prediction pred = predict(data.graph, data.features, params, config);
    double score = 0.0;
    if (val_auc) {
      std::vector<double> scores;
      std::vector<int> y;
      for (std::size_t r : val_rows) {
        scores.push_back(pred.probs(r, 1));
        y.push_back(data.labels[r]);
      }
      score = eval::auc(scores, y);
    } else {
      score = -mean_cross_entropy(pred.probs, data.labels, score_rows);
    }
    history.val_metric.push_back(score);
    if (score > best_score) {
      best_score = score;
      best = params;
      history.selected_epoch = epoch;
    }
  }

  return {std::move(best), std::move(history), std::move(data)};
}

ModelConfig sample_config(const SearchSpace& space, const ModelConfig& base, Rng& rng) {
  ModelConfig c = base;
  c.hidden_size = space.hidden_size[rng.index(space.hidden_size.size())];
  c.graph_hops = space.graph_hops[rng.index(space.graph_hops.size())];
  c.lr = space.lr[rng.index(space.lr.size())];
  c.batch_size = space.batch_size[rng.index(space.batch_size.size())];
  c.mlp_hidden = space.mlp_hidden[rng.index(space.mlp_hidden.size())];
  c.sampling_ratio = space.sampling_ratio[rng.index(space.sampling_ratio.size())];
  return c;
}

SearchResult random_search(const SearchSpace& space, const ModelConfig& base, std::size_t budget,
                           const std::function<double(const ModelConfig&)>& eval_fn, Rng& rng) {
  if (budget < 1) throw ConfigError("search budget must be at least 1");
  SearchResult result;
  for (std::size_t i = 0; i < budget; ++i) {
    ModelConfig c = sample_config(space, base, rng);
    const double score = eval_fn(c);
    result.trials.push_back({c, score});
    if (i == 0 || score > result.best_score) {
      result.best = c;
      result.best_score = score;
    }
  }
  return result;
}

}  // namespace mvdp::model
