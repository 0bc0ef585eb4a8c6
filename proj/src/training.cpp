// Copyright 2026 The VitalNet Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vitalnet/training.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "vitalnet/error.hpp"
#include "vitalnet/random.hpp"

namespace vitalnet {

namespace {

constexpr std::size_t kEvalChunk = 256;

double clamp_probability(double p) {
  return std::clamp(p, kProbabilityClamp, 1.0 - kProbabilityClamp);
}

// d loss / d p of the clamped focal loss; zero where the clamp is active.
double focal_loss_derivative(double p, int y, double gamma, double alpha) {
  if (p < kProbabilityClamp || p > 1.0 - kProbabilityClamp) return 0.0;
  if (y == 1) {
    const double q = 1.0 - p;
    return alpha * gamma * std::pow(q, gamma - 1.0) * std::log(p) - alpha * std::pow(q, gamma) / p;
  }
  return -(1.0 - alpha) *
         (gamma * std::pow(p, gamma - 1.0) * std::log1p(-p) - std::pow(p, gamma) / (1.0 - p));
}

struct PhasePlan {
  int phase = 1;
  Mode mode = Mode::kFused;
  double lr = 1e-4;
  std::vector<std::string> trainable;
  // Precompute the frozen SEQ representation once for the whole phase.
  bool cache_seq = false;
};

class PhaseRunner {
 public:
  PhaseRunner(Model& model, const Dataset& train, const Dataset& val, const TrainConfig& cfg,
              Rng& rng, TrainHistory& history, const TrainHooks& hooks)
      : model_(model), train_(train), val_(val), cfg_(cfg), rng_(rng), history_(history),
        hooks_(hooks) {}

  void run(const PhasePlan& plan) {
    for (auto& [name, t] : model_.params()) {
      t.clear_grad();
      t.set_requires_grad(std::find(plan.trainable.begin(), plan.trainable.end(), name) !=
                          plan.trainable.end());
    }
    train_cache_.clear();
    val_cache_.clear();
    if (plan.cache_seq) {
      train_cache_ = seq_cache(train_);
      val_cache_ = seq_cache(val_);
    }

    AdamState adam = AdamState::for_params(model_.params());
    const AdamHyper hyper{plan.lr, cfg_.beta1, cfg_.beta2, cfg_.epsilon};
    if (hooks_.on_phase_start) hooks_.on_phase_start(plan.phase, model_, adam);

    ParamSet best = model_.params().clone();
    double best_loss = std::numeric_limits<double>::infinity();
    int best_epoch = 0;
    int since_best = 0;
    std::vector<std::size_t> order(train_.size());
    std::iota(order.begin(), order.end(), 0);
    const std::size_t bs = static_cast<std::size_t>(cfg_.batch_size);

    for (int epoch = 1; epoch <= cfg_.epochs; ++epoch) {
      rng_.shuffle(order);
      double loss_sum = 0.0;
      for (std::size_t start = 0; start < order.size(); start += bs) {
        const std::span<const std::size_t> idx(order.data() + start,
                                               std::min(bs, order.size() - start));
        nc::Graph g;
        const Batch batch = Batch::from_samples(train_.samples, idx);
        const nc::Tensor probs = forward(g, plan, batch, idx, train_cache_);
        const nc::Tensor loss =
            focal_loss(g, probs, batch.labels, cfg_.focal_gamma, cfg_.focal_alpha);
        g.backward(loss);
        adam_step(model_.params(), adam, hyper);
        for (auto& [name, t] : model_.params()) t.clear_grad();
        loss_sum += loss.item() * static_cast<double>(idx.size());
      }

      EpochRecord rec;
      rec.phase = plan.phase;
      rec.epoch = epoch;
      rec.train_loss = loss_sum / static_cast<double>(train_.size());
      evaluate(plan, rec);
      history_.epochs.push_back(rec);
      if (hooks_.on_epoch_end) hooks_.on_epoch_end(plan.phase, epoch, model_, adam);

      if (rec.val_loss < best_loss) {
        best_loss = rec.val_loss;
        best_epoch = epoch;
        since_best = 0;
        best.copy_values_from(model_.params());
      } else if (++since_best >= cfg_.patience) {
        break;
      }
    }
    model_.params().copy_values_from(best);
    history_.best_epoch[static_cast<std::size_t>(plan.phase - 1)] = best_epoch;
    if (hooks_.on_phase_end) hooks_.on_phase_end(plan.phase, model_, adam);
  }

 private:
  std::vector<double> seq_cache(const Dataset& data) const {
    const std::size_t width = model_.dims().seq_repr;
    std::vector<double> out;
    out.reserve(data.size() * width);
    for (std::size_t start = 0; start < data.size(); start += kEvalChunk) {
      std::vector<std::size_t> idx(std::min(kEvalChunk, data.size() - start));
      std::iota(idx.begin(), idx.end(), start);
      nc::Graph g(false);
      const nc::Tensor repr = model_.seq_representation(g, Batch::from_samples(data.samples, idx));
      out.insert(out.end(), repr.data().begin(), repr.data().end());
    }
    return out;
  }

  nc::Tensor forward(nc::Graph& g, const PhasePlan& plan, const Batch& batch,
                     std::span<const std::size_t> idx, const std::vector<double>& cache) const {
    if (!plan.cache_seq) return model_.forward(g, batch, plan.mode);
    const std::size_t width = model_.dims().seq_repr;
    std::vector<double> rows(idx.size() * width);
    for (std::size_t r = 0; r < idx.size(); ++r)
      std::copy_n(cache.begin() + idx[r] * width, width, rows.begin() + r * width);
    return model_.fused_head(g, nc::Tensor::from({idx.size(), width}, std::move(rows)), batch);
  }

  void evaluate(const PhasePlan& plan, EpochRecord& rec) const {
    std::vector<double> scores;
    std::vector<int> labels;
    scores.reserve(val_.size());
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < val_.size(); start += kEvalChunk) {
      std::vector<std::size_t> idx(std::min(kEvalChunk, val_.size() - start));
      std::iota(idx.begin(), idx.end(), start);
      nc::Graph g(false);
      const Batch batch = Batch::from_samples(val_.samples, idx);
      const nc::Tensor probs = forward(g, plan, batch, idx, val_cache_);
      for (std::size_t i = 0; i < idx.size(); ++i) {
        const double p = probs.at(i);
        const int y = val_.samples[idx[i]].label;
        loss_sum += focal_loss(p, y, cfg_.focal_gamma, cfg_.focal_alpha);
        scores.push_back(p);
        labels.push_back(y);
      }
    }
    rec.val_loss = loss_sum / static_cast<double>(val_.size());
    rec.val_accuracy = accuracy(scores, labels);
    try {
      rec.val_auroc = auroc(scores, labels);
      rec.val_auprc = auprc(scores, labels);
    } catch (const UndefinedMetricError&) {
      rec.val_auroc = std::numeric_limits<double>::quiet_NaN();
      rec.val_auprc = std::numeric_limits<double>::quiet_NaN();
    }
  }

  Model& model_;
  const Dataset& train_;
  const Dataset& val_;
  const TrainConfig& cfg_;
  Rng& rng_;
  TrainHistory& history_;
  const TrainHooks& hooks_;
  std::vector<double> train_cache_;
  std::vector<double> val_cache_;
};

std::vector<std::string> all_names(const Model& model) {
  std::vector<std::string> names;
  for (const auto& [name, t] : model.params()) names.push_back(name);
  return names;
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs <= 0 || patience <= 0 || batch_size <= 0 || folds < 2) {
    throw ConfigError("epochs, patience and batch_size must be positive and folds at least 2");
  }
  if (!(lr_phase12 >= 0.0) || !(lr_phase3 >= 0.0) || !(epsilon > 0.0)) {
    throw ConfigError("learning rates must be non-negative and epsilon positive");
  }
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw ConfigError("beta1 and beta2 must lie in [0, 1)");
  }
  if (!(focal_alpha > 0.0 && focal_alpha < 1.0) || !(focal_gamma >= 0.0)) {
    throw ConfigError("focal_alpha must lie in (0, 1) and focal_gamma be non-negative");
  }
  if (!is_valid_horizon(horizon_hours)) {
    throw ConfigError("horizon_hours must be one of 3,6,...,24");
  }
}

double focal_loss(double p, int y, double gamma, double alpha) {
  p = clamp_probability(p);
  if (y == 1) return -alpha * std::pow(1.0 - p, gamma) * std::log(p);
  return -(1.0 - alpha) * std::pow(p, gamma) * std::log1p(-p);
}

nc::Tensor focal_loss(nc::Graph& g, const nc::Tensor& probabilities, std::span<const double> labels,
                      double gamma, double alpha) {
  const std::size_t n = probabilities.size();
  if (labels.size() != n) {
    throw DimensionError("focal_loss: " + std::to_string(n) + " predictions, " +
                         std::to_string(labels.size()) + " labels");
  }
  if (n == 0) throw ContractError("focal_loss of an empty batch");
  double total = 0.0;
  const auto p = probabilities.data();
  for (std::size_t i = 0; i < n; ++i) total += focal_loss(p[i], labels[i] > 0.5 ? 1 : 0, gamma, alpha);
  std::vector<double> y(labels.begin(), labels.end());
  return g.record(nc::Tensor::scalar(total / static_cast<double>(n)), {probabilities},
                  [probabilities, y = std::move(y), gamma, alpha, n](std::span<const double> go) {
                    const auto p = probabilities.data();
                    std::vector<double> dp(n);
                    for (std::size_t i = 0; i < n; ++i) {
                      dp[i] = go[0] / static_cast<double>(n) *
                              focal_loss_derivative(p[i], y[i] > 0.5 ? 1 : 0, gamma, alpha);
                    }
                    nc::Graph::accumulate(probabilities, dp);
                  });
}

AdamState AdamState::for_params(const ParamSet& params) {
  AdamState s;
  for (const auto& [name, t] : params) {
    s.slots.emplace_back(name, AdamSlot{std::vector<double>(t.size(), 0.0),
                                        std::vector<double>(t.size(), 0.0), 0});
  }
  return s;
}

const AdamSlot& AdamState::at(std::string_view name) const {
  for (const auto& [n, slot] : slots)
    if (n == name) return slot;
  throw ContractError("no optimizer state for '" + std::string(name) + "'");
}

AdamSlot& AdamState::at(std::string_view name) {
  return const_cast<AdamSlot&>(std::as_const(*this).at(name));
}

void adam_step(ParamSet& params, AdamState& state, const AdamHyper& hyper) {
  for (auto& [name, param] : params) {
    if (!param.requires_grad()) continue;
    if (!param.has_grad()) throw ContractError("trainable parameter '" + name + "' has no gradient");
    AdamSlot& slot = state.at(name);
    const auto grad = param.grad();
    auto theta = param.mutable_data();
    ++slot.t;
    const double c1 = 1.0 - std::pow(hyper.beta1, static_cast<double>(slot.t));
    const double c2 = 1.0 - std::pow(hyper.beta2, static_cast<double>(slot.t));
    for (std::size_t i = 0; i < theta.size(); ++i) {
      slot.m[i] = hyper.beta1 * slot.m[i] + (1.0 - hyper.beta1) * grad[i];
      slot.v[i] = hyper.beta2 * slot.v[i] + (1.0 - hyper.beta2) * grad[i] * grad[i];
      const double m_hat = slot.m[i] / c1;
      const double v_hat = slot.v[i] / c2;
      theta[i] -= hyper.lr * m_hat / (std::sqrt(v_hat) + hyper.epsilon);
    }
  }
}

std::vector<std::vector<std::size_t>> stratified_kfold(std::span<const int> labels, int k,
                                                       std::uint64_t seed) {
  if (k < 2) throw ContractError("stratified_kfold needs k >= 2");
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] == 1 ? pos : neg).push_back(i);
  const std::size_t kk = static_cast<std::size_t>(k);
  if (pos.size() < kk || neg.size() < kk) {
    throw ContractError("stratified_kfold needs at least " + std::to_string(k) +
                        " positives and negatives, got " + std::to_string(pos.size()) + " and " +
                        std::to_string(neg.size()));
  }
  Rng rng(seed);
  rng.shuffle(pos);
  rng.shuffle(neg);
  std::vector<std::vector<std::size_t>> folds(kk);
  for (std::size_t i = 0; i < pos.size(); ++i) folds[i % kk].push_back(pos[i]);
  const std::size_t offset = pos.size() % kk;
  for (std::size_t i = 0; i < neg.size(); ++i) folds[(offset + i) % kk].push_back(neg[i]);
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

std::string TrainHistory::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "phase,epoch,train_loss,val_loss,val_auroc,val_auprc,val_accuracy\n";
  for (const auto& r : epochs) {
    os << r.phase << ',' << r.epoch << ',' << r.train_loss << ',' << r.val_loss << ','
       << r.val_auroc << ',' << r.val_auprc << ',' << r.val_accuracy << '\n';
  }
  return os.str();
}

TrainResult train_three_phase(const Dataset& train, const Dataset& val, const TrainConfig& cfg,
                              Architecture arch, const ModelDims& dims, const TrainHooks& hooks) {
  cfg.validate();
  if (train.size() == 0 || val.size() == 0) {
    throw ContractError("training and validation sets must be non-empty");
  }
  TrainResult result{Model::init(arch, dims, derive_seed(cfg.seed, 1)), {}};
  Model& model = result.model;
  Rng rng(derive_seed(cfg.seed, 2));
  PhaseRunner runner(model, train, val, cfg, rng, result.history, hooks);

  if (arch == Architecture::kNshs) {
    runner.run({1, Mode::kFused, cfg.lr_phase12, all_names(model), false});
  } else {
    std::vector<std::string> phase1 = model.seq_module_names();
    phase1.push_back("aux_head.weight");
    phase1.push_back("aux_head.bias");
    runner.run({1, Mode::kPhase1Aux, cfg.lr_phase12, phase1, false});

    model.drop_aux_head();
    const auto seq = model.seq_module_names();
    std::vector<std::string> phase2;
    for (const auto& name : all_names(model))
      if (std::find(seq.begin(), seq.end(), name) == seq.end()) phase2.push_back(name);
    runner.run({2, Mode::kFused, cfg.lr_phase12, phase2, true});

    runner.run({3, Mode::kFused, cfg.lr_phase3, all_names(model), false});
  }
  for (auto& [name, t] : model.params()) t.set_requires_grad(true);
  return result;
}

std::vector<double> score_dataset(const Model& model, const Dataset& data) {
  std::vector<double> scores;
  scores.reserve(data.size());
  for (std::size_t start = 0; start < data.size(); start += kEvalChunk) {
    std::vector<std::size_t> idx(std::min(kEvalChunk, data.size() - start));
    std::iota(idx.begin(), idx.end(), start);
    const auto p = model.predict(Batch::from_samples(data.samples, idx));
    scores.insert(scores.end(), p.begin(), p.end());
  }
  return scores;
}

CrossValidation cross_validate(const Dataset& data, const TrainConfig& cfg, Architecture arch,
                               const ModelDims& dims, int jobs, const TrainHooks& hooks) {
  cfg.validate();
  std::vector<int> labels;
  labels.reserve(data.size());
  for (const auto& s : data.samples) labels.push_back(s.label);
  const auto folds = stratified_kfold(labels, cfg.folds, cfg.seed);

  std::vector<std::optional<FoldResult>> results(folds.size());
  auto run_fold = [&](std::size_t f) {
    std::vector<std::size_t> train_idx;
    for (std::size_t o = 0; o < folds.size(); ++o)
      if (o != f) train_idx.insert(train_idx.end(), folds[o].begin(), folds[o].end());
    std::sort(train_idx.begin(), train_idx.end());
    const NormStats stats = fit_normalizer(data, train_idx);
    const Dataset train = subset(data, train_idx, stats);
    const Dataset val = subset(data, folds[f], stats);
    TrainConfig fold_cfg = cfg;
    fold_cfg.seed = derive_seed(cfg.seed, 100 + f);
    TrainResult trained = train_three_phase(train, val, fold_cfg, arch, dims, hooks);
    FoldResult out{static_cast<int>(f), folds[f], stats, std::move(trained.model),
                   std::move(trained.history), {}, {}};
    out.val_scores = score_dataset(out.model, val);
    std::vector<int> val_labels;
    for (const auto& s : val.samples) val_labels.push_back(s.label);
    out.metrics = evaluate_scores(out.val_scores, val_labels);
    results[f] = std::move(out);
  };

  const std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)),
                                                      1, folds.size());
  if (workers == 1) {
    for (std::size_t f = 0; f < folds.size(); ++f) run_fold(f);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t f; (f = next.fetch_add(1)) < folds.size();) {
          try {
            run_fold(f);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  CrossValidation cv;
  cv.report.horizon_hours = data.horizon_hours;
  cv.report.architecture = arch;
  for (auto& r : results) {
    cv.report.per_fold.push_back(r->metrics);
    cv.folds.push_back(std::move(*r));
  }
  const double k = static_cast<double>(cv.report.per_fold.size());
  for (const auto& m : cv.report.per_fold) {
    cv.report.average.accuracy += m.accuracy / k;
    cv.report.average.auroc += m.auroc / k;
    cv.report.average.auprc += m.auprc / k;
  }
  return cv;
}

}  // namespace vitalnet
