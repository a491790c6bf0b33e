#include "fedact/workload.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fedact/kernels.hpp"

namespace fedact {

void DatasetParams::validate() const {
  if (classes < 2) throw ConfigError("workload.classes: must be >= 2");
  if (num_samples < classes) throw ConfigError("workload.num_samples: must be >= classes");
  if (dim < 1) throw ConfigError("workload.dim: must be >= 1");
  if (!(cluster_spread >= 0.0) || !std::isfinite(cluster_spread)) {
    throw ConfigError("workload.cluster_spread: must be finite and >= 0");
  }
  if (!(class_separation > 0.0) || !std::isfinite(class_separation)) {
    throw ConfigError("workload.class_separation: must be finite and > 0");
  }
}

SyntheticDataset generate_dataset(const DatasetParams& params, std::uint64_t seed) {
  params.validate();
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<double> means(params.classes * params.dim);
  for (double& m : means) m = params.class_separation * normal(rng);

  std::vector<std::uint32_t> labels(params.num_samples);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    labels[i] = static_cast<std::uint32_t>(i % params.classes);
  }
  std::shuffle(labels.begin(), labels.end(), rng);

  SyntheticDataset data;
  data.dim = params.dim;
  data.classes = params.classes;
  data.labels = std::move(labels);
  data.features.resize(params.num_samples * params.dim);
  for (std::size_t i = 0; i < params.num_samples; ++i) {
    const double* mean = means.data() + data.labels[i] * params.dim;
    for (std::size_t j = 0; j < params.dim; ++j) {
      data.features[i * params.dim + j] = mean[j] + params.cluster_spread * normal(rng);
    }
  }
  return data;
}

namespace {

SyntheticDataset subset(const SyntheticDataset& data, std::span<const std::size_t> indices) {
  SyntheticDataset out;
  out.dim = data.dim;
  out.classes = data.classes;
  out.labels.reserve(indices.size());
  out.features.reserve(indices.size() * data.dim);
  for (std::size_t i : indices) {
    out.labels.push_back(data.labels[i]);
    const auto r = data.row(i);
    out.features.insert(out.features.end(), r.begin(), r.end());
  }
  return out;
}

}  // namespace

std::pair<SyntheticDataset, SyntheticDataset> split_holdout(const SyntheticDataset& data,
                                                            double fraction,
                                                            std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw ConfigError("workload.holdout: must lie in (0, 1)");
  }
  const std::size_t n = data.size();
  const auto held = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  if (held == 0 || held >= n) throw ConfigError("workload.holdout: leaves an empty split");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<std::size_t> test(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(held));
  std::vector<std::size_t> train(order.begin() + static_cast<std::ptrdiff_t>(held), order.end());
  std::sort(test.begin(), test.end());
  std::sort(train.begin(), train.end());
  return {subset(data, train), subset(data, test)};
}

namespace {

// Splits `items` into `parts` contiguous chunks whose sizes differ by at most one.
std::vector<std::vector<std::size_t>> chunk(const std::vector<std::size_t>& items,
                                            std::size_t parts) {
  std::vector<std::vector<std::size_t>> out(parts);
  const std::size_t base = items.size() / parts;
  const std::size_t extra = items.size() % parts;
  std::size_t pos = 0;
  for (std::size_t p = 0; p < parts; ++p) {
    const std::size_t len = base + (p < extra ? 1 : 0);
    out[p].assign(items.begin() + static_cast<std::ptrdiff_t>(pos),
                  items.begin() + static_cast<std::ptrdiff_t>(pos + len));
    pos += len;
  }
  return out;
}

Partition partition_iid(const SyntheticDataset& data, std::size_t num_devices, Rng& rng) {
  if (data.size() < num_devices) {
    throw ConfigError("workload.num_samples: fewer training samples than devices");
  }
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  return chunk(order, num_devices);
}

Partition partition_non_iid(const SyntheticDataset& data, std::size_t num_devices, Rng& rng) {
  const std::size_t classes = data.classes;
  const std::size_t slots = 2 * num_devices;
  if (slots < classes) {
    throw ConfigError("workload.partition: non-IID needs at least classes/2 devices");
  }

  // Subsets per class: floor(2K/C), plus one for a random set of classes.
  std::vector<std::size_t> class_order(classes);
  std::iota(class_order.begin(), class_order.end(), std::size_t{0});
  std::shuffle(class_order.begin(), class_order.end(), rng);
  std::vector<std::size_t> subsets(classes, slots / classes);
  for (std::size_t i = 0; i < slots % classes; ++i) ++subsets[class_order[i]];

  std::vector<std::vector<std::size_t>> by_class(classes);
  for (std::size_t i = 0; i < data.size(); ++i) by_class[data.labels[i]].push_back(i);
  std::vector<std::vector<std::vector<std::size_t>>> pieces(classes);
  for (std::size_t c = 0; c < classes; ++c) {
    if (by_class[c].size() < subsets[c]) {
      throw ConfigError("fleet.num_devices: too many devices for the non-IID split of class " +
                        std::to_string(c));
    }
    std::shuffle(by_class[c].begin(), by_class[c].end(), rng);
    pieces[c] = chunk(by_class[c], subsets[c]);
  }

  // Deal class labels in pairs; fix any pair holding one class twice by
  // swapping with a pair that holds neither copy.
  std::vector<std::size_t> deck;
  deck.reserve(slots);
  for (std::size_t c = 0; c < classes; ++c) deck.insert(deck.end(), subsets[c], c);
  std::shuffle(deck.begin(), deck.end(), rng);
  for (std::size_t p = 0; p < num_devices; ++p) {
    const std::size_t c = deck[2 * p];
    if (deck[2 * p + 1] != c) continue;
    bool fixed = false;
    for (std::size_t q = 0; q < num_devices && !fixed; ++q) {
      if (q != p && deck[2 * q] != c && deck[2 * q + 1] != c) {
        std::swap(deck[2 * p + 1], deck[2 * q]);
        fixed = true;
      }
    }
    if (!fixed) throw std::logic_error("non-IID partition: no repair pair found");
  }

  std::vector<std::size_t> next(classes, 0);
  Partition out(num_devices);
  for (std::size_t d = 0; d < num_devices; ++d) {
    for (std::size_t s = 0; s < 2; ++s) {
      const std::size_t c = deck[2 * d + s];
      const auto& piece = pieces[c][next[c]++];
      out[d].insert(out[d].end(), piece.begin(), piece.end());
    }
    std::sort(out[d].begin(), out[d].end());
  }
  return out;
}

}  // namespace

Partition partition(const SyntheticDataset& data, std::size_t num_devices, PartitionMode mode,
                    std::uint64_t seed) {
  if (num_devices == 0) throw ConfigError("fleet.num_devices: must be >= 1");
  Rng rng(seed);
  return mode == PartitionMode::kIid ? partition_iid(data, num_devices, rng)
                                     : partition_non_iid(data, num_devices, rng);
}

ModelState ModelState::zeros(std::size_t dim, std::size_t classes, double step_size) {
  ModelState m;
  m.dim = dim;
  m.classes = classes;
  m.step_size = step_size;
  m.parameters.assign(classes * dim + classes, 0.0);
  return m;
}

namespace {

void check_shape(const ModelState& model, const SyntheticDataset& data) {
  if (model.dim != data.dim || model.classes != data.classes ||
      model.parameters.size() != model.parameter_count()) {
    throw std::invalid_argument("model shape does not match the dataset");
  }
}

// Fills `logits` and returns log-sum-exp.
double forward(std::span<const double> params, std::size_t dim, std::size_t classes,
               std::span<const double> x, std::vector<double>& logits) {
  const double* bias = params.data() + classes * dim;
  double peak = -INFINITY;
  for (std::size_t c = 0; c < classes; ++c) {
    logits[c] = kernels::dot(params.subspan(c * dim, dim), x) + bias[c];
    peak = std::max(peak, logits[c]);
  }
  double sum = 0.0;
  for (std::size_t c = 0; c < classes; ++c) sum += std::exp(logits[c] - peak);
  return peak + std::log(sum);
}

}  // namespace

LossGradient loss_and_gradient(const ModelState& model, const SyntheticDataset& data,
                               std::span<const std::size_t> indices) {
  check_shape(model, data);
  if (indices.empty()) throw std::invalid_argument("loss_and_gradient: empty batch");
  const std::size_t dim = model.dim;
  const std::size_t classes = model.classes;

  LossGradient out;
  out.gradient.assign(model.parameter_count(), 0.0);
  std::span<double> grad(out.gradient);
  std::vector<double> logits(classes);
  for (std::size_t i : indices) {
    const auto x = data.row(i);
    const std::uint32_t y = data.labels[i];
    const double lse = forward(model.parameters, dim, classes, x, logits);
    out.loss += lse - logits[y];
    for (std::size_t c = 0; c < classes; ++c) {
      const double coef = std::exp(logits[c] - lse) - (c == y ? 1.0 : 0.0);
      kernels::axpy(coef, x, grad.subspan(c * dim, dim));
      grad[classes * dim + c] += coef;
    }
  }
  const double scale = 1.0 / static_cast<double>(indices.size());
  out.loss *= scale;
  for (double& g : out.gradient) g *= scale;
  return out;
}

std::vector<double> client_update(const ModelState& model, const SyntheticDataset& data,
                                  std::span<const std::size_t> shard, std::uint32_t epochs,
                                  std::uint32_t batch_size, Rng& rng) {
  if (shard.empty()) throw std::invalid_argument("client_update: empty shard");
  if (batch_size == 0) throw std::invalid_argument("client_update: batch_size must be > 0");

  ModelState local = model;
  std::vector<std::size_t> order(shard.begin(), shard.end());
  for (std::uint32_t e = 0; e < epochs; ++e) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
      const std::size_t len = std::min<std::size_t>(batch_size, order.size() - start);
      const LossGradient lg =
          loss_and_gradient(local, data, std::span(order).subspan(start, len));
      for (double g : lg.gradient) {
        if (!std::isfinite(g)) throw WorkloadDivergence("non-finite gradient in client update");
      }
      kernels::axpy(-local.step_size, lg.gradient, local.parameters);
    }
  }
  return std::move(local.parameters);
}

std::vector<double> aggregate(std::span<const WeightedUpdate> updates) {
  if (updates.empty()) throw std::invalid_argument("aggregate: no updates");
  const std::size_t len = updates.front().parameters.size();
  for (const WeightedUpdate& u : updates) {
    if (u.parameters.size() != len) throw std::invalid_argument("aggregate: length mismatch");
  }
  std::vector<double> mean(updates.front().parameters.begin(),
                           updates.front().parameters.end());
  double seen = static_cast<double>(updates.front().samples);
  for (std::size_t i = 1; i < updates.size(); ++i) {
    const double w = static_cast<double>(updates[i].samples);
    seen += w;
    if (seen > 0.0) kernels::lerp(w / seen, updates[i].parameters, mean);
  }
  return mean;
}

Evaluation evaluate(const ModelState& model, const SyntheticDataset& held_out) {
  check_shape(model, held_out);
  if (held_out.size() == 0) throw std::invalid_argument("evaluate: empty split");
  std::vector<double> logits(model.classes);
  double loss = 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < held_out.size(); ++i) {
    const double lse = forward(model.parameters, model.dim, model.classes, held_out.row(i), logits);
    const std::uint32_t y = held_out.labels[i];
    loss += std::max(0.0, lse - logits[y]);
    const auto best = std::max_element(logits.begin(), logits.end()) - logits.begin();
    if (static_cast<std::uint32_t>(best) == y) ++correct;
  }
  const double n = static_cast<double>(held_out.size());
  return {loss / n, static_cast<double>(correct) / n};
}

double surrogate_progress(double current_loss, double coverage, double decay, double floor) {
  coverage = std::clamp(coverage, 0.0, 1.0);
  return floor + (current_loss - floor) * (1.0 - decay * coverage);
}

void WorkloadParams::validate() const {
  data.validate();
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("workload.learning_rate: must be finite and > 0");
  }
  if (!(holdout > 0.0 && holdout < 1.0)) throw ConfigError("workload.holdout: must lie in (0, 1)");
  if (!(surrogate_decay > 0.0 && surrogate_decay < 1.0)) {
    throw ConfigError("workload.surrogate_decay: must lie in (0, 1)");
  }
  if (!(surrogate_floor >= 0.0) ||
      surrogate_floor >= std::log(static_cast<double>(data.classes))) {
    throw ConfigError("workload.surrogate_floor: must lie in [0, ln(classes))");
  }
}

namespace {

class FedAvgWorkload final : public JobWorkload {
 public:
  FedAvgWorkload(const WorkloadParams& params, const JobSpec& job, std::size_t num_devices,
                 const StreamFactory& streams)
      : job_(job), key_(hash_name(job.name)), streams_(streams) {
    const SyntheticDataset full =
        generate_dataset(params.data, streams.derive(StreamTag::kDataset, key_));
    auto [train, test] =
        split_holdout(full, params.holdout, streams.derive(StreamTag::kHoldout, key_));
    train_ = std::move(train);
    test_ = std::move(test);
    shards_ = partition(train_, num_devices, params.partition,
                        streams.derive(StreamTag::kPartition, key_));
    model_ = ModelState::zeros(params.data.dim, params.data.classes, params.learning_rate);
    current_ = evaluate(model_, test_);
  }

  std::size_t shard_size(DeviceId device) const override { return shards_.at(device).size(); }
  Evaluation current() const override { return current_; }

  Evaluation train_round(std::span<const DeviceId> devices, std::uint32_t round) override {
    std::vector<DeviceId> ordered(devices.begin(), devices.end());
    std::sort(ordered.begin(), ordered.end());
    std::vector<std::vector<double>> locals;
    locals.reserve(ordered.size());
    for (DeviceId k : ordered) {
      Rng rng = streams_.stream(StreamTag::kTrain, key_, round, k);
      locals.push_back(client_update(model_, train_, shards_.at(k), job_.local_epochs,
                                     job_.batch_size, rng));
    }
    std::vector<WeightedUpdate> updates;
    updates.reserve(ordered.size());
    for (std::size_t i = 0; i < ordered.size(); ++i) {
      updates.push_back({locals[i], shards_[ordered[i]].size()});
    }
    model_.parameters = aggregate(updates);
    current_ = evaluate(model_, test_);
    if (!std::isfinite(current_.loss)) throw WorkloadDivergence("non-finite held-out loss");
    return current_;
  }

 private:
  JobSpec job_;
  std::uint64_t key_;
  StreamFactory streams_;
  SyntheticDataset train_;
  SyntheticDataset test_;
  Partition shards_;
  ModelState model_;
  Evaluation current_;
};

// Loss follows surrogate_progress with coverage = share of classes held by
// the round's participants; accuracy rises linearly from chance as the loss
// falls from ln(C) to the floor.
class SurrogateWorkload final : public JobWorkload {
 public:
  SurrogateWorkload(const WorkloadParams& params, const JobSpec& job, std::size_t num_devices,
                    const StreamFactory& streams)
      : classes_(params.data.classes),
        decay_(params.surrogate_decay),
        floor_(params.surrogate_floor),
        initial_loss_(std::log(static_cast<double>(params.data.classes))) {
    const std::uint64_t key = hash_name(job.name);
    const SyntheticDataset full =
        generate_dataset(params.data, streams.derive(StreamTag::kDataset, key));
    auto [train, test] =
        split_holdout(full, params.holdout, streams.derive(StreamTag::kHoldout, key));
    const Partition shards = partition(train, num_devices, params.partition,
                                       streams.derive(StreamTag::kPartition, key));
    sizes_.reserve(shards.size());
    device_classes_.reserve(shards.size());
    for (const auto& shard : shards) {
      sizes_.push_back(shard.size());
      std::vector<char> held(classes_, 0);
      for (std::size_t i : shard) held[train.labels[i]] = 1;
      device_classes_.push_back(std::move(held));
    }
    current_ = {initial_loss_, to_accuracy(initial_loss_)};
  }

  std::size_t shard_size(DeviceId device) const override { return sizes_.at(device); }
  Evaluation current() const override { return current_; }

  Evaluation train_round(std::span<const DeviceId> devices, std::uint32_t) override {
    std::vector<char> covered(classes_, 0);
    for (DeviceId k : devices) {
      const auto& held = device_classes_.at(k);
      for (std::size_t c = 0; c < classes_; ++c) covered[c] |= held[c];
    }
    const double coverage =
        static_cast<double>(std::count(covered.begin(), covered.end(), 1)) /
        static_cast<double>(classes_);
    const double loss = surrogate_progress(current_.loss, coverage, decay_, floor_);
    current_ = {loss, to_accuracy(loss)};
    return current_;
  }

 private:
  double to_accuracy(double loss) const {
    const double chance = 1.0 / static_cast<double>(classes_);
    const double progress = (initial_loss_ - loss) / (initial_loss_ - floor_);
    return chance + (1.0 - chance) * std::clamp(progress, 0.0, 1.0);
  }

  std::size_t classes_;
  double decay_;
  double floor_;
  double initial_loss_;
  std::vector<std::size_t> sizes_;
  std::vector<std::vector<char>> device_classes_;
  Evaluation current_;
};

}  // namespace

std::unique_ptr<JobWorkload> JobWorkload::create(const WorkloadParams& params, const JobSpec& job,
                                                 std::size_t num_devices,
                                                 const StreamFactory& streams) {
  params.validate();
  if (params.mode == WorkloadMode::kSurrogate) {
    return std::make_unique<SurrogateWorkload>(params, job, num_devices, streams);
  }
  return std::make_unique<FedAvgWorkload>(params, job, num_devices, streams);
}

}  // namespace fedact
