#include "clarify/logistic.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "clarify/errors.hpp"
#include "clarify/rng.hpp"

namespace clarify {

double sigmoid(double z) noexcept {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

namespace {

double sparse_logit(std::span<const double> w, std::span<const std::uint32_t> active) {
  double z = w.back();
  for (auto i : active) z += w[i];
  return z;
}

// -log p(label) computed from the logit without forming p.
double example_loss(double z, double label) {
  // log(1 + e^z) - label * z, stable for large |z|.
  const double softplus = z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
  return softplus - label * z;
}

}  // namespace

double LogisticModel::logit(std::span<const std::uint32_t> active) const {
  for (auto i : active)
    if (i >= dimension()) throw PreconditionError("feature index beyond model dimension");
  return sparse_logit(weights, active);
}

double LogisticModel::logit_dense(std::span<const double> features) const {
  if (features.size() != dimension())
    throw PreconditionError("feature dimension " + std::to_string(features.size()) + " does not match model " +
                            std::to_string(dimension()));
  double z = weights.back();
  for (std::size_t i = 0; i < features.size(); ++i) z += weights[i] * features[i];
  return z;
}

double LogisticModel::probability(std::span<const std::uint32_t> active) const { return sigmoid(logit(active)); }

void LogisticModel::save(std::ostream& out) const {
  out << "# clarify-logistic 1\n";
  out << "# dimension " << dimension() << '\n';
  out << "# epochs " << epochs << '\n';
  out << std::setprecision(17);
  out << "# learning_rate " << learning_rate << '\n';
  out << "# final_loss " << final_loss << '\n';
  for (std::size_t i = 0; i < dimension(); ++i) {
    const std::string name = i < feature_names.size() ? feature_names[i] : "f" + std::to_string(i);
    out << name << '\t' << weights[i] << '\n';
  }
  out << "bias\t" << weights.back() << '\n';
}

LogisticModel LogisticModel::load(std::istream& in) {
  LogisticModel m;
  std::string line;
  std::size_t declared = 0;
  bool saw_header = false;
  bool saw_bias = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream meta(line.substr(1));
      std::string key;
      meta >> key;
      if (key == "clarify-logistic") saw_header = true;
      else if (key == "dimension") meta >> declared;
      else if (key == "epochs") meta >> m.epochs;
      else if (key == "learning_rate") meta >> m.learning_rate;
      else if (key == "final_loss") meta >> m.final_loss;
      continue;
    }
    if (saw_bias) throw FormatError("model record has lines after the bias");
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw FormatError("model line without a tab: " + line);
    const std::string name = line.substr(0, tab);
    double w = 0.0;
    try {
      w = std::stod(line.substr(tab + 1));
    } catch (const std::exception&) {
      throw FormatError("bad weight in model line: " + line);
    }
    if (!std::isfinite(w)) throw FormatError("non-finite weight for " + name);
    if (name == "bias") saw_bias = true;
    else m.feature_names.push_back(name);
    m.weights.push_back(w);
  }
  if (!saw_header) throw FormatError("missing model header");
  if (!saw_bias) throw FormatError("model record has no bias");
  if (declared != m.feature_names.size())
    throw FormatError("model declares dimension " + std::to_string(declared) + " but lists " +
                      std::to_string(m.feature_names.size()) + " weights");
  return m;
}

double mean_cross_entropy(std::span<const double> weights, std::span<const SparseExample> examples) {
  if (examples.empty()) return 0.0;
  double total = 0.0;
  for (const auto& ex : examples) total += example_loss(sparse_logit(weights, ex.active), ex.label);
  return total / static_cast<double>(examples.size());
}

std::vector<double> cross_entropy_gradient(std::span<const double> weights,
                                           std::span<const SparseExample> examples) {
  std::vector<double> grad(weights.size(), 0.0);
  if (examples.empty()) return grad;
  const double scale = 1.0 / static_cast<double>(examples.size());
  for (const auto& ex : examples) {
    const double r = (sigmoid(sparse_logit(weights, ex.active)) - ex.label) * scale;
    for (auto i : ex.active) grad[i] += r;
    grad.back() += r;
  }
  return grad;
}

LogisticModel train_logistic(std::span<const SparseExample> examples, std::size_t dimension,
                             const TrainingOptions& options) {
  if (examples.empty()) throw PreconditionError("no training examples");
  const bool has_pos = std::any_of(examples.begin(), examples.end(), [](const auto& e) { return e.label > 0.5; });
  const bool has_neg = std::any_of(examples.begin(), examples.end(), [](const auto& e) { return e.label <= 0.5; });
  if (!has_pos || !has_neg) throw PreconditionError("training data needs both labels");
  if (options.epochs < 0 || !(options.learning_rate > 0.0) || options.batch_size == 0)
    throw PreconditionError("invalid training options");
  for (const auto& ex : examples)
    for (auto i : ex.active)
      if (i >= dimension) throw PreconditionError("feature index beyond declared dimension");

  LogisticModel model;
  model.weights.assign(dimension + 1, 0.0);
  model.learning_rate = options.learning_rate;

  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(options.seed, {0x6c6f6769ULL}));

  double lr = options.learning_rate;
  double previous = mean_cross_entropy(model.weights, examples);
  std::vector<double> grad(model.weights.size());
  for (int epoch = 1; epoch <= options.epochs; ++epoch) {
    rng.shuffle(order);
    const auto snapshot = model.weights;
    double loss = 0.0;
    for (int attempt = 0;; ++attempt) {
      for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
        const std::size_t stop = std::min(order.size(), start + options.batch_size);
        std::fill(grad.begin(), grad.end(), 0.0);
        const double scale = 1.0 / static_cast<double>(stop - start);
        for (std::size_t b = start; b < stop; ++b) {
          const auto& ex = examples[order[b]];
          const double r = (sigmoid(sparse_logit(model.weights, ex.active)) - ex.label) * scale;
          for (auto i : ex.active) grad[i] += r;
          grad.back() += r;
        }
        for (std::size_t i = 0; i < grad.size(); ++i) model.weights[i] -= lr * grad[i];
      }
      loss = mean_cross_entropy(model.weights, examples);
      if (!std::isfinite(loss)) throw TrainingError("loss diverged at epoch " + std::to_string(epoch), epoch);
      if (loss <= previous + 1e-6) break;
      if (attempt >= 40) throw TrainingError("loss failed to decrease at epoch " + std::to_string(epoch), epoch);
      model.weights = snapshot;
      lr *= 0.5;
    }
    model.epoch_losses.push_back(loss);
    previous = loss;
  }
  model.epochs = options.epochs;
  model.learning_rate = lr;
  model.final_loss = previous;
  return model;
}

}  // namespace clarify
