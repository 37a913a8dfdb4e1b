#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace clarify {

/// Sparse binary example: indices of the features equal to 1.
struct SparseExample {
  std::vector<std::uint32_t> active;
  double label = 0.0;  // 1 = yes, 0 = no
};

struct TrainingOptions {
  double learning_rate = 0.5;
  int epochs = 40;
  std::size_t batch_size = 32;
  std::uint64_t seed = 0;
};

/// Binary logistic classifier; weights has one entry per feature plus a
/// trailing bias.
struct LogisticModel {
  std::vector<double> weights;
  std::vector<std::string> feature_names;  // optional, used for persistence

  int epochs = 0;
  double learning_rate = 0.0;  // final rate, after any step-size backoff
  double final_loss = 0.0;
  std::vector<double> epoch_losses;

  std::size_t dimension() const noexcept { return weights.empty() ? 0 : weights.size() - 1; }
  double logit(std::span<const std::uint32_t> active) const;
  double logit_dense(std::span<const double> features) const;
  double probability(std::span<const std::uint32_t> active) const;

  /// Flat text record: '#'-prefixed metadata lines, then one
  /// "<feature name>\t<weight>" line per weight, the bias named "bias".
  void save(std::ostream& out) const;
  static LogisticModel load(std::istream& in);
};

double sigmoid(double z) noexcept;

/// Mean binary cross-entropy of the model over the examples.
double mean_cross_entropy(std::span<const double> weights, std::span<const SparseExample> examples);

/// Gradient of mean_cross_entropy with respect to the weights (bias last).
std::vector<double> cross_entropy_gradient(std::span<const double> weights,
                                           std::span<const SparseExample> examples);

/// Mini-batch gradient descent on mean cross-entropy, examples reshuffled
/// each epoch by the seed.
///
/// The full-data loss is measured after every epoch. An epoch that raises
/// it by more than 1e-6 is rolled back and repeated at half the step size,
/// so the recorded loss sequence is non-increasing. Throws
/// PreconditionError for empty input or a single class and TrainingError
/// if the loss stops being finite.
LogisticModel train_logistic(std::span<const SparseExample> examples, std::size_t dimension,
                             const TrainingOptions& options);

}  // namespace clarify
