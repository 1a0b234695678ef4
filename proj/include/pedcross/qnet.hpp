#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "pedcross/env.hpp"
#include "pedcross/observation.hpp"

namespace pedcross {

struct QValues {
  double not_go = 0.0;
  double go = 0.0;

  double operator[](Action a) const { return a == Action::go ? go : not_go; }
  // Ties go to NotGo.
  Action argmax() const { return go > not_go ? Action::go : Action::not_go; }
  double max() const { return go > not_go ? go : not_go; }
};

// Dense layer view into the flat parameter vector. Weights are row-major
// [out x in], followed by the out biases.
struct LayerShape {
  std::size_t in = 0;
  std::size_t out = 0;
  std::size_t offset = 0;

  std::size_t weight_count() const { return in * out; }
  std::size_t bias_offset() const { return offset + weight_count(); }
  std::size_t end() const { return bias_offset() + out; }

  friend bool operator==(const LayerShape&, const LayerShape&) = default;
};

enum class LayerId : std::size_t { hidden1 = 0, hidden2 = 1, value = 2, advantage = 3 };

// Dueling Q-network: in -> h1 -> h2 (ReLU), then a scalar value head and a
// two-way advantage head combined as V + A - mean(A).
class QNet {
 public:
  QNet() = default;
  QNet(Variant variant, std::size_t in_dim, std::size_t hidden1, std::size_t hidden2);

  // Weights and biases uniform in +-1/sqrt(fan_in).
  static QNet random(Variant variant, std::size_t in_dim, std::size_t hidden1, std::size_t hidden2, Rng& rng);

  Variant variant() const { return variant_; }
  std::size_t in_dim() const { return layers_[0].in; }
  std::size_t hidden1() const { return layers_[0].out; }
  std::size_t hidden2() const { return layers_[1].out; }

  const LayerShape& layer(LayerId id) const { return layers_[static_cast<std::size_t>(id)]; }
  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }
  std::size_t parameter_count() const { return params_.size(); }

  std::span<double> weights(LayerId id);
  std::span<double> biases(LayerId id);
  std::span<const double> weights(LayerId id) const;
  std::span<const double> biases(LayerId id) const;

  // Throws std::invalid_argument on input dimension mismatch.
  QValues forward(std::span<const double> obs) const;

  bool same_shape(const QNet& other) const;

  friend bool operator==(const QNet&, const QNet&) = default;

 private:
  Variant variant_ = Variant::BM;
  std::array<LayerShape, 4> layers_{};
  std::vector<double> params_;
};

struct TdSample {
  std::span<const double> obs;
  Action action = Action::not_go;
  double target = 0.0;
};

// Mean squared error of Q(s, a) against fixed targets. When grad is non-null
// it receives d(loss)/d(params), sized like net.params().
double td_loss(const QNet& net, std::span<const TdSample> batch, std::vector<double>* grad);

enum class OptimizerKind { sgd, adam };

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::sgd;
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class Optimizer {
 public:
  Optimizer() = default;
  Optimizer(const OptimizerConfig& cfg, std::size_t parameter_count);

  void apply(QNet& net, std::span<const double> grad);
  const OptimizerConfig& config() const { return cfg_; }

 private:
  OptimizerConfig cfg_{};
  std::vector<double> m_;
  std::vector<double> v_;
  long long steps_ = 0;
};

}  // namespace pedcross
