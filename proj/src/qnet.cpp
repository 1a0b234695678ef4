#include "pedcross/qnet.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pedcross {

QNet::QNet(Variant variant, std::size_t in_dim, std::size_t hidden1, std::size_t hidden2) : variant_(variant) {
  if (in_dim == 0 || hidden1 == 0 || hidden2 == 0) throw std::invalid_argument("QNet: layer sizes must be positive");
  const std::array<std::pair<std::size_t, std::size_t>, 4> dims{{
      {in_dim, hidden1}, {hidden1, hidden2}, {hidden2, 1}, {hidden2, 2}}};
  std::size_t offset = 0;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    layers_[i] = LayerShape{dims[i].first, dims[i].second, offset};
    offset = layers_[i].end();
  }
  params_.assign(offset, 0.0);
}

QNet QNet::random(Variant variant, std::size_t in_dim, std::size_t hidden1, std::size_t hidden2, Rng& rng) {
  QNet net(variant, in_dim, hidden1, hidden2);
  for (const auto& l : net.layers_) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(l.in));
    std::uniform_real_distribution<double> u(-bound, bound);
    for (std::size_t i = l.offset; i < l.end(); ++i) net.params_[i] = u(rng);
  }
  return net;
}

std::span<double> QNet::weights(LayerId id) {
  const auto& l = layer(id);
  return std::span<double>(params_).subspan(l.offset, l.weight_count());
}
std::span<double> QNet::biases(LayerId id) {
  const auto& l = layer(id);
  return std::span<double>(params_).subspan(l.bias_offset(), l.out);
}
std::span<const double> QNet::weights(LayerId id) const {
  const auto& l = layer(id);
  return std::span<const double>(params_).subspan(l.offset, l.weight_count());
}
std::span<const double> QNet::biases(LayerId id) const {
  const auto& l = layer(id);
  return std::span<const double>(params_).subspan(l.bias_offset(), l.out);
}

bool QNet::same_shape(const QNet& other) const {
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (layers_[i].in != other.layers_[i].in || layers_[i].out != other.layers_[i].out) return false;
  }
  return true;
}

namespace {

// out = W x + b for a layer stored in params.
void affine(const double* params, const LayerShape& l, const double* x, double* out) {
  const double* w = params + l.offset;
  const double* b = params + l.bias_offset();
  for (std::size_t r = 0; r < l.out; ++r) {
    const double* row = w + r * l.in;
    double acc = b[r];
    for (std::size_t c = 0; c < l.in; ++c) acc += row[c] * x[c];
    out[r] = acc;
  }
}

struct Activations {
  std::vector<double> z1, h1, z2, h2;
  double value = 0.0;
  double adv[2] = {0.0, 0.0};
};

QValues run(const QNet& net, std::span<const double> obs, Activations& a) {
  if (obs.size() != net.in_dim()) {
    throw std::invalid_argument("QNet: observation has " + std::to_string(obs.size()) + " features, network expects " +
                                std::to_string(net.in_dim()));
  }
  const double* p = net.params().data();
  const auto& l1 = net.layer(LayerId::hidden1);
  const auto& l2 = net.layer(LayerId::hidden2);
  a.z1.resize(l1.out);
  a.h1.resize(l1.out);
  a.z2.resize(l2.out);
  a.h2.resize(l2.out);
  affine(p, l1, obs.data(), a.z1.data());
  for (std::size_t i = 0; i < l1.out; ++i) a.h1[i] = a.z1[i] > 0.0 ? a.z1[i] : 0.0;
  affine(p, l2, a.h1.data(), a.z2.data());
  for (std::size_t i = 0; i < l2.out; ++i) a.h2[i] = a.z2[i] > 0.0 ? a.z2[i] : 0.0;
  affine(p, net.layer(LayerId::value), a.h2.data(), &a.value);
  affine(p, net.layer(LayerId::advantage), a.h2.data(), a.adv);
  const double mean_adv = 0.5 * (a.adv[0] + a.adv[1]);
  return {a.value + a.adv[0] - mean_adv, a.value + a.adv[1] - mean_adv};
}

// grad_w += g * x^T, grad_b += g.
void accumulate_outer(double* grad, const LayerShape& l, const double* g, const double* x) {
  double* gw = grad + l.offset;
  double* gb = grad + l.bias_offset();
  for (std::size_t r = 0; r < l.out; ++r) {
    const double gr = g[r];
    if (gr == 0.0) continue;
    double* row = gw + r * l.in;
    for (std::size_t c = 0; c < l.in; ++c) row[c] += gr * x[c];
    gb[r] += gr;
  }
}

// back += W^T g
void backprop_input(const double* params, const LayerShape& l, const double* g, double* back) {
  const double* w = params + l.offset;
  for (std::size_t r = 0; r < l.out; ++r) {
    const double gr = g[r];
    if (gr == 0.0) continue;
    const double* row = w + r * l.in;
    for (std::size_t c = 0; c < l.in; ++c) back[c] += gr * row[c];
  }
}

}  // namespace

QValues QNet::forward(std::span<const double> obs) const {
  thread_local Activations a;
  return run(*this, obs, a);
}

double td_loss(const QNet& net, std::span<const TdSample> batch, std::vector<double>* grad) {
  if (batch.empty()) throw std::invalid_argument("td_loss: empty batch");
  if (grad) grad->assign(net.parameter_count(), 0.0);
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  const double* p = net.params().data();
  const auto& l1 = net.layer(LayerId::hidden1);
  const auto& l2 = net.layer(LayerId::hidden2);
  Activations a;
  std::vector<double> d2(l2.out), d1(l1.out);
  double loss = 0.0;
  for (const auto& s : batch) {
    const QValues q = run(net, s.obs, a);
    const double err = q[s.action] - s.target;
    loss += err * err * inv_n;
    if (!grad) continue;

    const double g = 2.0 * err * inv_n;
    const std::size_t taken = s.action == Action::go ? 1 : 0;
    double g_adv[2];
    g_adv[taken] = 0.5 * g;
    g_adv[1 - taken] = -0.5 * g;
    double* gp = grad->data();
    accumulate_outer(gp, net.layer(LayerId::value), &g, a.h2.data());
    accumulate_outer(gp, net.layer(LayerId::advantage), g_adv, a.h2.data());

    std::fill(d2.begin(), d2.end(), 0.0);
    backprop_input(p, net.layer(LayerId::value), &g, d2.data());
    backprop_input(p, net.layer(LayerId::advantage), g_adv, d2.data());
    for (std::size_t i = 0; i < l2.out; ++i) {
      if (a.z2[i] <= 0.0) d2[i] = 0.0;
    }
    accumulate_outer(gp, l2, d2.data(), a.h1.data());

    std::fill(d1.begin(), d1.end(), 0.0);
    backprop_input(p, l2, d2.data(), d1.data());
    for (std::size_t i = 0; i < l1.out; ++i) {
      if (a.z1[i] <= 0.0) d1[i] = 0.0;
    }
    accumulate_outer(gp, l1, d1.data(), s.obs.data());
  }
  return loss;
}

Optimizer::Optimizer(const OptimizerConfig& cfg, std::size_t parameter_count) : cfg_(cfg) {
  if (!(cfg.learning_rate > 0.0)) throw std::invalid_argument("optimizer: learning rate must be positive");
  if (cfg.kind == OptimizerKind::adam) {
    m_.assign(parameter_count, 0.0);
    v_.assign(parameter_count, 0.0);
  }
}

void Optimizer::apply(QNet& net, std::span<const double> grad) {
  auto params = net.params();
  if (grad.size() != params.size()) throw std::invalid_argument("optimizer: gradient size mismatch");
  if (cfg_.kind == OptimizerKind::sgd) {
    for (std::size_t i = 0; i < params.size(); ++i) params[i] -= cfg_.learning_rate * grad[i];
    return;
  }
  if (m_.size() != params.size()) throw std::invalid_argument("optimizer: state size mismatch");
  ++steps_;
  const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(steps_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * grad[i];
    v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * grad[i] * grad[i];
    const double m_hat = m_[i] / c1;
    const double v_hat = v_[i] / c2;
    params[i] -= cfg_.learning_rate * m_hat / (std::sqrt(v_hat) + cfg_.epsilon);
  }
}

}  // namespace pedcross
