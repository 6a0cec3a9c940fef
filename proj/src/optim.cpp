#include "senti/optim.hpp"

#include <cmath>

namespace senti {

std::string to_string(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::AdamW: return "adamw";
    case OptimizerKind::Sgd: return "sgd";
    case OptimizerKind::RmsProp: return "rmsprop";
    case OptimizerKind::Rprop: return "rprop";
  }
  return "unknown";
}

OptimizerKind parse_optimizer(const std::string& name) {
  if (name == "adamw") return OptimizerKind::AdamW;
  if (name == "sgd") return OptimizerKind::Sgd;
  if (name == "rmsprop") return OptimizerKind::RmsProp;
  if (name == "rprop") return OptimizerKind::Rprop;
  throw ConfigError("unknown optimizer '" + name + "' (expected adamw, sgd, rmsprop or rprop)");
}

void Optimizer::step(ParamStore& params) {
  for (auto& [name, p] : params.items()) {
    if (p.grad.shape() != p.value.shape()) throw ContractError("parameter '" + name + "' has no gradient");
  }
  for (auto& [name, p] : params.items()) update(name, p);
}

void Sgd::update(const std::string&, Parameter& p) { p.value.array() -= lr_ * p.grad.array(); }

void AdamW::update(const std::string& name, Parameter& p) {
  auto [it, fresh] = state_.try_emplace(name);
  Moments& s = it->second;
  if (fresh) {
    s.m = Tensor::zeros_like(p.value);
    s.v = Tensor::zeros_like(p.value);
  }
  ++s.step;
  const auto g = p.grad.array();
  p.value.array() *= 1.0 - lr_ * opt_.weight_decay;
  s.m.array() = opt_.beta1 * s.m.array() + (1.0 - opt_.beta1) * g;
  s.v.array() = opt_.beta2 * s.v.array() + (1.0 - opt_.beta2) * g.square();
  const double bc1 = 1.0 - std::pow(opt_.beta1, static_cast<double>(s.step));
  const double bc2 = 1.0 - std::pow(opt_.beta2, static_cast<double>(s.step));
  p.value.array() -= lr_ * (s.m.array() / bc1) / ((s.v.array() / bc2).sqrt() + opt_.eps);
}

void RmsProp::update(const std::string& name, Parameter& p) {
  auto [it, fresh] = square_avg_.try_emplace(name);
  if (fresh) it->second = Tensor::zeros_like(p.value);
  Tensor& v = it->second;
  v.array() = alpha_ * v.array() + (1.0 - alpha_) * p.grad.array().square();
  p.value.array() -= lr_ * p.grad.array() / (v.array().sqrt() + eps_);
}

void Rprop::update(const std::string& name, Parameter& p) {
  auto [it, fresh] = state_.try_emplace(name);
  State& s = it->second;
  if (fresh) {
    s.prev_grad = Tensor::zeros_like(p.value);
    s.step_size = Tensor(p.value.shape(), lr_);
  }
  for (std::size_t i = 0; i < p.value.size(); ++i) {
    double g = p.grad[i];
    const double sign = g * s.prev_grad[i];
    if (sign > 0) {
      s.step_size[i] = std::min(s.step_size[i] * eta_plus_, step_max_);
    } else if (sign < 0) {
      s.step_size[i] = std::max(s.step_size[i] * eta_minus_, step_min_);
      g = 0.0;
    }
    if (g > 0) p.value[i] -= s.step_size[i];
    else if (g < 0) p.value[i] += s.step_size[i];
    s.prev_grad[i] = g;
  }
}

std::unique_ptr<Optimizer> make_optimizer(OptimizerKind kind, double learning_rate) {
  switch (kind) {
    case OptimizerKind::AdamW: return std::make_unique<AdamW>(learning_rate);
    case OptimizerKind::Sgd: return std::make_unique<Sgd>(learning_rate);
    case OptimizerKind::RmsProp: return std::make_unique<RmsProp>(learning_rate);
    case OptimizerKind::Rprop: return std::make_unique<Rprop>(learning_rate);
  }
  throw ConfigError("unhandled optimizer kind");
}

}  // namespace senti
