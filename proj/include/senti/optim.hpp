#pragma once

#include <map>
#include <memory>
#include <string>

#include "senti/params.hpp"

namespace senti {

enum class OptimizerKind { AdamW, Sgd, RmsProp, Rprop };

std::string to_string(OptimizerKind kind);
OptimizerKind parse_optimizer(const std::string& name);

// Updates every parameter of a store from its accumulated gradient. Per-
// parameter state is keyed by parameter name. Steps are deterministic: the
// same state, parameters and gradients always give bit-identical updates.
class Optimizer {
 public:
  explicit Optimizer(double learning_rate) : lr_(learning_rate) {}
  virtual ~Optimizer() = default;

  // Throws ContractError if a parameter has no gradient buffer of its shape.
  void step(ParamStore& params);

  double learning_rate() const noexcept { return lr_; }

 protected:
  virtual void update(const std::string& name, Parameter& p) = 0;

  double lr_;
};

// Plain gradient descent, no momentum.
class Sgd final : public Optimizer {
 public:
  using Optimizer::Optimizer;

 protected:
  void update(const std::string& name, Parameter& p) override;
};

// Adam with decoupled weight decay: p -= lr * wd * p, then the bias-corrected
// Adam step.
class AdamW final : public Optimizer {
 public:
  struct Options {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.01;
  };

  explicit AdamW(double learning_rate) : AdamW(learning_rate, Options{}) {}
  AdamW(double learning_rate, Options options) : Optimizer(learning_rate), opt_(options) {}

 protected:
  void update(const std::string& name, Parameter& p) override;

 private:
  struct Moments {
    Tensor m, v;
    long step = 0;
  };
  Options opt_;
  std::map<std::string, Moments> state_;
};

class RmsProp final : public Optimizer {
 public:
  explicit RmsProp(double learning_rate, double alpha = 0.99, double eps = 1e-8)
      : Optimizer(learning_rate), alpha_(alpha), eps_(eps) {}

 protected:
  void update(const std::string& name, Parameter& p) override;

 private:
  double alpha_, eps_;
  std::map<std::string, Tensor> square_avg_;
};

// Sign-based resilient propagation. Per-element step sizes start at the
// learning rate, grow by eta_plus while the gradient sign holds and shrink by
// eta_minus on a sign flip (skipping that element's update once).
class Rprop final : public Optimizer {
 public:
  explicit Rprop(double learning_rate, double eta_minus = 0.5, double eta_plus = 1.2, double step_min = 1e-6,
                 double step_max = 50.0)
      : Optimizer(learning_rate), eta_minus_(eta_minus), eta_plus_(eta_plus), step_min_(step_min), step_max_(step_max) {}

 protected:
  void update(const std::string& name, Parameter& p) override;

 private:
  struct State {
    Tensor prev_grad, step_size;
  };
  double eta_minus_, eta_plus_, step_min_, step_max_;
  std::map<std::string, State> state_;
};

std::unique_ptr<Optimizer> make_optimizer(OptimizerKind kind, double learning_rate);

}  // namespace senti
