#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "senti/tensor.hpp"

namespace senti {

// A learnable tensor together with its gradient accumulator.
struct Parameter {
  Tensor value;
  Tensor grad;

  Parameter() = default;
  explicit Parameter(Tensor v) : value(std::move(v)), grad(Tensor::zeros_like(value)) {}
  void zero_grad() { grad.fill(0.0); }
};

class Tape;

// Handle to one node of a Tape. Cheap to copy; valid while its tape lives.
class Var {
 public:
  Var() = default;

  const Tensor& value() const;
  const Tensor& grad() const;
  const Shape& shape() const { return value().shape(); }
  bool requires_grad() const;
  Tape& tape() const { return *tape_; }
  std::size_t id() const noexcept { return id_; }
  bool valid() const noexcept { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

// Wengert list for reverse-mode differentiation. Nodes are appended in
// evaluation order, so every op's inputs precede it and a single reverse sweep
// visits each node once.
//
// Gradient accumulation: backward() recomputes every intermediate gradient
// from scratch, but leaves accumulate. Gradients of variable() leaves stay on
// the tape and parameter() leaves add into Parameter::grad, so calling
// backward() twice without zeroing doubles them.
class Tape {
 public:
  // Receives the output gradient; implementations push into input gradients
  // via accumulate().
  using BackwardFn = std::function<void(Tape&, const Tensor& out_grad)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Tensor value);
  Var variable(Tensor value);
  Var parameter(Parameter& p);

  // Appends an op node; it requires grad iff any input does. fn may be empty
  // when no input requires grad.
  Var record(Tensor value, std::span<const Var> inputs, BackwardFn fn);

  void backward(Var loss);

  const Tensor& value(std::size_t id) const {
    const Node& n = nodes_[id];
    return n.param ? n.param->value : n.value;
  }
  const Tensor& grad(std::size_t id) const;
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }

  // Gradient buffer of node id for backward rules, or nullptr when the node
  // does not require grad. Allocated zero-filled on first use.
  Tensor* accumulate(std::size_t id);

  std::size_t size() const noexcept { return nodes_.size(); }

 private:
  enum class Kind { Constant, Variable, Parameter, Op };
  struct Node {
    Kind kind;
    Tensor value;
    Tensor grad;
    bool requires_grad = false;
    Parameter* param = nullptr;
    BackwardFn backward;
  };

  Var push(Node node);

  std::vector<Node> nodes_;
};

// --- ops --------------------------------------------------------------------
// Each op evaluates eagerly and records its backward rule on the inputs' tape.

Var matmul(Var a, Var b);
Var transpose(Var a);

Var ewise_add(Var a, Var b);
Var ewise_sub(Var a, Var b);
Var ewise_mul(Var a, Var b);
Var scale(Var x, double factor);

// x[r, c] + bias[c]; bias has shape [n] or [1, n].
Var add_row(Var x, Var bias);
// x[r, c] * v[c]
Var mul_row(Var x, Var v);
// x[r, c] * factors[r]; factors are constants.
Var scale_rows(Var x, std::span<const double> factors);

Var sigmoid(Var x);
Var tanh_act(Var x);
Var gelu(Var x);

// Row-wise softmax with max subtraction. Requires at least two columns.
Var softmax_rows(Var x);
// Softmax of each row restricted to columns with keep[c] != 0; dropped columns
// get exactly zero weight, as if biased by -infinity. At least one column must
// be kept.
Var masked_softmax_rows(Var x, std::span<const double> keep);

// Inverted dropout: survivors are scaled by 1 / (1 - rate).
Var dropout(Var x, double rate, bool training, std::uint64_t seed);

Var concat(Var a, Var b, std::size_t axis);
Var concat(std::span<const Var> parts, std::size_t axis);
Var flatten(Var x);
Var reshape(Var x, Shape shape);

Var slice_rows(Var x, std::size_t first, std::size_t count);
Var slice_cols(Var x, std::size_t first, std::size_t count);
// Gathers rows of the matrix view; repeated indices are allowed.
Var take_rows(Var x, std::span<const std::size_t> rows);

// Normalizes each row to zero mean / unit variance, then applies gamma, beta.
Var layer_norm(Var x, Var gamma, Var beta, double eps = 1e-12);

Var sum(Var x);
Var mean(Var x);

// Mean over rows of -log(max(probs[i, label_i], 1e-12)).
Var cross_entropy(Var probs, std::span<const std::size_t> labels);

inline Var operator+(Var a, Var b) { return ewise_add(a, b); }
inline Var operator-(Var a, Var b) { return ewise_sub(a, b); }
inline Var operator*(Var a, Var b) { return ewise_mul(a, b); }

// x W + b
inline Var dense(Var x, Var weight, Var bias) { return add_row(matmul(x, weight), bias); }

}  // namespace senti
