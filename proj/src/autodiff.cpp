#include "senti/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "senti/rng.hpp"

namespace senti {

namespace {

using Matrix = Eigen::MatrixXd;

void require_same_shape(const char* op, const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(op) + ": shape mismatch " + shape_string(a.shape()) + " vs " +
                         shape_string(b.shape()));
  }
}

void require_rank2(const char* op, const Tensor& t) {
  if (t.rank() != 2) {
    throw DimensionError(std::string(op) + ": expected a matrix, got " + shape_string(t.shape()));
  }
}

void require_row_vector(const char* op, const Tensor& x, const Tensor& v) {
  const bool ok = (v.rank() == 1 || (v.rank() == 2 && v.rows() == 1)) && v.cols() == x.cols();
  if (!ok) {
    throw DimensionError(std::string(op) + ": row vector " + shape_string(v.shape()) +
                         " does not fit " + shape_string(x.shape()));
  }
}

// Records a single-input op whose local derivative is an element-wise factor.
Var unary_pointwise(Var x, Tensor out, Tensor local_derivative) {
  const std::size_t xid = x.id();
  return x.tape().record(std::move(out), std::span(&x, 1),
                         [xid, d = std::move(local_derivative)](Tape& tape, const Tensor& g) {
                           if (Tensor* gx = tape.accumulate(xid)) gx->array() += g.array() * d.array();
                         });
}

}  // namespace

// --- Var / Tape ---------------------------------------------------------------

const Tensor& Var::value() const { return tape_->value(id_); }
const Tensor& Var::grad() const { return tape_->grad(id_); }
bool Var::requires_grad() const { return tape_->requires_grad(id_); }

Var Tape::push(Node node) {
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Var Tape::constant(Tensor value) { return push(Node{Kind::Constant, std::move(value), {}, false, nullptr, {}}); }

Var Tape::variable(Tensor value) { return push(Node{Kind::Variable, std::move(value), {}, true, nullptr, {}}); }

// Parameter nodes alias the parameter's value instead of copying it; the
// parameter must outlive the tape and stay unmodified while the tape is used.
Var Tape::parameter(Parameter& p) { return push(Node{Kind::Parameter, {}, {}, true, &p, {}}); }

Var Tape::record(Tensor value, std::span<const Var> inputs, BackwardFn fn) {
  bool needs = false;
  for (const Var& in : inputs) {
    if (in.tape_ != this) throw ContractError("op inputs belong to a different tape");
    needs = needs || nodes_[in.id_].requires_grad;
  }
  if (needs && !fn) throw ContractError("op requires grad but has no backward rule");
  return push(Node{Kind::Op, std::move(value), {}, needs, nullptr, needs ? std::move(fn) : BackwardFn{}});
}

const Tensor& Tape::grad(std::size_t id) const {
  const Node& n = nodes_[id];
  if (n.kind == Kind::Parameter) return n.param->grad;
  if (n.grad.empty()) throw ContractError("node " + std::to_string(id) + " has no gradient");
  return n.grad;
}

Tensor* Tape::accumulate(std::size_t id) {
  Node& n = nodes_[id];
  if (!n.requires_grad) return nullptr;
  if (n.grad.empty()) n.grad = Tensor::zeros_like(value(id));
  return &n.grad;
}

void Tape::backward(Var loss) {
  if (loss.tape_ != this) throw ContractError("loss belongs to a different tape");
  if (nodes_.empty()) throw ContractError("backward on an empty tape");
  if (loss.value().size() != 1) {
    throw ContractError("backward needs a scalar loss, got shape " + shape_string(loss.shape()));
  }
  for (Node& n : nodes_) {
    if (n.kind == Kind::Op || n.kind == Kind::Parameter) n.grad = Tensor{};
  }
  if (Tensor* seed = accumulate(loss.id_)) (*seed)[0] += 1.0;

  for (std::size_t i = loss.id_ + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (n.grad.empty()) continue;
    if (n.kind == Kind::Op) {
      n.backward(*this, n.grad);
    } else if (n.kind == Kind::Parameter) {
      n.param->grad.array() += n.grad.array();
      n.grad = Tensor{};
    }
  }
}

// --- linear algebra -----------------------------------------------------------

Var matmul(Var a, Var b) {
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  require_rank2("matmul", av);
  require_rank2("matmul", bv);
  if (av.cols() != bv.rows()) {
    throw DimensionError("matmul: inner dimensions differ, " + shape_string(av.shape()) + " x " +
                         shape_string(bv.shape()));
  }
  Tensor out({av.rows(), bv.cols()});
  out.matrix().noalias() = av.matrix() * bv.matrix();
  const std::size_t aid = a.id(), bid = b.id();
  const Var inputs[] = {a, b};
  return a.tape().record(std::move(out), inputs, [aid, bid](Tape& tape, const Tensor& g) {
    if (Tensor* ga = tape.accumulate(aid)) ga->matrix().noalias() += g.matrix() * tape.value(bid).matrix().transpose();
    if (Tensor* gb = tape.accumulate(bid)) gb->matrix().noalias() += tape.value(aid).matrix().transpose() * g.matrix();
  });
}

Var transpose(Var a) {
  const Tensor& av = a.value();
  require_rank2("transpose", av);
  Tensor out({av.cols(), av.rows()});
  out.matrix() = av.matrix().transpose();
  const std::size_t aid = a.id();
  return a.tape().record(std::move(out), std::span(&a, 1), [aid](Tape& tape, const Tensor& g) {
    if (Tensor* ga = tape.accumulate(aid)) ga->matrix() += g.matrix().transpose();
  });
}

// --- element-wise ---------------------------------------------------------------

Var ewise_add(Var a, Var b) {
  require_same_shape("ewise_add", a.value(), b.value());
  Tensor out = a.value();
  out.array() += b.value().array();
  const std::size_t aid = a.id(), bid = b.id();
  const Var inputs[] = {a, b};
  return a.tape().record(std::move(out), inputs, [aid, bid](Tape& tape, const Tensor& g) {
    if (Tensor* ga = tape.accumulate(aid)) ga->array() += g.array();
    if (Tensor* gb = tape.accumulate(bid)) gb->array() += g.array();
  });
}

Var ewise_sub(Var a, Var b) {
  require_same_shape("ewise_sub", a.value(), b.value());
  Tensor out = a.value();
  out.array() -= b.value().array();
  const std::size_t aid = a.id(), bid = b.id();
  const Var inputs[] = {a, b};
  return a.tape().record(std::move(out), inputs, [aid, bid](Tape& tape, const Tensor& g) {
    if (Tensor* ga = tape.accumulate(aid)) ga->array() += g.array();
    if (Tensor* gb = tape.accumulate(bid)) gb->array() -= g.array();
  });
}

Var ewise_mul(Var a, Var b) {
  require_same_shape("ewise_mul", a.value(), b.value());
  Tensor out = a.value();
  out.array() *= b.value().array();
  const std::size_t aid = a.id(), bid = b.id();
  const Var inputs[] = {a, b};
  return a.tape().record(std::move(out), inputs, [aid, bid](Tape& tape, const Tensor& g) {
    if (Tensor* ga = tape.accumulate(aid)) ga->array() += g.array() * tape.value(bid).array();
    if (Tensor* gb = tape.accumulate(bid)) gb->array() += g.array() * tape.value(aid).array();
  });
}

Var scale(Var x, double factor) {
  Tensor out = x.value();
  out.array() *= factor;
  const std::size_t xid = x.id();
  return x.tape().record(std::move(out), std::span(&x, 1), [xid, factor](Tape& tape, const Tensor& g) {
    if (Tensor* gx = tape.accumulate(xid)) gx->array() += factor * g.array();
  });
}

Var add_row(Var x, Var bias) {
  const Tensor& xv = x.value();
  require_row_vector("add_row", xv, bias.value());
  Tensor out = xv;
  const auto b = Eigen::Map<const Eigen::RowVectorXd>(bias.value().data().data(), static_cast<Eigen::Index>(xv.cols()));
  out.matrix().rowwise() += b;
  const std::size_t xid = x.id(), bid = bias.id();
  const Var inputs[] = {x, bias};
  return x.tape().record(std::move(out), inputs, [xid, bid](Tape& tape, const Tensor& g) {
    if (Tensor* gx = tape.accumulate(xid)) gx->array() += g.array();
    if (Tensor* gb = tape.accumulate(bid)) {
      Eigen::Map<Eigen::RowVectorXd>(gb->data().data(), static_cast<Eigen::Index>(g.cols())) +=
          g.matrix().colwise().sum();
    }
  });
}

Var mul_row(Var x, Var v) {
  const Tensor& xv = x.value();
  require_row_vector("mul_row", xv, v.value());
  Tensor out = xv;
  const auto row = Eigen::Map<const Eigen::RowVectorXd>(v.value().data().data(), static_cast<Eigen::Index>(xv.cols()));
  out.matrix().array().rowwise() *= row.array();
  const std::size_t xid = x.id(), vid = v.id();
  const Var inputs[] = {x, v};
  return x.tape().record(std::move(out), inputs, [xid, vid](Tape& tape, const Tensor& g) {
    const auto n = static_cast<Eigen::Index>(g.cols());
    const auto vrow = Eigen::Map<const Eigen::RowVectorXd>(tape.value(vid).data().data(), n);
    if (Tensor* gx = tape.accumulate(xid)) gx->matrix().array() += g.matrix().array().rowwise() * vrow.array();
    if (Tensor* gv = tape.accumulate(vid)) {
      Eigen::Map<Eigen::RowVectorXd>(gv->data().data(), n) +=
          (g.matrix().array() * tape.value(xid).matrix().array()).colwise().sum().matrix();
    }
  });
}

Var scale_rows(Var x, std::span<const double> factors) {
  const Tensor& xv = x.value();
  if (factors.size() != xv.rows()) {
    throw DimensionError("scale_rows: " + std::to_string(factors.size()) + " factors for " +
                         shape_string(xv.shape()));
  }
  Eigen::VectorXd f = Eigen::Map<const Eigen::VectorXd>(factors.data(), static_cast<Eigen::Index>(factors.size()));
  Tensor out = xv;
  out.matrix().array().colwise() *= f.array();
  const std::size_t xid = x.id();
  return x.tape().record(std::move(out), std::span(&x, 1), [xid, f = std::move(f)](Tape& tape, const Tensor& g) {
    if (Tensor* gx = tape.accumulate(xid)) gx->matrix().array() += g.matrix().array().colwise() * f.array();
  });
}

Var sigmoid(Var x) {
  Tensor out = x.value();
  for (double& v : out.data()) v = v >= 0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
  Tensor d = out;
  d.array() = out.array() * (1.0 - out.array());
  return unary_pointwise(x, std::move(out), std::move(d));
}

Var tanh_act(Var x) {
  Tensor out = x.value();
  out.array() = out.array().tanh();
  Tensor d = out;
  d.array() = 1.0 - out.array().square();
  return unary_pointwise(x, std::move(out), std::move(d));
}

Var gelu(Var x) {
  const Tensor& xv = x.value();
  Tensor out = xv;
  Tensor d = xv;
  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  const double inv_sqrt2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  for (std::size_t i = 0; i < xv.size(); ++i) {
    const double v = xv[i];
    const double cdf = 0.5 * (1.0 + std::erf(v * inv_sqrt2));
    out[i] = v * cdf;
    d[i] = cdf + v * inv_sqrt2pi * std::exp(-0.5 * v * v);
  }
  return unary_pointwise(x, std::move(out), std::move(d));
}

// --- softmax -------------------------------------------------------------------

namespace {

Var softmax_impl(Var x, std::span<const double> keep) {
  const Tensor& xv = x.value();
  const std::size_t n = xv.cols();
  Tensor out = Tensor::zeros_like(xv);
  for (std::size_t r = 0; r < xv.rows(); ++r) {
    const double* in = &xv.data()[r * n];
    double* y = &out.data()[r * n];
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < n; ++c) {
      if (keep.empty() || keep[c] != 0.0) mx = std::max(mx, in[c]);
    }
    double total = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
      if (keep.empty() || keep[c] != 0.0) {
        y[c] = std::exp(in[c] - mx);
        total += y[c];
      }
    }
    for (std::size_t c = 0; c < n; ++c) y[c] /= total;
  }
  const std::size_t xid = x.id(), oid = x.tape().size();
  return x.tape().record(std::move(out), std::span(&x, 1), [xid, oid](Tape& tape, const Tensor& g) {
    Tensor* gx = tape.accumulate(xid);
    if (!gx) return;
    const Tensor& y = tape.value(oid);
    const auto ym = y.matrix().array();
    const auto gm = g.matrix().array();
    const Eigen::VectorXd dot = (gm * ym).rowwise().sum();
    gx->matrix().array() += ym * (gm.colwise() - dot.array());
  });
}

}  // namespace

Var softmax_rows(Var x) {
  if (x.value().cols() < 2) {
    throw ContractError("softmax_rows needs at least 2 columns, got " + shape_string(x.shape()));
  }
  return softmax_impl(x, {});
}

Var masked_softmax_rows(Var x, std::span<const double> keep) {
  if (keep.size() != x.value().cols()) {
    throw DimensionError("masked_softmax_rows: mask of length " + std::to_string(keep.size()) + " for " +
                         shape_string(x.shape()));
  }
  if (std::none_of(keep.begin(), keep.end(), [](double k) { return k != 0.0; })) {
    throw ContractError("masked_softmax_rows: every column is masked");
  }
  return softmax_impl(x, keep);
}

// --- dropout -------------------------------------------------------------------

Var dropout(Var x, double rate, bool training, std::uint64_t seed) {
  if (!(rate >= 0.0 && rate < 1.0)) throw ParameterError("dropout rate must lie in [0, 1), got " + std::to_string(rate));
  if (!training || rate == 0.0) return x;
  Rng rng(seed);
  Tensor mask = Tensor::zeros_like(x.value());
  const double keep_scale = 1.0 / (1.0 - rate);
  for (double& m : mask.data()) m = rng.uniform() >= rate ? keep_scale : 0.0;
  Tensor out = x.value();
  out.array() *= mask.array();
  return unary_pointwise(x, std::move(out), std::move(mask));
}

// --- shape ops -----------------------------------------------------------------

Var concat(std::span<const Var> parts, std::size_t axis) {
  if (parts.empty()) throw DimensionError("concat of zero tensors");
  const Shape& first = parts[0].shape();
  if (axis >= first.size()) {
    throw DimensionError("concat axis " + std::to_string(axis) + " out of range for " + shape_string(first));
  }
  Shape out_shape = first;
  out_shape[axis] = 0;
  for (const Var& p : parts) {
    const Shape& s = p.shape();
    bool ok = s.size() == first.size();
    for (std::size_t d = 0; ok && d < s.size(); ++d) ok = d == axis || s[d] == first[d];
    if (!ok) throw DimensionError("concat: incompatible shapes " + shape_string(first) + " and " + shape_string(s));
    out_shape[axis] += s[axis];
  }
  std::size_t outer = 1, inner = 1;
  for (std::size_t d = 0; d < axis; ++d) outer *= first[d];
  for (std::size_t d = axis + 1; d < first.size(); ++d) inner *= first[d];

  Tensor out(out_shape);
  std::vector<std::size_t> widths;
  widths.reserve(parts.size());
  for (const Var& p : parts) widths.push_back(p.shape()[axis] * inner);
  const std::size_t row_width = out_shape[axis] * inner;
  std::size_t offset = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const auto src = parts[k].value().data();
    for (std::size_t o = 0; o < outer; ++o) {
      std::copy_n(src.begin() + o * widths[k], widths[k], out.data().begin() + o * row_width + offset);
    }
    offset += widths[k];
  }

  std::vector<std::size_t> ids;
  for (const Var& p : parts) ids.push_back(p.id());
  return parts[0].tape().record(
      std::move(out), parts, [ids, widths, outer, row_width](Tape& tape, const Tensor& g) {
        std::size_t off = 0;
        for (std::size_t k = 0; k < ids.size(); ++k) {
          if (Tensor* gp = tape.accumulate(ids[k])) {
            for (std::size_t o = 0; o < outer; ++o) {
              const double* src = &g.data()[o * row_width + off];
              double* dst = &gp->data()[o * widths[k]];
              for (std::size_t i = 0; i < widths[k]; ++i) dst[i] += src[i];
            }
          }
          off += widths[k];
        }
      });
}

Var concat(Var a, Var b, std::size_t axis) {
  const Var parts[] = {a, b};
  return concat(parts, axis);
}

Var reshape(Var x, Shape shape) {
  Tensor out = x.value().reshaped(std::move(shape));
  const std::size_t xid = x.id();
  return x.tape().record(std::move(out), std::span(&x, 1), [xid](Tape& tape, const Tensor& g) {
    if (Tensor* gx = tape.accumulate(xid)) {
      for (std::size_t i = 0; i < g.size(); ++i) (*gx)[i] += g[i];
    }
  });
}

Var flatten(Var x) { return reshape(x, {1, x.value().size()}); }

Var slice_rows(Var x, std::size_t first, std::size_t count) {
  const Tensor& xv = x.value();
  if (count == 0 || first + count > xv.rows()) {
    throw DimensionError("slice_rows [" + std::to_string(first) + ", +" + std::to_string(count) + ") out of " +
                         shape_string(xv.shape()));
  }
  Tensor out({count, xv.cols()});
  out.matrix() = xv.matrix().middleRows(static_cast<Eigen::Index>(first), static_cast<Eigen::Index>(count));
  const std::size_t xid = x.id();
  return x.tape().record(std::move(out), std::span(&x, 1), [xid, first, count](Tape& tape, const Tensor& g) {
    if (Tensor* gx = tape.accumulate(xid)) {
      gx->matrix().middleRows(static_cast<Eigen::Index>(first), static_cast<Eigen::Index>(count)) += g.matrix();
    }
  });
}

Var slice_cols(Var x, std::size_t first, std::size_t count) {
  const Tensor& xv = x.value();
  if (count == 0 || first + count > xv.cols()) {
    throw DimensionError("slice_cols [" + std::to_string(first) + ", +" + std::to_string(count) + ") out of " +
                         shape_string(xv.shape()));
  }
  Tensor out({xv.rows(), count});
  out.matrix() = xv.matrix().middleCols(static_cast<Eigen::Index>(first), static_cast<Eigen::Index>(count));
  const std::size_t xid = x.id();
  return x.tape().record(std::move(out), std::span(&x, 1), [xid, first, count](Tape& tape, const Tensor& g) {
    if (Tensor* gx = tape.accumulate(xid)) {
      gx->matrix().middleCols(static_cast<Eigen::Index>(first), static_cast<Eigen::Index>(count)) += g.matrix();
    }
  });
}

Var take_rows(Var x, std::span<const std::size_t> rows) {
  const Tensor& xv = x.value();
  if (rows.empty()) throw DimensionError("take_rows with no indices");
  Tensor out({rows.size(), xv.cols()});
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= xv.rows()) {
      throw LookupError("take_rows: row " + std::to_string(rows[r]) + " out of range for " + shape_string(xv.shape()));
    }
    out.matrix().row(static_cast<Eigen::Index>(r)) = xv.matrix().row(static_cast<Eigen::Index>(rows[r]));
  }
  const std::size_t xid = x.id();
  return x.tape().record(std::move(out), std::span(&x, 1),
                         [xid, idx = std::vector<std::size_t>(rows.begin(), rows.end())](Tape& tape, const Tensor& g) {
                           if (Tensor* gx = tape.accumulate(xid)) {
                             for (std::size_t r = 0; r < idx.size(); ++r) {
                               gx->matrix().row(static_cast<Eigen::Index>(idx[r])) +=
                                   g.matrix().row(static_cast<Eigen::Index>(r));
                             }
                           }
                         });
}

// --- normalization / reductions -----------------------------------------------

Var layer_norm(Var x, Var gamma, Var beta, double eps) {
  const Tensor& xv = x.value();
  require_row_vector("layer_norm", xv, gamma.value());
  require_row_vector("layer_norm", xv, beta.value());
  const auto n = static_cast<Eigen::Index>(xv.cols());
  const auto rows = static_cast<Eigen::Index>(xv.rows());

  Matrix xhat(rows, n);
  Eigen::VectorXd rstd(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto row = xv.matrix().row(r);
    const double mu = row.mean();
    const double var = (row.array() - mu).square().mean();
    rstd(r) = 1.0 / std::sqrt(var + eps);
    xhat.row(r) = (row.array() - mu) * rstd(r);
  }
  const auto gm = Eigen::Map<const Eigen::RowVectorXd>(gamma.value().data().data(), n);
  const auto bm = Eigen::Map<const Eigen::RowVectorXd>(beta.value().data().data(), n);
  Tensor out = Tensor::zeros_like(xv);
  out.matrix() = (xhat.array().rowwise() * gm.array()).rowwise() + bm.array();

  const std::size_t xid = x.id(), gid = gamma.id(), bid = beta.id();
  const Var inputs[] = {x, gamma, beta};
  return x.tape().record(
      std::move(out), inputs,
      [xid, gid, bid, n, xhat = std::move(xhat), rstd = std::move(rstd)](Tape& tape, const Tensor& g) {
        const auto gmat = g.matrix();
        if (Tensor* gg = tape.accumulate(gid)) {
          Eigen::Map<Eigen::RowVectorXd>(gg->data().data(), n) += (gmat.array() * xhat.array()).colwise().sum().matrix();
        }
        if (Tensor* gb = tape.accumulate(bid)) {
          Eigen::Map<Eigen::RowVectorXd>(gb->data().data(), n) += gmat.colwise().sum();
        }
        if (Tensor* gx = tape.accumulate(xid)) {
          const auto gam = Eigen::Map<const Eigen::RowVectorXd>(tape.value(gid).data().data(), n);
          const Matrix dxhat = gmat.array().rowwise() * gam.array();
          const Eigen::VectorXd mean_d = dxhat.rowwise().mean();
          const Eigen::VectorXd mean_dx = (dxhat.array() * xhat.array()).rowwise().mean();
          Matrix dx = dxhat;
          dx.colwise() -= mean_d;
          dx.array() -= xhat.array().colwise() * mean_dx.array();
          dx.array().colwise() *= rstd.array();
          gx->matrix() += dx;
        }
      });
}

Var sum(Var x) {
  Tensor out({1}, x.value().matrix().sum());
  const std::size_t xid = x.id();
  return x.tape().record(std::move(out), std::span(&x, 1), [xid](Tape& tape, const Tensor& g) {
    if (Tensor* gx = tape.accumulate(xid)) gx->array() += g[0];
  });
}

Var mean(Var x) { return scale(sum(x), 1.0 / static_cast<double>(x.value().size())); }

Var cross_entropy(Var probs, std::span<const std::size_t> labels) {
  constexpr double kFloor = 1e-12;
  const Tensor& p = probs.value();
  if (labels.size() != p.rows()) {
    throw DimensionError("cross_entropy: " + std::to_string(labels.size()) + " labels for " + shape_string(p.shape()));
  }
  double total = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= p.cols()) {
      throw LookupError("cross_entropy: label " + std::to_string(labels[i]) + " out of range for " +
                        std::to_string(p.cols()) + " classes");
    }
    total -= std::log(std::max(p.at(i, labels[i]), kFloor));
  }
  const double batch = static_cast<double>(labels.size());
  Tensor out({1}, total / batch);
  const std::size_t pid = probs.id();
  return probs.tape().record(
      std::move(out), std::span(&probs, 1),
      [pid, batch, lab = std::vector<std::size_t>(labels.begin(), labels.end())](Tape& tape, const Tensor& g) {
        Tensor* gp = tape.accumulate(pid);
        if (!gp) return;
        const Tensor& pv = tape.value(pid);
        for (std::size_t i = 0; i < lab.size(); ++i) {
          const double pi = pv.at(i, lab[i]);
          if (pi >= kFloor) gp->at(i, lab[i]) -= g[0] / (pi * batch);
        }
      });
}

}  // namespace senti
