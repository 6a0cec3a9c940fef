#include "senti/tensor.hpp"

#include <cmath>

#include "senti/rng.hpp"

namespace senti {

std::string shape_string(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

Tensor xavier_init(const Shape& shape, std::uint64_t seed) {
  Tensor t(shape);
  const double fan_in = static_cast<double>(t.rank() == 1 ? t.cols() : t.rows());
  const double fan_out = static_cast<double>(t.cols());
  const double bound = std::sqrt(6.0 / (fan_in + fan_out));
  Rng rng(seed);
  for (auto& v : t.data()) v = rng.uniform(-bound, bound);
  return t;
}

bool all_finite(const Tensor& t) {
  for (double v : t.data()) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace senti
