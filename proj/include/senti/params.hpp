#pragma once

#include <cstddef>
#include <map>
#include <string>

#include "senti/autodiff.hpp"

namespace senti {

// Learnable parameters addressed by hierarchical dotted names such as
// "encoder.layer0.attn.wq". Iteration is in name order, which fixes the
// checkpoint layout and the optimizer visiting order.
class ParamStore {
 public:
  using Map = std::map<std::string, Parameter>;

  Parameter& add(const std::string& name, Tensor init);
  Parameter& at(const std::string& name);
  const Parameter& at(const std::string& name) const;
  bool contains(const std::string& name) const { return params_.count(name) != 0; }

  Var bind(Tape& tape, const std::string& name) { return tape.parameter(at(name)); }

  Map& items() noexcept { return params_; }
  const Map& items() const noexcept { return params_; }
  std::size_t size() const noexcept { return params_.size(); }
  std::size_t scalar_count() const;

  void zero_grad();

 private:
  Map params_;
};

}  // namespace senti
