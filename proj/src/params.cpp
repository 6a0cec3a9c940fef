#include "senti/params.hpp"

namespace senti {

Parameter& ParamStore::add(const std::string& name, Tensor init) {
  auto [it, inserted] = params_.try_emplace(name, std::move(init));
  if (!inserted) throw ContractError("parameter '" + name + "' registered twice");
  return it->second;
}

Parameter& ParamStore::at(const std::string& name) {
  auto it = params_.find(name);
  if (it == params_.end()) throw LookupError("unknown parameter '" + name + "'");
  return it->second;
}

const Parameter& ParamStore::at(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end()) throw LookupError("unknown parameter '" + name + "'");
  return it->second;
}

std::size_t ParamStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& [name, p] : params_) n += p.value.size();
  return n;
}

void ParamStore::zero_grad() {
  for (auto& [name, p] : params_) p.zero_grad();
}

}  // namespace senti
