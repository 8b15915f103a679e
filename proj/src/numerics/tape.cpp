#include "gbre/autodiff.hpp"

#include <algorithm>

#include "gbre/errors.hpp"

namespace gbre {

Var Tape::constant(Tensor value, const char* op) {
  auto node = std::make_unique<Node>();
  node->value = std::move(value);
  node->grad = Tensor(node->value.shape);
  node->op = op;
  node->scope = current_scope();
  node->owner = this;
  nodes_.push_back(std::move(node));
  return nodes_.back().get();
}

Var Tape::param(Param& p) {
  for (const auto& [param, leaf] : param_leaves_) {
    if (param == &p) return leaf;
  }
  Var leaf = constant(p.tensor, "param");
  leaf->param = &p;
  param_leaves_.emplace_back(&p, leaf);
  return leaf;
}

Var Tape::record(Tensor value, const char* op, std::function<void(const Node&)> backward) {
  Var node = constant(std::move(value), op);
  node->backward = std::move(backward);
  return node;
}

void Tape::backward(Var loss) {
  if (backward_done_) throw NumericError("backward: tape already consumed by a previous backward pass");
  if (loss == nullptr || loss->owner != this)
    throw NumericError("backward: loss was not recorded on this tape");
  if (!loss->is_scalar())
    throw NumericError("backward: loss must be scalar, got shape " + Tensor::shape_str(loss->value.shape));
  backward_done_ = true;

  loss->grad.values[0] = 1.0;
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
    Node& n = **it;
    if (n.backward) n.backward(n);
  }
  for (auto& [param, leaf] : param_leaves_) {
    Param& p = *leaf->param;
    for (long i = 0; i < p.grad.size(); ++i) p.grad.values[i] += leaf->grad.values[i];
  }
}

std::vector<std::string> Tape::scopes_used() const {
  std::vector<std::string> out;
  for (const auto& n : nodes_) {
    std::string s = n->scope;
    if (s.empty()) continue;
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  }
  return out;
}

std::vector<std::string> Tape::op_sequence() const {
  std::vector<std::string> out;
  out.reserve(nodes_.size());
  for (const auto& n : nodes_) out.emplace_back(n->op);
  return out;
}

}  // namespace gbre
