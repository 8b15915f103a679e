#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "gbre/tensor.hpp"

namespace gbre {

class Tape;

// One recorded forward operation. `grad` matches `value` in shape and starts
// at zero; `backward` reads this node's grad and accumulates into its
// parents' grads (captured by pointer inside the closure).
struct Node {
  Tensor value;
  Tensor grad;
  const char* op = "";
  const char* scope = "";
  std::function<void(const Node&)> backward;  // empty for leaves
  Param* param = nullptr;                     // set for parameter leaves
  const Tape* owner = nullptr;

  bool is_scalar() const { return value.is_scalar(); }
};

using Var = Node*;

// Records forward operations in order; backward() replays them exactly in
// reverse. One backward pass per tape. Nodes are owned by the tape and stay
// valid for its lifetime. A tape is single-threaded and never shared across
// concurrent forward passes.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Leaf holding a value that receives no gradient.
  Var constant(Tensor value, const char* op = "constant");

  // Leaf for a parameter; repeated calls with the same Param return the same
  // node so shared parameters accumulate one combined gradient. On backward
  // the accumulated node grad is added into p.grad (+=).
  Var param(Param& p);

  // Record an op with the given output value and backward rule.
  Var record(Tensor value, const char* op, std::function<void(const Node&)> backward);

  // Reverse sweep from a scalar loss recorded on this tape. Seeds d(loss)=1,
  // visits ops in reverse recording order, then flushes parameter leaves into
  // their Param::grad. Errors: non-scalar loss, foreign loss, second call.
  void backward(Var loss);

  std::size_t size() const { return nodes_.size(); }
  const Node& node(std::size_t i) const { return *nodes_[i]; }
  bool backward_done() const { return backward_done_; }

  // Module scope labels for structural introspection of the recorded
  // computation (which pipeline stages actually ran).
  void push_scope(const char* s) { scopes_.push_back(s); }
  void pop_scope() { scopes_.pop_back(); }
  const char* current_scope() const { return scopes_.empty() ? "" : scopes_.back(); }

  struct ScopeGuard {
    Tape& tape;
    ScopeGuard(Tape& t, const char* s) : tape(t) { tape.push_scope(s); }
    ~ScopeGuard() { tape.pop_scope(); }
  };

  // Distinct scope labels present on the tape, in first-appearance order.
  std::vector<std::string> scopes_used() const;
  // Op-name sequence, for structural equality checks between pipelines.
  std::vector<std::string> op_sequence() const;

 private:
  std::vector<std::unique_ptr<Node>> nodes_;
  std::vector<std::pair<const Param*, Node*>> param_leaves_;
  std::vector<const char*> scopes_;
  bool backward_done_ = false;
};

}  // namespace gbre
