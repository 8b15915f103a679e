#pragma once

#include <vector>

#include "gbre/errors.hpp"
#include "gbre/tensor.hpp"

namespace gbre {

// Plain SGD: p <- p - lr * grad for every trainable parameter, then zero all
// gradients. lr == 0 is a no-op on the values (still clears grads).
inline void sgd_step(const std::vector<Param*>& params, double learning_rate) {
  if (learning_rate < 0.0) throw NumericError("sgd_step: negative learning rate");
  for (Param* p : params) {
    if (p->trainable && learning_rate != 0.0) {
      for (long i = 0; i < p->tensor.size(); ++i)
        p->tensor.values[i] -= learning_rate * p->grad.values[i];
    }
    p->reset_grad();
  }
}

}  // namespace gbre
