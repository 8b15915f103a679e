#pragma once

#include <functional>
#include <string>
#include <vector>

#include "gbre/autodiff.hpp"

namespace gbre {

struct GradCheckEntry {
  std::string param;
  double max_rel_err = 0.0;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  double worst = 0.0;
  double tol = 0.0;
  bool passed = false;
  std::string to_string() const;
};

// Compares reverse-mode gradients of a scalar loss against central finite
// differences over every scalar of every listed parameter. `loss_fn` must
// rebuild the same deterministic forward pass from current parameter values
// on the tape it is handed (dropout off or identically seeded). Relative
// error is |g_ad - g_fd| / max(|g_ad|, |g_fd|, 1e-8). Parameter values are
// restored exactly; gradients are left zeroed.
GradCheckReport finite_difference_check(const std::function<Var(Tape&)>& loss_fn,
                                        const std::vector<Param*>& params, double step,
                                        double tol);

}  // namespace gbre
