#include "gbre/gradcheck.hpp"

#include <cmath>
#include <sstream>

#include "gbre/errors.hpp"

namespace gbre {

namespace {

double eval_loss(const std::function<Var(Tape&)>& loss_fn) {
  Tape tape;
  Var loss = loss_fn(tape);
  if (!loss->is_scalar()) throw NumericError("gradient check: loss must be scalar");
  const double v = loss->value.values[0];
  if (!std::isfinite(v)) throw NumericError("gradient check: non-finite loss");
  return v;
}

}  // namespace

GradCheckReport finite_difference_check(const std::function<Var(Tape&)>& loss_fn,
                                        const std::vector<Param*>& params, double step,
                                        double tol) {
  if (step <= 0.0) throw NumericError("gradient check: step must be positive");

  for (Param* p : params) p->reset_grad();
  std::vector<Tensor> analytic;
  {
    Tape tape;
    Var loss = loss_fn(tape);
    if (!loss->is_scalar()) throw NumericError("gradient check: loss must be scalar");
    if (!std::isfinite(loss->value.values[0]))
      throw NumericError("gradient check: non-finite loss");
    tape.backward(loss);
  }
  analytic.reserve(params.size());
  for (Param* p : params) analytic.push_back(p->grad);

  GradCheckReport report;
  report.tol = tol;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    Param& p = *params[pi];
    GradCheckEntry entry;
    entry.param = p.name.empty() ? "param" + std::to_string(pi) : p.name;
    for (long i = 0; i < p.tensor.size(); ++i) {
      const double saved = p.tensor.values[i];
      p.tensor.values[i] = saved + step;
      const double plus = eval_loss(loss_fn);
      p.tensor.values[i] = saved - step;
      const double minus = eval_loss(loss_fn);
      p.tensor.values[i] = saved;
      const double fd = (plus - minus) / (2.0 * step);
      const double ad = analytic[pi].values[i];
      const double denom = std::max({std::fabs(ad), std::fabs(fd), 1e-8});
      entry.max_rel_err = std::max(entry.max_rel_err, std::fabs(ad - fd) / denom);
    }
    report.worst = std::max(report.worst, entry.max_rel_err);
    report.entries.push_back(std::move(entry));
  }
  report.passed = report.worst <= tol;
  for (Param* p : params) p->reset_grad();
  return report;
}

std::string GradCheckReport::to_string() const {
  std::ostringstream os;
  os << (passed ? "PASS" : "FAIL") << " (worst " << worst << ", tol " << tol << ")\n";
  for (const auto& e : entries) os << "  " << e.param << ": " << e.max_rel_err << "\n";
  return os.str();
}

}  // namespace gbre
