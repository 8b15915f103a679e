#include "gbre/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gbre/errors.hpp"
#include "gbre/kernels.hpp"

namespace gbre::ops {

namespace {

[[noreturn]] void shape_fail(const char* op, const Tensor& a, const Tensor& b) {
  throw ShapeError(std::string(op) + ": shapes " + Tensor::shape_str(a.shape) + " and " +
                   Tensor::shape_str(b.shape) + " do not conform");
}

void require(bool ok, const char* op, const Tensor& a, const Tensor& b) {
  if (!ok) shape_fail(op, a, b);
}

void require_rank(const char* op, const Tensor& a, int rank) {
  if (a.rank() != rank)
    throw ShapeError(std::string(op) + ": expected rank-" + std::to_string(rank) +
                     " operand, got shape " + Tensor::shape_str(a.shape));
}

}  // namespace

Var gather_rows(Tape& t, Var table, const std::vector<int>& ids) {
  require_rank("gather_rows", table->value, 2);
  const int v = table->value.shape[0];
  const int d = table->value.shape[1];
  const int n = static_cast<int>(ids.size());
  if (n == 0) throw ShapeError("gather_rows: empty id list");
  for (int id : ids) {
    if (id < 0 || id >= v)
      throw ShapeError("gather_rows: id " + std::to_string(id) + " outside table " +
                       Tensor::shape_str(table->value.shape));
  }
  Tensor out({n, d});
  for (int i = 0; i < n; ++i)
    std::copy_n(table->value.data() + static_cast<std::size_t>(ids[i]) * d, d,
                out.data() + static_cast<std::size_t>(i) * d);
  return t.record(std::move(out), "gather_rows", [table, ids, d](const Node& node) {
    for (std::size_t i = 0; i < ids.size(); ++i) {
      double* dst = table->grad.data() + static_cast<std::size_t>(ids[i]) * d;
      const double* src = node.grad.data() + i * d;
      for (int j = 0; j < d; ++j) dst[j] += src[j];
    }
  });
}

Var matmul(Tape& t, Var a, Var b) {
  require_rank("matmul", a->value, 2);
  require_rank("matmul", b->value, 2);
  require(a->value.shape[1] == b->value.shape[0], "matmul", a->value, b->value);
  const int m = a->value.shape[0], k = a->value.shape[1], n = b->value.shape[1];
  Tensor out({m, n});
  kernels::matmul_nn(m, k, n, a->value.data(), b->value.data(), out.data(), false);
  return t.record(std::move(out), "matmul", [a, b, m, k, n](const Node& node) {
    kernels::matmul_nt(m, n, k, node.grad.data(), b->value.data(), a->grad.data(), true);
    kernels::matmul_tn(k, m, n, a->value.data(), node.grad.data(), b->grad.data(), true);
  });
}

Var matmul_nt(Tape& t, Var a, Var b) {
  require_rank("matmul_nt", a->value, 2);
  require_rank("matmul_nt", b->value, 2);
  require(a->value.shape[1] == b->value.shape[1], "matmul_nt", a->value, b->value);
  const int m = a->value.shape[0], k = a->value.shape[1], n = b->value.shape[0];
  Tensor out({m, n});
  kernels::matmul_nt(m, k, n, a->value.data(), b->value.data(), out.data(), false);
  return t.record(std::move(out), "matmul_nt", [a, b, m, k, n](const Node& node) {
    // dA += dC * B, dB += dC^T * A
    kernels::matmul_nn(m, n, k, node.grad.data(), b->value.data(), a->grad.data(), true);
    kernels::matmul_tn(n, m, k, node.grad.data(), a->value.data(), b->grad.data(), true);
  });
}

Var matvec(Tape& t, Var a, Var x) {
  require_rank("matvec", a->value, 2);
  require_rank("matvec", x->value, 1);
  require(a->value.shape[1] == x->value.shape[0], "matvec", a->value, x->value);
  const int m = a->value.shape[0], k = a->value.shape[1];
  Tensor out({m});
  kernels::matmul_nn(m, k, 1, a->value.data(), x->value.data(), out.data(), false);
  return t.record(std::move(out), "matvec", [a, x, m, k](const Node& node) {
    kernels::matmul_nt(m, 1, k, node.grad.data(), x->value.data(), a->grad.data(), true);
    kernels::matmul_tn(k, m, 1, a->value.data(), node.grad.data(), x->grad.data(), true);
  });
}

Var vecmat(Tape& t, Var x, Var a) {
  require_rank("vecmat", x->value, 1);
  require_rank("vecmat", a->value, 2);
  require(x->value.shape[0] == a->value.shape[0], "vecmat", x->value, a->value);
  const int m = a->value.shape[0], n = a->value.shape[1];
  Tensor out({n});
  // x^T A viewed as (1 x m)(m x n)
  kernels::matmul_nn(1, m, n, x->value.data(), a->value.data(), out.data(), false);
  return t.record(std::move(out), "vecmat", [x, a, m, n](const Node& node) {
    kernels::matmul_nt(1, n, m, node.grad.data(), a->value.data(), x->grad.data(), true);
    kernels::matmul_nt(m, 1, n, x->value.data(), node.grad.data(), a->grad.data(), true);
  });
}

Var add(Tape& t, Var a, Var b) {
  require(same_shape(a->value, b->value), "add", a->value, b->value);
  Tensor out = a->value;
  for (long i = 0; i < out.size(); ++i) out.values[i] += b->value.values[i];
  return t.record(std::move(out), "add", [a, b](const Node& node) {
    for (long i = 0; i < node.grad.size(); ++i) {
      a->grad.values[i] += node.grad.values[i];
      b->grad.values[i] += node.grad.values[i];
    }
  });
}

Var mul(Tape& t, Var a, Var b) {
  require(same_shape(a->value, b->value), "mul", a->value, b->value);
  Tensor out = a->value;
  for (long i = 0; i < out.size(); ++i) out.values[i] *= b->value.values[i];
  return t.record(std::move(out), "mul", [a, b](const Node& node) {
    for (long i = 0; i < node.grad.size(); ++i) {
      a->grad.values[i] += node.grad.values[i] * b->value.values[i];
      b->grad.values[i] += node.grad.values[i] * a->value.values[i];
    }
  });
}

Var scale(Tape& t, Var a, double c) {
  Tensor out = a->value;
  for (double& v : out.values) v *= c;
  return t.record(std::move(out), "scale", [a, c](const Node& node) {
    for (long i = 0; i < node.grad.size(); ++i) a->grad.values[i] += c * node.grad.values[i];
  });
}

Var neg(Tape& t, Var a) { return scale(t, a, -1.0); }

Var add_col_broadcast(Tape& t, Var m, Var v) {
  require_rank("add_col_broadcast", m->value, 2);
  require_rank("add_col_broadcast", v->value, 1);
  require(m->value.shape[0] == v->value.shape[0], "add_col_broadcast", m->value, v->value);
  const int rows = m->value.shape[0], cols = m->value.shape[1];
  Tensor out = m->value;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) out.at(r, c) += v->value.at(r);
  return t.record(std::move(out), "add_col_broadcast", [m, v, rows, cols](const Node& node) {
    for (int r = 0; r < rows; ++r) {
      double acc = 0.0;
      for (int c = 0; c < cols; ++c) {
        m->grad.at(r, c) += node.grad.at(r, c);
        acc += node.grad.at(r, c);
      }
      v->grad.at(r) += acc;
    }
  });
}

Var add_row_broadcast(Tape& t, Var m, Var v) {
  require_rank("add_row_broadcast", m->value, 2);
  require_rank("add_row_broadcast", v->value, 1);
  require(m->value.shape[1] == v->value.shape[0], "add_row_broadcast", m->value, v->value);
  const int rows = m->value.shape[0], cols = m->value.shape[1];
  Tensor out = m->value;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) out.at(r, c) += v->value.at(c);
  return t.record(std::move(out), "add_row_broadcast", [m, v, rows, cols](const Node& node) {
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) {
        m->grad.at(r, c) += node.grad.at(r, c);
        v->grad.at(c) += node.grad.at(r, c);
      }
  });
}

Var mul_row_broadcast(Tape& t, Var m, Var v) {
  require_rank("mul_row_broadcast", m->value, 2);
  require_rank("mul_row_broadcast", v->value, 1);
  require(m->value.shape[1] == v->value.shape[0], "mul_row_broadcast", m->value, v->value);
  const int rows = m->value.shape[0], cols = m->value.shape[1];
  Tensor out = m->value;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) out.at(r, c) *= v->value.at(c);
  return t.record(std::move(out), "mul_row_broadcast", [m, v, rows, cols](const Node& node) {
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) {
        m->grad.at(r, c) += node.grad.at(r, c) * v->value.at(c);
        v->grad.at(c) += node.grad.at(r, c) * m->value.at(r, c);
      }
  });
}

Var concat_cols(Tape& t, const std::vector<Var>& parts) {
  if (parts.empty()) throw ShapeError("concat_cols: no operands");
  const int rank = parts[0]->value.rank();
  const int rows = rank == 2 ? parts[0]->value.shape[0] : 1;
  int total = 0;
  for (Var p : parts) {
    if (p->value.rank() != rank || (rank == 2 && p->value.shape[0] != rows))
      shape_fail("concat_cols", parts[0]->value, p->value);
    total += rank == 2 ? p->value.shape[1] : p->value.shape[0];
  }

  Tensor out(rank == 2 ? std::vector<int>{rows, total} : std::vector<int>{total});
  for (int r = 0; r < rows; ++r) {
    int off = 0;
    for (Var p : parts) {
      const int w = rank == 2 ? p->value.shape[1] : p->value.shape[0];
      std::copy_n(p->value.data() + static_cast<std::size_t>(r) * w, w,
                  out.data() + static_cast<std::size_t>(r) * total + off);
      off += w;
    }
  }
  return t.record(std::move(out), "concat_cols", [parts, rows, total, rank](const Node& node) {
    for (int r = 0; r < rows; ++r) {
      int off = 0;
      for (Var p : parts) {
        const int w = rank == 2 ? p->value.shape[1] : p->value.shape[0];
        const double* src = node.grad.data() + static_cast<std::size_t>(r) * total + off;
        double* dst = p->grad.data() + static_cast<std::size_t>(r) * w;
        for (int j = 0; j < w; ++j) dst[j] += src[j];
        off += w;
      }
    }
  });
}

Var slice_cols(Tape& t, Var a, int begin, int len) {
  const int rank = a->value.rank();
  const int width = rank == 2 ? a->value.shape[1] : a->value.shape[0];
  const int rows = rank == 2 ? a->value.shape[0] : 1;
  if (begin < 0 || len <= 0 || begin + len > width)
    throw ShapeError("slice_cols: range [" + std::to_string(begin) + "," +
                     std::to_string(begin + len) + ") outside " + Tensor::shape_str(a->value.shape));
  Tensor out(rank == 2 ? std::vector<int>{rows, len} : std::vector<int>{len});
  for (int r = 0; r < rows; ++r)
    std::copy_n(a->value.data() + static_cast<std::size_t>(r) * width + begin, len,
                out.data() + static_cast<std::size_t>(r) * len);
  return t.record(std::move(out), "slice_cols", [a, begin, len, rows, width](const Node& node) {
    for (int r = 0; r < rows; ++r) {
      const double* src = node.grad.data() + static_cast<std::size_t>(r) * len;
      double* dst = a->grad.data() + static_cast<std::size_t>(r) * width + begin;
      for (int j = 0; j < len; ++j) dst[j] += src[j];
    }
  });
}

Var stack_rows(Tape& t, const std::vector<Var>& rows) {
  if (rows.empty()) throw ShapeError("stack_rows: no operands");
  const int d = rows[0]->value.shape.back();
  for (Var r : rows) {
    if (r->value.rank() != 1 || r->value.shape[0] != d) shape_fail("stack_rows", rows[0]->value, r->value);
  }
  const int n = static_cast<int>(rows.size());
  Tensor out({n, d});
  for (int i = 0; i < n; ++i)
    std::copy_n(rows[i]->value.data(), d, out.data() + static_cast<std::size_t>(i) * d);
  return t.record(std::move(out), "stack_rows", [rows, d](const Node& node) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const double* src = node.grad.data() + i * d;
      for (int j = 0; j < d; ++j) rows[i]->grad.values[j] += src[j];
    }
  });
}

Var row(Tape& t, Var m, int r) {
  require_rank("row", m->value, 2);
  const int rows = m->value.shape[0], cols = m->value.shape[1];
  if (r < 0 || r >= rows)
    throw ShapeError("row: index " + std::to_string(r) + " outside " + Tensor::shape_str(m->value.shape));
  Tensor out({cols});
  std::copy_n(m->value.data() + static_cast<std::size_t>(r) * cols, cols, out.data());
  return t.record(std::move(out), "row", [m, r, cols](const Node& node) {
    double* dst = m->grad.data() + static_cast<std::size_t>(r) * cols;
    for (int j = 0; j < cols; ++j) dst[j] += node.grad.values[j];
  });
}

Var reshape(Tape& t, Var a, std::vector<int> shape) {
  if (Tensor::count(shape) != a->value.size())
    throw ShapeError("reshape: cannot view " + Tensor::shape_str(a->value.shape) + " as " +
                     Tensor::shape_str(shape));
  Tensor out(std::move(shape), a->value.values);
  return t.record(std::move(out), "reshape", [a](const Node& node) {
    for (long i = 0; i < node.grad.size(); ++i) a->grad.values[i] += node.grad.values[i];
  });
}

Var tile_rows(Tape& t, Var v, int n) {
  require_rank("tile_rows", v->value, 1);
  const int d = v->value.shape[0];
  Tensor out({n, d});
  for (int i = 0; i < n; ++i) std::copy_n(v->value.data(), d, out.data() + static_cast<std::size_t>(i) * d);
  return t.record(std::move(out), "tile_rows", [v, n, d](const Node& node) {
    for (int i = 0; i < n; ++i) {
      const double* src = node.grad.data() + static_cast<std::size_t>(i) * d;
      for (int j = 0; j < d; ++j) v->grad.values[j] += src[j];
    }
  });
}

Var mean_rows(Tape& t, Var m) {
  require_rank("mean_rows", m->value, 2);
  const int rows = m->value.shape[0], cols = m->value.shape[1];
  Tensor out({cols});
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) out.at(c) += m->value.at(r, c);
  for (int c = 0; c < cols; ++c) out.at(c) /= rows;
  return t.record(std::move(out), "mean_rows", [m, rows, cols](const Node& node) {
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) m->grad.at(r, c) += node.grad.at(c) / rows;
  });
}

Var relu(Tape& t, Var a) {
  Tensor out = a->value;
  for (double& v : out.values) v = v > 0.0 ? v : 0.0;
  return t.record(std::move(out), "relu", [a](const Node& node) {
    for (long i = 0; i < node.grad.size(); ++i)
      if (a->value.values[i] > 0.0) a->grad.values[i] += node.grad.values[i];
  });
}

Var log_elem(Tape& t, Var a) {
  Tensor out = a->value;
  for (double& v : out.values) v = std::log(v);
  return t.record(std::move(out), "log", [a](const Node& node) {
    for (long i = 0; i < node.grad.size(); ++i)
      a->grad.values[i] += node.grad.values[i] / a->value.values[i];
  });
}

Var softmax_rows(Tape& t, Var a) {
  const int rows = a->value.rank() == 2 ? a->value.shape[0] : 1;
  const int cols = a->value.rank() == 2 ? a->value.shape[1] : a->value.shape[0];
  Tensor out = a->value;
  for (int r = 0; r < rows; ++r) {
    double* p = out.data() + static_cast<std::size_t>(r) * cols;
    double mx = p[0];
    for (int c = 1; c < cols; ++c) mx = std::max(mx, p[c]);
    double sum = 0.0;
    for (int c = 0; c < cols; ++c) {
      p[c] = std::exp(p[c] - mx);
      sum += p[c];
    }
    for (int c = 0; c < cols; ++c) p[c] /= sum;
  }
  return t.record(std::move(out), "softmax_rows", [a, rows, cols](const Node& node) {
    for (int r = 0; r < rows; ++r) {
      const double* y = node.value.data() + static_cast<std::size_t>(r) * cols;
      const double* g = node.grad.data() + static_cast<std::size_t>(r) * cols;
      double dot = 0.0;
      for (int c = 0; c < cols; ++c) dot += y[c] * g[c];
      double* da = a->grad.data() + static_cast<std::size_t>(r) * cols;
      for (int c = 0; c < cols; ++c) da[c] += y[c] * (g[c] - dot);
    }
  });
}

Var log_softmax_vec(Tape& t, Var v) {
  require_rank("log_softmax_vec", v->value, 1);
  const int n = v->value.shape[0];
  Tensor out = v->value;
  double mx = out.values[0];
  for (int i = 1; i < n; ++i) mx = std::max(mx, out.values[i]);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += std::exp(out.values[i] - mx);
  const double lse = mx + std::log(sum);
  for (int i = 0; i < n; ++i) out.values[i] -= lse;
  return t.record(std::move(out), "log_softmax_vec", [v, n](const Node& node) {
    double gsum = 0.0;
    for (int i = 0; i < n; ++i) gsum += node.grad.values[i];
    for (int i = 0; i < n; ++i)
      v->grad.values[i] += node.grad.values[i] - std::exp(node.value.values[i]) * gsum;
  });
}

Var sum(Tape& t, Var a) {
  double s = 0.0;
  for (double v : a->value.values) s += v;
  return t.record(Tensor::scalar(s), "sum", [a](const Node& node) {
    const double g = node.grad.values[0];
    for (long i = 0; i < a->grad.size(); ++i) a->grad.values[i] += g;
  });
}

Var pick(Tape& t, Var v, int i) {
  require_rank("pick", v->value, 1);
  if (i < 0 || i >= v->value.shape[0])
    throw ShapeError("pick: index " + std::to_string(i) + " outside " + Tensor::shape_str(v->value.shape));
  return t.record(Tensor::scalar(v->value.at(i)), "pick", [v, i](const Node& node) {
    v->grad.at(i) += node.grad.values[0];
  });
}

Var mean_stack(Tape& t, const std::vector<Var>& scalars) {
  if (scalars.empty()) throw ShapeError("mean_stack: no operands");
  double s = 0.0;
  for (Var v : scalars) {
    if (!v->is_scalar())
      throw ShapeError("mean_stack: non-scalar operand " + Tensor::shape_str(v->value.shape));
    s += v->value.values[0];
  }
  const double n = static_cast<double>(scalars.size());
  return t.record(Tensor::scalar(s / n), "mean_stack", [scalars, n](const Node& node) {
    const double g = node.grad.values[0] / n;
    for (Var v : scalars) v->grad.values[0] += g;
  });
}

Var row_max(Tape& t, Var a) {
  require_rank("row_max", a->value, 2);
  const int rows = a->value.shape[0], cols = a->value.shape[1];
  Tensor out({rows});
  std::vector<int> arg(rows, 0);
  for (int r = 0; r < rows; ++r) {
    double best = a->value.at(r, 0);
    int bi = 0;
    for (int c = 1; c < cols; ++c) {
      if (a->value.at(r, c) > best) {
        best = a->value.at(r, c);
        bi = c;
      }
    }
    out.at(r) = best;
    arg[r] = bi;
  }
  return t.record(std::move(out), "row_max", [a, arg](const Node& node) {
    for (std::size_t r = 0; r < arg.size(); ++r)
      a->grad.at(static_cast<int>(r), arg[r]) += node.grad.at(static_cast<int>(r));
  });
}

Var piecewise_max(Tape& t, Var a, int cut1, int cut2) {
  require_rank("piecewise_max", a->value, 2);
  const int rows = a->value.shape[0], len = a->value.shape[1];
  if (!(1 <= cut1 && cut1 <= cut2 && cut2 <= len))
    throw ShapeError("piecewise_max: cuts (" + std::to_string(cut1) + "," + std::to_string(cut2) +
                     ") invalid for " + Tensor::shape_str(a->value.shape));
  const int seg_begin[3] = {0, cut1, cut2};
  const int seg_end[3] = {cut1, cut2, len};
  Tensor out({rows, 3});
  std::vector<int> arg(static_cast<std::size_t>(rows) * 3, -1);
  for (int r = 0; r < rows; ++r) {
    for (int s = 0; s < 3; ++s) {
      if (seg_begin[s] >= seg_end[s]) {
        out.at(r, s) = 0.0;  // empty segment: neutral pre-activation, no gradient
        continue;
      }
      double best = a->value.at(r, seg_begin[s]);
      int bi = seg_begin[s];
      for (int c = seg_begin[s] + 1; c < seg_end[s]; ++c) {
        if (a->value.at(r, c) > best) {
          best = a->value.at(r, c);
          bi = c;
        }
      }
      out.at(r, s) = best;
      arg[static_cast<std::size_t>(r) * 3 + s] = bi;
    }
  }
  return t.record(std::move(out), "piecewise_max", [a, arg, rows](const Node& node) {
    for (int r = 0; r < rows; ++r)
      for (int s = 0; s < 3; ++s) {
        const int c = arg[static_cast<std::size_t>(r) * 3 + s];
        if (c >= 0) a->grad.at(r, c) += node.grad.at(r, s);
      }
  });
}

namespace {

double vec_norm_sq(const double* p, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += p[i] * p[i];
  return s;
}

}  // namespace

Var cosine(Tape& t, Var u, Var v) {
  require_rank("cosine", u->value, 1);
  require_rank("cosine", v->value, 1);
  require(u->value.shape == v->value.shape, "cosine", u->value, v->value);
  const int n = u->value.shape[0];
  const double nu2 = vec_norm_sq(u->value.data(), n);
  const double nv2 = vec_norm_sq(v->value.data(), n);
  const bool degenerate = nu2 == 0.0 || nv2 == 0.0;
  const bool identical = u->value.values == v->value.values;
  double c = 0.0;
  double inv = 0.0;
  if (identical && !degenerate) {
    c = 1.0;  // self-similarity, exact
  } else if (!degenerate) {
    double dot = 0.0;
    for (int i = 0; i < n; ++i) dot += u->value.values[i] * v->value.values[i];
    inv = 1.0 / (std::sqrt(nu2) * std::sqrt(nv2));
    c = dot * inv;
  }
  return t.record(Tensor::scalar(c), "cosine", [u, v, n, nu2, nv2, c, inv, degenerate,
                                                identical](const Node& node) {
    if (degenerate || identical) return;  // gradient is zero at these points
    const double g = node.grad.values[0];
    for (int i = 0; i < n; ++i) {
      u->grad.values[i] += g * (v->value.values[i] * inv - c * u->value.values[i] / nu2);
      v->grad.values[i] += g * (u->value.values[i] * inv - c * v->value.values[i] / nv2);
    }
  });
}

Var cosine_matrix(Tape& t, Var b) {
  require_rank("cosine_matrix", b->value, 2);
  const int n = b->value.shape[0], d = b->value.shape[1];
  std::vector<double> norm_sq(n), norm(n);
  for (int i = 0; i < n; ++i) {
    norm_sq[i] = vec_norm_sq(b->value.data() + static_cast<std::size_t>(i) * d, d);
    norm[i] = std::sqrt(norm_sq[i]);
  }
  Tensor out({n, n});
  for (int i = 0; i < n; ++i) {
    const double* bi = b->value.data() + static_cast<std::size_t>(i) * d;
    for (int j = 0; j < n; ++j) {
      if (norm_sq[i] == 0.0 || norm_sq[j] == 0.0) continue;  // stays 0
      if (i == j) {
        out.at(i, j) = 1.0;
        continue;
      }
      const double* bj = b->value.data() + static_cast<std::size_t>(j) * d;
      double dot = 0.0;
      for (int k = 0; k < d; ++k) dot += bi[k] * bj[k];
      out.at(i, j) = dot / (norm[i] * norm[j]);
    }
  }
  return t.record(std::move(out), "cosine_matrix", [b, n, d, norm_sq, norm](const Node& node) {
    for (int i = 0; i < n; ++i) {
      const double* bi = b->value.data() + static_cast<std::size_t>(i) * d;
      double* dbi = b->grad.data() + static_cast<std::size_t>(i) * d;
      for (int j = 0; j < n; ++j) {
        if (i == j || norm_sq[i] == 0.0 || norm_sq[j] == 0.0) continue;
        const double g = node.grad.at(i, j);
        if (g == 0.0) continue;
        const double* bj = b->value.data() + static_cast<std::size_t>(j) * d;
        double* dbj = b->grad.data() + static_cast<std::size_t>(j) * d;
        const double inv = 1.0 / (norm[i] * norm[j]);
        const double e = node.value.at(i, j);
        for (int k = 0; k < d; ++k) {
          dbi[k] += g * (bj[k] * inv - e * bi[k] / norm_sq[i]);
          dbj[k] += g * (bi[k] * inv - e * bj[k] / norm_sq[j]);
        }
      }
    }
  });
}

Var conv1d_same(Tape& t, Var x, Var kernels_in, Var bias, int window) {
  require_rank("conv1d_same", x->value, 2);
  require_rank("conv1d_same", kernels_in->value, 2);
  require_rank("conv1d_same", bias->value, 1);
  const int L = x->value.shape[0], D = x->value.shape[1];
  const int c = kernels_in->value.shape[0];
  if (window < 1 || window % 2 == 0)
    throw ShapeError("conv1d_same: window must be odd and positive, got " + std::to_string(window));
  if (kernels_in->value.shape[1] != window * D)
    shape_fail("conv1d_same", x->value, kernels_in->value);
  if (bias->value.shape[0] != c) shape_fail("conv1d_same", kernels_in->value, bias->value);
  Tensor out({c, L});
  kernels::conv1d_same(L, D, c, window, x->value.data(), kernels_in->value.data(),
                       bias->value.data(), out.data());
  return t.record(std::move(out), "conv1d_same", [x, kernels_in, bias, L, D, c, window](const Node& node) {
    kernels::conv1d_same_grad_input(L, D, c, window, node.grad.data(), kernels_in->value.data(),
                                    x->grad.data());
    kernels::conv1d_same_grad_kernel(L, D, c, window, node.grad.data(), x->value.data(),
                                     kernels_in->grad.data(), bias->grad.data());
  });
}

Var dropout(Tape& t, Var a, double rate, Rng& rng) {
  if (rate == 0.0) return a;
  if (rate < 0.0 || rate >= 1.0)
    throw NumericError("dropout: rate must lie in [0,1), got " + std::to_string(rate));
  const double keep_scale = 1.0 / (1.0 - rate);
  Tensor mask(a->value.shape);
  for (double& m : mask.values) m = rng.uniform() < rate ? 0.0 : keep_scale;
  Tensor out = a->value;
  for (long i = 0; i < out.size(); ++i) out.values[i] *= mask.values[i];
  return t.record(std::move(out), "dropout", [a, mask = std::move(mask)](const Node& node) {
    for (long i = 0; i < node.grad.size(); ++i)
      a->grad.values[i] += node.grad.values[i] * mask.values[i];
  });
}

}  // namespace gbre::ops
