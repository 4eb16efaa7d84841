#include "mvdp/nn/autodiff.hpp"

#include <algorithm>
#include <cmath>

#include "mvdp/error.hpp"

namespace mvdp::nn {

const Tensor& Var::value() const { return tape->value(id); }

Var Tape::constant(Tensor value) {
  Node node;
  node.value = std::move(value);
  nodes_.push_back(std::move(node));
  return {this, nodes_.size() - 1};
}

Var Tape::parameter(Parameter& p) {
  Node node;
  node.value = p.value;
  node.param = &p;
  node.needs_grad = true;
  nodes_.push_back(std::move(node));
  return {this, nodes_.size() - 1};
}

Var Tape::record(Tensor value, std::vector<std::size_t> parents, Backward backward) {
  Node node;
  node.value = std::move(value);
  for (std::size_t p : parents) node.needs_grad = node.needs_grad || nodes_.at(p).needs_grad;
  if (node.needs_grad) node.backward = std::move(backward);
  nodes_.push_back(std::move(node));
  return {this, nodes_.size() - 1};
}

Tensor& Tape::grad(std::size_t id) {
  Node& node = nodes_.at(id);
  if (node.grad.size() != node.value.size() || !node.grad.same_shape(node.value)) {
    node.grad = Tensor(node.value.rows(), node.value.cols());
  }
  return node.grad;
}

void Tape::backward(Var loss) {
  if (loss.tape != this) throw ShapeError("loss belongs to another tape");
  const Tensor& lv = value(loss.id);
  if (lv.rows() != 1 || lv.cols() != 1) throw ShapeError("backward needs a 1x1 loss, got " + shape_string(lv));
  grad(loss.id)[0] = 1.0;
  for (std::size_t i = loss.id + 1; i-- > 0;) {
    Node& node = nodes_[i];
    if (!node.needs_grad || node.grad.empty()) continue;
    if (node.param != nullptr) {
      auto& pg = node.param->grad;
      if (!pg.same_shape(node.value)) pg = Tensor(node.value.rows(), node.value.cols());
      for (std::size_t k = 0; k < pg.size(); ++k) pg[k] += node.grad[k];
    } else if (node.backward) {
      node.backward(*this, i);
    }
  }
}

namespace {

void require_same_tape(Var a, Var b) {
  if (a.tape == nullptr || a.tape != b.tape) throw ShapeError("operands live on different tapes");
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (!a.same_shape(b)) {
    throw ShapeError(std::string(op) + ": shape mismatch " + shape_string(a) + " vs " + shape_string(b));
  }
}

template <typename Forward, typename Derivative>
Var unary_elementwise(Var a, Forward f, Derivative df) {
  const Tensor& av = a.value();
  Tensor out(av.rows(), av.cols());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = f(av[i]);
  const std::size_t ia = a.id;
  return a.tape->record(std::move(out), {ia}, [ia, df](Tape& t, std::size_t self) {
    const Tensor& y = t.value(self);
    const Tensor& x = t.value(ia);
    const Tensor& g = t.grad(self);
    Tensor& ga = t.grad(ia);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * df(x[i], y[i]);
  });
}

}  // namespace

Var matmul(Var a, Var b) {
  require_same_tape(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (av.cols() != bv.rows()) {
    throw ShapeError("matmul: " + shape_string(av) + " x " + shape_string(bv));
  }
  const std::size_t n = av.rows(), k = av.cols(), m = bv.cols();
  Tensor out(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    double* orow = &out(i, 0);
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = av(i, p);
      if (aip == 0.0) continue;
      const double* brow = &bv(p, 0);
      for (std::size_t j = 0; j < m; ++j) orow[j] += aip * brow[j];
    }
  }
  const std::size_t ia = a.id, ib = b.id;
  return a.tape->record(std::move(out), {ia, ib}, [ia, ib, n, k, m](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    const Tensor& av = t.value(ia);
    const Tensor& bv = t.value(ib);
    if (t.needs_grad(ia)) {
      Tensor& ga = t.grad(ia);
      for (std::size_t i = 0; i < n; ++i) {
        const double* grow = &g(i, 0);
        for (std::size_t p = 0; p < k; ++p) {
          const double* brow = &bv(p, 0);
          double acc = 0.0;
          for (std::size_t j = 0; j < m; ++j) acc += grow[j] * brow[j];
          ga(i, p) += acc;
        }
      }
    }
    if (t.needs_grad(ib)) {
      Tensor& gb = t.grad(ib);
      for (std::size_t i = 0; i < n; ++i) {
        const double* grow = &g(i, 0);
        for (std::size_t p = 0; p < k; ++p) {
          const double aip = av(i, p);
          if (aip == 0.0) continue;
          double* gbrow = &gb(p, 0);
          for (std::size_t j = 0; j < m; ++j) gbrow[j] += aip * grow[j];
        }
      }
    }
  });
}

Var add(Var a, Var b) {
  require_same_tape(a, b);
  require_same_shape(a.value(), b.value(), "add");
  Tensor out = a.value();
  const Tensor& bv = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
  const std::size_t ia = a.id, ib = b.id;
  return a.tape->record(std::move(out), {ia, ib}, [ia, ib](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    for (std::size_t id : {ia, ib}) {
      if (!t.needs_grad(id)) continue;
      Tensor& gx = t.grad(id);
      for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i];
    }
  });
}

Var sub(Var a, Var b) {
  require_same_tape(a, b);
  require_same_shape(a.value(), b.value(), "sub");
  Tensor out = a.value();
  const Tensor& bv = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= bv[i];
  const std::size_t ia = a.id, ib = b.id;
  return a.tape->record(std::move(out), {ia, ib}, [ia, ib](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    if (t.needs_grad(ia)) {
      Tensor& ga = t.grad(ia);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
    }
    if (t.needs_grad(ib)) {
      Tensor& gb = t.grad(ib);
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] -= g[i];
    }
  });
}

Var mul(Var a, Var b) {
  require_same_tape(a, b);
  require_same_shape(a.value(), b.value(), "mul");
  Tensor out = a.value();
  const Tensor& bv = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= bv[i];
  const std::size_t ia = a.id, ib = b.id;
  return a.tape->record(std::move(out), {ia, ib}, [ia, ib](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    const Tensor& av = t.value(ia);
    const Tensor& bv = t.value(ib);
    if (t.needs_grad(ia)) {
      Tensor& ga = t.grad(ia);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * bv[i];
    }
    if (t.needs_grad(ib)) {
      Tensor& gb = t.grad(ib);
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * av[i];
    }
  });
}

Var add_row(Var a, Var row) {
  require_same_tape(a, row);
  const Tensor& av = a.value();
  const Tensor& rv = row.value();
  if (rv.rows() != 1 || rv.cols() != av.cols()) {
    throw ShapeError("add_row: cannot broadcast " + shape_string(rv) + " over " + shape_string(av));
  }
  Tensor out = av;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) += rv[j];
  }
  const std::size_t ia = a.id, ir = row.id;
  return a.tape->record(std::move(out), {ia, ir}, [ia, ir](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    if (t.needs_grad(ia)) {
      Tensor& ga = t.grad(ia);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
    }
    if (t.needs_grad(ir)) {
      Tensor& gr = t.grad(ir);
      for (std::size_t i = 0; i < g.rows(); ++i) {
        for (std::size_t j = 0; j < g.cols(); ++j) gr[j] += g(i, j);
      }
    }
  });
}

Var affine(Var a, double scale, double shift) {
  return unary_elementwise(
      a, [scale, shift](double x) { return scale * x + shift; }, [scale](double, double) { return scale; });
}

Var sigmoid(Var a) {
  return unary_elementwise(
      a,
      [](double x) {
        if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Var tanh(Var a) {
  return unary_elementwise(
      a, [](double x) { return std::tanh(x); }, [](double, double y) { return 1.0 - y * y; });
}

Var relu(Var a) {
  return unary_elementwise(
      a, [](double x) { return x > 0.0 ? x : 0.0; }, [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Var concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw ShapeError("concat_cols with no inputs");
  const std::size_t n = parts[0].value().rows();
  std::size_t total = 0;
  std::vector<std::size_t> ids, offsets;
  for (const Var& p : parts) {
    require_same_tape(parts[0], p);
    if (p.value().rows() != n) throw ShapeError("concat_cols: row counts differ");
    ids.push_back(p.id);
    offsets.push_back(total);
    total += p.value().cols();
  }
  Tensor out(n, total);
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const Tensor& pv = parts[k].value();
    for (std::size_t i = 0; i < n; ++i) {
      std::copy(pv.row(i).begin(), pv.row(i).end(), out.row(i).begin() + static_cast<std::ptrdiff_t>(offsets[k]));
    }
  }
  return parts[0].tape->record(std::move(out), ids, [ids, offsets](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    for (std::size_t k = 0; k < ids.size(); ++k) {
      if (!t.needs_grad(ids[k])) continue;
      Tensor& gp = t.grad(ids[k]);
      for (std::size_t i = 0; i < gp.rows(); ++i) {
        for (std::size_t j = 0; j < gp.cols(); ++j) gp(i, j) += g(i, offsets[k] + j);
      }
    }
  });
}

Var sum_all(Var a) {
  const Tensor& av = a.value();
  double s = 0.0;
  for (double v : av.values()) s += v;
  const std::size_t ia = a.id;
  return a.tape->record(Tensor(1, 1, s), {ia}, [ia](Tape& t, std::size_t self) {
    const double g = t.grad(self)[0];
    Tensor& ga = t.grad(ia);
    for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g;
  });
}

Var softmax_rows(Var a) {
  const Tensor& av = a.value();
  Tensor out(av.rows(), av.cols());
  for (std::size_t i = 0; i < av.rows(); ++i) {
    const auto in = av.row(i);
    auto o = out.row(i);
    const double mx = *std::max_element(in.begin(), in.end());
    double total = 0.0;
    for (std::size_t j = 0; j < in.size(); ++j) {
      o[j] = std::exp(in[j] - mx);
      total += o[j];
    }
    for (double& v : o) v /= total;
  }
  const std::size_t ia = a.id;
  return a.tape->record(std::move(out), {ia}, [ia](Tape& t, std::size_t self) {
    const Tensor& y = t.value(self);
    const Tensor& g = t.grad(self);
    Tensor& ga = t.grad(ia);
    for (std::size_t i = 0; i < y.rows(); ++i) {
      double dot = 0.0;
      for (std::size_t j = 0; j < y.cols(); ++j) dot += g(i, j) * y(i, j);
      for (std::size_t j = 0; j < y.cols(); ++j) ga(i, j) += y(i, j) * (g(i, j) - dot);
    }
  });
}

Var neighbor_sum(Var h, const std::vector<std::vector<graph::Neighbor>>& neighbors, bool weighted) {
  const Tensor& hv = h.value();
  if (neighbors.size() != hv.rows()) {
    throw ShapeError("neighbor_sum: " + std::to_string(neighbors.size()) + " adjacency rows for " +
                     shape_string(hv) + " features");
  }
  const std::size_t width = hv.cols();
  Tensor out(hv.rows(), width);
  for (std::size_t v = 0; v < neighbors.size(); ++v) {
    double* orow = &out(v, 0);
    for (const auto& nb : neighbors[v]) {
      const double w = weighted ? nb.weight : 1.0;
      const double* hrow = &hv(nb.node, 0);
      for (std::size_t j = 0; j < width; ++j) orow[j] += w * hrow[j];
    }
  }
  const std::size_t ih = h.id;
  const auto* adj = &neighbors;
  return h.tape->record(std::move(out), {ih}, [ih, adj, weighted, width](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    Tensor& gh = t.grad(ih);
    for (std::size_t v = 0; v < adj->size(); ++v) {
      const double* grow = &g(v, 0);
      for (const auto& nb : (*adj)[v]) {
        const double w = weighted ? nb.weight : 1.0;
        double* ghrow = &gh(nb.node, 0);
        for (std::size_t j = 0; j < width; ++j) ghrow[j] += w * grow[j];
      }
    }
  });
}

Var cross_entropy(Var probs, std::span<const int> labels, std::span<const std::size_t> rows) {
  if (rows.empty()) throw EvaluationError("cross-entropy over an empty node mask");
  const Tensor& pv = probs.value();
  if (labels.size() != pv.rows()) throw ShapeError("cross_entropy: labels do not match probability rows");
  double total = 0.0;
  for (std::size_t r : rows) {
    if (r >= pv.rows()) throw ShapeError("cross_entropy: row index out of range");
    double row_sum = 0.0;
    for (double p : pv.row(r)) row_sum += p;
    if (std::abs(row_sum - 1.0) > 1e-6) throw EvaluationError("probability row does not sum to 1");
    const int y = labels[r];
    if (y < 0 || static_cast<std::size_t>(y) >= pv.cols()) throw ShapeError("cross_entropy: label out of range");
    total -= std::log(std::max(pv(r, static_cast<std::size_t>(y)), kLogClampFloor));
  }
  const double inv = 1.0 / static_cast<double>(rows.size());
  std::vector<std::size_t> row_copy(rows.begin(), rows.end());
  std::vector<int> label_copy(labels.begin(), labels.end());
  const std::size_t ip = probs.id;
  return probs.tape->record(
      Tensor(1, 1, total * inv), {ip},
      [ip, inv, row_copy = std::move(row_copy), label_copy = std::move(label_copy)](Tape& t, std::size_t self) {
        const double g = t.grad(self)[0];
        const Tensor& pv = t.value(ip);
        Tensor& gp = t.grad(ip);
        for (std::size_t r : row_copy) {
          const auto y = static_cast<std::size_t>(label_copy[r]);
          const double p = pv(r, y);
          if (p > kLogClampFloor) gp(r, y) -= g * inv / p;
        }
      });
}

}  // namespace mvdp::nn
