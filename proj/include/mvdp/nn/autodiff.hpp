#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mvdp/graph.hpp"
#include "mvdp/tensor.hpp"

namespace mvdp::nn {

// A named learnable tensor with its accumulated gradient.
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;

  Parameter() = default;
  Parameter(std::string n, Tensor v) : name(std::move(n)), value(std::move(v)), grad(value.rows(), value.cols()) {}
  void zero_grad() { grad = Tensor(value.rows(), value.cols()); }
};

class Tape;

// Handle to a value recorded on a Tape.
struct Var {
  Tape* tape = nullptr;
  std::size_t id = 0;

  const Tensor& value() const;
};

// Reverse-mode differentiation tape. Every op appends a node holding its
// forward value and a closure that propagates the node's gradient into its
// parents. Parameters enter as leaves whose gradient is accumulated into
// Parameter::grad by backward().
class Tape {
 public:
  using Backward = std::function<void(Tape&, std::size_t self)>;

  Var constant(Tensor value);
  Var parameter(Parameter& p);
  // Generic op node; it needs a gradient iff one of `parents` does.
  Var record(Tensor value, std::vector<std::size_t> parents, Backward backward);

  const Tensor& value(std::size_t id) const { return nodes_.at(id).value; }
  bool needs_grad(std::size_t id) const { return nodes_.at(id).needs_grad; }
  // Gradient buffer of a node, zero-initialized on first use.
  Tensor& grad(std::size_t id);

  // Seeds d(loss)/d(loss) = 1 on a 1x1 node and runs every closure in reverse
  // order. Throws ShapeError for a non-scalar loss.
  void backward(Var loss);

  std::size_t size() const noexcept { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    Backward backward;
    Parameter* param = nullptr;
    bool needs_grad = false;
  };
  std::vector<Node> nodes_;
};

// Elementary ops. All operands must live on the same tape.
Var matmul(Var a, Var b);                 // (n x k) * (k x m)
Var add(Var a, Var b);                    // same shape
Var sub(Var a, Var b);
Var mul(Var a, Var b);                    // Hadamard product
Var add_row(Var a, Var row);              // a (n x m) + broadcast row (1 x m)
Var affine(Var a, double scale, double shift);  // scale * a + shift
Var sigmoid(Var a);
Var tanh(Var a);
Var relu(Var a);
Var concat_cols(std::span<const Var> parts);
Var sum_all(Var a);                       // 1 x 1
Var softmax_rows(Var a);

// Row v of the result is the sum of rows u of `h` over the given neighbor
// list of v; with `weighted` each term is scaled by the edge weight.
Var neighbor_sum(Var h, const std::vector<std::vector<graph::Neighbor>>& neighbors, bool weighted);

// Mean over `rows` of -log(max(p[row, label[row]], floor)).
inline constexpr double kLogClampFloor = 1e-12;
Var cross_entropy(Var probs, std::span<const int> labels, std::span<const std::size_t> rows);

}  // namespace mvdp::nn
