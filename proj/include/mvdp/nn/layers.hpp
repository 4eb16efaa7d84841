#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mvdp/nn/autodiff.hpp"
#include "mvdp/rng.hpp"

namespace mvdp::nn {

// Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)].
Tensor init_uniform(std::size_t fan_in, std::size_t fan_out, Rng& rng);

// y = x W + b with W stored as (in x out).
struct Linear {
  Parameter weight;
  Parameter bias;

  Linear() = default;
  Linear(std::string name, std::size_t in, std::size_t out, Rng& rng);
  Var operator()(Tape& tape, Var x);
  std::vector<Parameter*> parameters() { return {&weight, &bias}; }
};

// Gate weights for a GRU cell. Input-path matrices are (input x hidden),
// hidden-path matrices (hidden x hidden), biases (1 x hidden).
struct GruParams {
  Parameter w_update, u_update, b_update;
  Parameter w_reset, u_reset, b_reset;
  Parameter w_candidate, u_candidate, b_candidate;

  GruParams() = default;
  GruParams(std::string prefix, std::size_t input, std::size_t hidden, Rng& rng);
  std::size_t hidden_size() const { return u_update.value.rows(); }
  std::size_t input_size() const { return w_update.value.rows(); }
  std::vector<Parameter*> parameters();
};

// z = sigmoid(x Wz + h Uz + bz)
// r = sigmoid(x Wr + h Ur + br)
// c = tanh(x Wh + (r * h) Uh + bh)
// h' = (1 - z) * h + z * c
// Rows are independent batch entries. Throws ShapeError on mismatched widths.
Var gru_cell(Tape& tape, Var h_prev, Var x, GruParams& params);

// Fully connected stack; every layer but the last is followed by ReLU.
struct Mlp {
  std::vector<Linear> layers;

  Mlp() = default;
  Mlp(std::string prefix, std::size_t in, std::span<const std::size_t> hidden, std::size_t out, Rng& rng);
  Var operator()(Tape& tape, Var x);
  std::vector<Parameter*> parameters();
};

}  // namespace mvdp::nn
