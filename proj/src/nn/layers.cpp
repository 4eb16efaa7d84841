#include "mvdp/nn/layers.hpp"

#include <array>
#include <cmath>

#include "mvdp/error.hpp"

namespace mvdp::nn {

Tensor init_uniform(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  Tensor t(fan_in, fan_out);
  for (double& v : t.values()) v = rng.uniform(-bound, bound);
  return t;
}

Linear::Linear(std::string name, std::size_t in, std::size_t out, Rng& rng)
    : weight(name + ".weight", init_uniform(in, out, rng)), bias(name + ".bias", Tensor(1, out)) {}

Var Linear::operator()(Tape& tape, Var x) {
  return add_row(matmul(x, tape.parameter(weight)), tape.parameter(bias));
}

GruParams::GruParams(std::string prefix, std::size_t input, std::size_t hidden, Rng& rng)
    : w_update(prefix + ".w_update", init_uniform(input, hidden, rng)),
      u_update(prefix + ".u_update", init_uniform(hidden, hidden, rng)),
      b_update(prefix + ".b_update", Tensor(1, hidden)),
      w_reset(prefix + ".w_reset", init_uniform(input, hidden, rng)),
      u_reset(prefix + ".u_reset", init_uniform(hidden, hidden, rng)),
      b_reset(prefix + ".b_reset", Tensor(1, hidden)),
      w_candidate(prefix + ".w_candidate", init_uniform(input, hidden, rng)),
      u_candidate(prefix + ".u_candidate", init_uniform(hidden, hidden, rng)),
      b_candidate(prefix + ".b_candidate", Tensor(1, hidden)) {}

std::vector<Parameter*> GruParams::parameters() {
  return {&w_update, &u_update, &b_update, &w_reset, &u_reset, &b_reset, &w_candidate, &u_candidate, &b_candidate};
}

Var gru_cell(Tape& tape, Var h_prev, Var x, GruParams& params) {
  const std::size_t hidden = params.hidden_size();
  if (h_prev.value().cols() != hidden) {
    throw ShapeError("gru_cell: hidden state width " + std::to_string(h_prev.value().cols()) + ", expected " +
                     std::to_string(hidden));
  }
  if (x.value().cols() != params.input_size()) {
    throw ShapeError("gru_cell: input width " + std::to_string(x.value().cols()) + ", expected " +
                     std::to_string(params.input_size()));
  }
  if (x.value().rows() != h_prev.value().rows()) throw ShapeError("gru_cell: batch sizes differ");

  auto gate = [&](Parameter& w, Parameter& u, Parameter& b, Var h) {
    return add_row(add(matmul(x, tape.parameter(w)), matmul(h, tape.parameter(u))), tape.parameter(b));
  };
  Var z = sigmoid(gate(params.w_update, params.u_update, params.b_update, h_prev));
  Var r = sigmoid(gate(params.w_reset, params.u_reset, params.b_reset, h_prev));
  Var c = tanh(gate(params.w_candidate, params.u_candidate, params.b_candidate, mul(r, h_prev)));
  return add(mul(affine(z, -1.0, 1.0), h_prev), mul(z, c));
}

Mlp::Mlp(std::string prefix, std::size_t in, std::span<const std::size_t> hidden, std::size_t out, Rng& rng) {
  std::size_t prev = in;
  for (std::size_t i = 0; i < hidden.size(); ++i) {
    layers.emplace_back(prefix + "." + std::to_string(i), prev, hidden[i], rng);
    prev = hidden[i];
  }
  layers.emplace_back(prefix + "." + std::to_string(hidden.size()), prev, out, rng);
}

Var Mlp::operator()(Tape& tape, Var x) {
  for (std::size_t i = 0; i < layers.size(); ++i) {
    x = layers[i](tape, x);
    if (i + 1 < layers.size()) x = relu(x);
  }
  return x;
}

std::vector<Parameter*> Mlp::parameters() {
  std::vector<Parameter*> out;
  for (auto& l : layers) {
    out.push_back(&l.weight);
    out.push_back(&l.bias);
  }
  return out;
}

}  // namespace mvdp::nn
