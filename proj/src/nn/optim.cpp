#include "mvdp/nn/optim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "mvdp/error.hpp"

namespace mvdp::nn {

using nlohmann::json;

void zero_grads(std::span<Parameter* const> params) {
  for (Parameter* p : params) p->zero_grad();
}

void adam_step(std::span<Parameter* const> params, AdamState& state) {
  if (state.first_moment.empty()) {
    for (const Parameter* p : params) {
      state.first_moment.emplace_back(p->value.rows(), p->value.cols());
      state.second_moment.emplace_back(p->value.rows(), p->value.cols());
    }
  }
  if (state.first_moment.size() != params.size()) throw ShapeError("Adam state does not match parameter list");
  for (std::size_t k = 0; k < params.size(); ++k) {
    const Parameter& p = *params[k];
    if (!p.grad.same_shape(p.value) || !state.first_moment[k].same_shape(p.value)) {
      throw ShapeError("Adam: shape mismatch for parameter '" + p.name + "'");
    }
    if (!p.grad.all_finite()) throw OptimizerError("non-finite gradient for parameter '" + p.name + "'");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    Parameter& p = *params[k];
    Tensor& m = state.first_moment[k];
    Tensor& v = state.second_moment[k];
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double g = p.grad[i];
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g;
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g * g;
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      p.value[i] -= state.lr * m_hat / (std::sqrt(v_hat) + state.eps);
    }
  }
}

double grad_check(const LossFn& loss_fn, std::span<Parameter* const> params, double eps) {
  if (!(eps >= 1e-6 && eps <= 1e-3)) throw CheckError("grad_check eps must lie in [1e-6, 1e-3]");
  zero_grads(params);
  {
    Tape tape;
    Var loss = loss_fn(tape);
    if (!std::isfinite(loss.value()[0])) throw CheckError("loss is not finite");
    tape.backward(loss);
  }
  auto evaluate = [&]() {
    Tape tape;
    const double v = loss_fn(tape).value()[0];
    if (!std::isfinite(v)) throw CheckError("loss is not finite under perturbation");
    return v;
  };
  double worst = 0.0;
  for (Parameter* p : params) {
    const Tensor analytic = p->grad;
    for (std::size_t i = 0; i < p->value.size(); ++i) {
      const double original = p->value[i];
      p->value[i] = original + eps;
      const double up = evaluate();
      p->value[i] = original - eps;
      const double down = evaluate();
      p->value[i] = original;
      const double numeric = (up - down) / (2.0 * eps);
      const double a = analytic[i];
      const double err = std::abs(a - numeric) / std::max({1.0, std::abs(a), std::abs(numeric)});
      worst = std::max(worst, err);
    }
  }
  return worst;
}

void save_checkpoint(const std::filesystem::path& path, std::span<const Parameter* const> params,
                     const json& meta) {
  json doc;
  doc["format"] = "mvdp-checkpoint";
  doc["version"] = 1;
  doc["meta"] = meta;
  doc["parameters"] = json::array();
  for (const Parameter* p : params) {
    if (!p->value.all_finite()) throw NumericError("parameter '" + p->name + "' is not finite");
    doc["parameters"].push_back(
        {{"name", p->name}, {"shape", {p->value.rows(), p->value.cols()}}, {"values", p->value.values()}});
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << doc.dump() << '\n';
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  Checkpoint cp;
  try {
    const json doc = json::parse(in);
    if (doc.at("format") != "mvdp-checkpoint") throw SchemaError(path.string() + ": not a checkpoint");
    if (doc.at("version") != 1) throw SchemaError(path.string() + ": unsupported checkpoint version");
    cp.meta = doc.value("meta", json::object());
    for (const auto& entry : doc.at("parameters")) {
      const auto shape = entry.at("shape").get<std::vector<std::size_t>>();
      if (shape.size() != 2) throw SchemaError(path.string() + ": parameter shape must be 2-D");
      cp.parameters.emplace_back(entry.at("name").get<std::string>(),
                                 Tensor(shape[0], shape[1], entry.at("values").get<std::vector<double>>()));
    }
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return cp;
}

void restore(const Checkpoint& checkpoint, std::span<Parameter* const> params) {
  for (Parameter* p : params) {
    auto it = std::find_if(checkpoint.parameters.begin(), checkpoint.parameters.end(),
                           [&](const Parameter& c) { return c.name == p->name; });
    if (it == checkpoint.parameters.end()) throw ValidationError("checkpoint lacks parameter '" + p->name + "'");
    if (!it->value.same_shape(p->value)) {
      throw ValidationError("checkpoint parameter '" + p->name + "' has shape " + shape_string(it->value) +
                            ", expected " + shape_string(p->value));
    }
    p->value = it->value;
  }
}

}  // namespace mvdp::nn
