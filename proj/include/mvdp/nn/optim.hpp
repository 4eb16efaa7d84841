#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include <json.hpp>

#include "mvdp/nn/autodiff.hpp"

namespace mvdp::nn {

struct AdamState {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::uint64_t step = 0;
  std::vector<Tensor> first_moment;
  std::vector<Tensor> second_moment;
};

// Bias-corrected Adam update of every parameter from its accumulated grad.
// Throws OptimizerError naming the parameter when a gradient is not finite
// (no parameter is modified in that case).
void adam_step(std::span<Parameter* const> params, AdamState& state);

void zero_grads(std::span<Parameter* const> params);

using LossFn = std::function<Var(Tape&)>;

// Central finite differences against the reverse-mode gradient. Returns the
// largest |a - n| / max(1, |a|, |n|) over all coordinates of all parameters.
// `loss_fn` must read the parameters through Tape::parameter.
double grad_check(const LossFn& loss_fn, std::span<Parameter* const> params, double eps = 1e-5);

// JSON checkpoint {"format": "mvdp-checkpoint", "version": 1, "meta": {...},
// "parameters": [{"name", "shape": [r, c], "values": [...]}]}. Values are
// written in shortest round-trip form.
void save_checkpoint(const std::filesystem::path& path, std::span<const Parameter* const> params,
                     const nlohmann::json& meta = nlohmann::json::object());
struct Checkpoint {
  nlohmann::json meta;
  std::vector<Parameter> parameters;
};
Checkpoint load_checkpoint(const std::filesystem::path& path);
// Copies checkpoint values into `params` by name; throws ValidationError on a
// missing name or shape mismatch.
void restore(const Checkpoint& checkpoint, std::span<Parameter* const> params);

}  // namespace mvdp::nn
