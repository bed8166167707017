#pragma once

#include <vector>

#include "vague/model.h"
#include "vague/numerics.h"

namespace vague::testing {

// Finite-difference check of loss_and_gradient over every parameter tensor.
inline GradCheckReport check_model_gradient(const std::vector<Sequence>& batch, ModelParams params,
                                            const ModelConfig& config, double epsilon = 1e-4) {
  auto grads = ModelParams::zeros(config);
  loss_and_gradient(batch, params, config, &grads);
  std::vector<GradCheckBlock> blocks;
  std::vector<const Matrix*> analytic;
  grads.for_each([&](const std::string&, const Matrix& m) { analytic.push_back(&m); });
  std::size_t i = 0;
  params.for_each([&](const std::string& name, Matrix& m) {
    blocks.push_back({name, m.values(), analytic[i++]->values()});
  });
  GradCheckOptions opts;
  opts.epsilon = epsilon;
  return grad_check([&] { return loss_and_gradient(batch, params, config, nullptr); }, blocks, opts);
}

}  // namespace vague::testing
