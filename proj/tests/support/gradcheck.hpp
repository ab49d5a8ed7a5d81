// Copyright 2026 The genaug Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "genaug/vae.hpp"

#include <torch/torch.h>

#include <algorithm>
#include <cmath>
#include <string>

namespace genaug::testing {

struct GradcheckResult {
    std::size_t parameters{ 0 };
    std::size_t elements{ 0 };
    double max_relative_error{ 0.0 };
    std::string worst;
    double worst_analytic{ 0.0 };
    double worst_numeric{ 0.0 };
};

/// Compares autograd ELBO gradients of a miniature stage-1 VAE against central
/// finite differences in float64. The relative error of one element is
/// |analytic - numeric| / max(|analytic|, |numeric|, floor).
inline GradcheckResult elbo_gradcheck(const int input_size, const int latent_dim, const std::uint64_t seed, const double step = 1e-6, const double floor = 1e-4) {
    vae::VaeStageConfig cfg;
    cfg.stage = 1;
    cfg.input_size = input_size;
    cfg.latent_dim = latent_dim;
    cfg.base_dim = 4;
    cfg.kernel_size = 3;
    cfg.blocks_per_level = 1;
    cfg.seed = seed;
    cfg.gamma_init = 0.7;

    auto net = vae::make_network(cfg);
    net->to(torch::kFloat64);
    torch::manual_seed(seed + 1);
    const auto x = torch::rand({ 2, 3, input_size, input_size }, torch::kFloat64);
    const auto noise = torch::randn({ 2, latent_dim }, torch::kFloat64);

    const auto loss = [&] { return net->forward_loss(x, noise).total; };

    for (auto &p : net->parameters()) {
        p.mutable_grad() = torch::Tensor{};
    }
    loss().backward();

    GradcheckResult result;
    const torch::NoGradGuard no_grad;
    for (const auto &item : net->named_parameters()) {
        auto param = item.value();
        const auto analytic = param.grad().defined() ? param.grad().clone() : torch::zeros_like(param);
        auto flat = param.view({ -1 });
        const auto grad_flat = analytic.view({ -1 });
        ++result.parameters;
        for (std::int64_t i = 0; i < flat.numel(); ++i) {
            const double original = flat[i].item<double>();
            flat[i] = original + step;
            const double up = loss().item<double>();
            flat[i] = original - step;
            const double down = loss().item<double>();
            flat[i] = original;
            const double numeric = (up - down) / (2.0 * step);
            const double a = grad_flat[i].item<double>();
            const double rel = std::abs(a - numeric) / std::max({ std::abs(a), std::abs(numeric), floor });
            ++result.elements;
            if (rel > result.max_relative_error) {
                result.max_relative_error = rel;
                result.worst = item.key() + "[" + std::to_string(i) + "]";
                result.worst_analytic = a;
                result.worst_numeric = numeric;
            }
        }
    }
    return result;
}

}  // namespace genaug::testing
