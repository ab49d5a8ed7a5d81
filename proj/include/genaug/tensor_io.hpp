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

#include "genaug/image.hpp"
#include "genaug/manifest.hpp"

#include <torch/torch.h>

#include <cstddef>
#include <vector>

namespace genaug {

/// [3, H, W] float32 view of an image.
[[nodiscard]] torch::Tensor to_tensor(const Image &img);

/// [N, 3, H, W] float32.
[[nodiscard]] torch::Tensor stack_images(const std::vector<Image> &images);

/// From a [3, H, W] tensor; values are clamped into [0, 1].
[[nodiscard]] Image to_image(const torch::Tensor &chw);

/// Splits an [N, 3, H, W] tensor into images.
[[nodiscard]] std::vector<Image> to_images(const torch::Tensor &nchw);

/// Loads every entry of `manifest`, resized to size×size, as [N, 3, size, size].
[[nodiscard]] torch::Tensor load_tensor(const Manifest &manifest, int size);

/// Loads every entry of `manifest`, resized to size×size.
[[nodiscard]] std::vector<Image> load_images(const Manifest &manifest, int size);

}  // namespace genaug
