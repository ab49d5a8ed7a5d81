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

#include "genaug/tensor_io.hpp"

#include "genaug/error.hpp"

namespace genaug {

torch::Tensor to_tensor(const Image &img) {
    auto hwc = torch::empty({ img.height(), img.width(), Image::channels }, torch::kFloat32);
    std::copy(img.values().begin(), img.values().end(), hwc.data_ptr<float>());
    return hwc.permute({ 2, 0, 1 }).contiguous();
}

torch::Tensor stack_images(const std::vector<Image> &images) {
    if (images.empty()) {
        throw InvalidArgument{ "stack_images: no images" };
    }
    std::vector<torch::Tensor> parts;
    parts.reserve(images.size());
    for (const auto &img : images) {
        if (img.height() != images.front().height() || img.width() != images.front().width()) {
            throw ShapeError{ "stack_images: images differ in size" };
        }
        parts.push_back(to_tensor(img));
    }
    return torch::stack(parts);
}

Image to_image(const torch::Tensor &chw) {
    if (chw.dim() != 3 || chw.size(0) != Image::channels) {
        throw ShapeError{ "to_image expects a [3, H, W] tensor, got " + c10::str(chw.sizes()) };
    }
    const auto hwc = torch::nan_to_num(chw.detach().to(torch::kFloat32), 0.0).clamp(0.0, 1.0).permute({ 1, 2, 0 }).contiguous();
    const auto *begin = hwc.data_ptr<float>();
    return Image{ static_cast<int>(chw.size(1)), static_cast<int>(chw.size(2)), std::vector<float>(begin, begin + hwc.numel()) };
}

std::vector<Image> to_images(const torch::Tensor &nchw) {
    std::vector<Image> images;
    images.reserve(static_cast<std::size_t>(nchw.size(0)));
    for (std::int64_t i = 0; i < nchw.size(0); ++i) {
        images.push_back(to_image(nchw[i]));
    }
    return images;
}

std::vector<Image> load_images(const Manifest &manifest, const int size) {
    std::vector<Image> images;
    images.reserve(manifest.size());
    for (const auto &entry : manifest.entries()) {
        images.push_back(resize_bilinear(manifest.load(entry), size, size));
    }
    return images;
}

torch::Tensor load_tensor(const Manifest &manifest, const int size) {
    if (manifest.empty()) {
        throw InvalidArgument{ "load_tensor: empty manifest" };
    }
    auto out = torch::empty({ static_cast<std::int64_t>(manifest.size()), Image::channels, size, size }, torch::kFloat32);
    for (std::size_t i = 0; i < manifest.size(); ++i) {
        out[static_cast<std::int64_t>(i)].copy_(to_tensor(resize_bilinear(manifest.load(i), size, size)));
    }
    return out;
}

}  // namespace genaug
