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

#include <Eigen/Dense>
#include "json.hpp"

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace genaug::metrics {

// ---- PSD square root ----

struct PsdSqrt {
    Eigen::MatrixXd root;
    /// True if eigenvalues in the tolerated negative band were clamped to zero.
    bool clamped{ false };
    /// Most negative eigenvalue seen before clamping (0 if none).
    double min_eigenvalue{ 0.0 };
};

/// Asymmetry and negative-eigenvalue tolerance. Both are scaled by
/// max(1, largest magnitude) so that unit-scale matrices use exactly 1e-8.
inline constexpr double psd_tolerance = 1e-8;

/// Principal square root of a symmetric positive semi-definite matrix via a
/// symmetric eigendecomposition. The input is symmetrized before use.
/// Throws NumericError for asymmetry beyond tolerance, a substantially
/// negative eigenvalue, or non-finite entries.
[[nodiscard]] PsdSqrt matrix_sqrt_psd(const Eigen::MatrixXd &m);

// ---- FID ----

/// One feature row per image, tagged with the extractor that produced it.
struct FeatureSet {
    Eigen::MatrixXd features;
    std::string extractor_id;

    [[nodiscard]] Eigen::Index count() const noexcept { return features.rows(); }
    [[nodiscard]] Eigen::Index dim() const noexcept { return features.cols(); }
};

struct FidReport {
    double score{ 0.0 };
    double mean_term{ 0.0 };
    double trace_term{ 0.0 };
    std::size_t n_real{ 0 };
    std::size_t n_generated{ 0 };
    std::string extractor_id;
    /// Set when a PSD clamp happened or a tiny negative score was zeroed.
    bool clamped{ false };
};

/// Row mean and unbiased (N-1) covariance.
[[nodiscard]] std::pair<Eigen::VectorXd, Eigen::MatrixXd> gaussian_fit(const Eigen::MatrixXd &rows);

/// Fréchet distance between Gaussian fits of two feature sets:
/// ||mu_x - mu_g||^2 + Tr(S_x + S_g - 2 (S_x S_g)^1/2), with the product root
/// taken through the symmetric form S_x^1/2 S_g S_x^1/2.
[[nodiscard]] FidReport fid(const FeatureSet &real, const FeatureSet &generated);

/// Same formula on already-fitted statistics.
[[nodiscard]] FidReport fid_from_stats(const Eigen::VectorXd &mu_x, const Eigen::MatrixXd &sigma_x, const Eigen::VectorXd &mu_g, const Eigen::MatrixXd &sigma_g);

[[nodiscard]] nlohmann::ordered_json to_json(const FidReport &report);
[[nodiscard]] FidReport fid_report_from_json(const nlohmann::json &j);

// ---- MAE ----

/// Mean absolute error over all elements; throws ShapeError on size mismatch.
[[nodiscard]] double mae(std::span<const float> x, std::span<const float> x_hat);
[[nodiscard]] double mae(std::span<const double> x, std::span<const double> x_hat);
[[nodiscard]] double mae(const Image &x, const Image &x_hat);

// ---- classification report ----

struct ClassMetrics {
    double precision{ 0.0 };
    double recall{ 0.0 };
    double f1{ 0.0 };
    std::size_t support{ 0 };
    /// No predicted positives, so precision was defined as 0.
    bool precision_zero_division{ false };
    /// No true instances, so recall was defined as 0.
    bool recall_zero_division{ false };
};

struct AverageMetrics {
    double precision{ 0.0 };
    double recall{ 0.0 };
    double f1{ 0.0 };
};

struct ClassificationReport {
    /// Class order is the order given to classification_report().
    std::vector<std::string> classes;
    std::map<std::string, ClassMetrics> per_class;
    /// Unweighted mean over classes.
    AverageMetrics macro_average;
    std::size_t total_support{ 0 };
    double accuracy{ 0.0 };
    /// confusion[truth][prediction], indices follow `classes`.
    std::vector<std::vector<std::size_t>> confusion;

    [[nodiscard]] const ClassMetrics &at(const std::string &label) const { return per_class.at(label); }
};

/// Per-class precision, recall, F1 and support from an explicit confusion matrix.
/// Throws InvalidArgument on unequal lengths or a label outside `classes`.
[[nodiscard]] ClassificationReport classification_report(std::span<const std::string> predictions, std::span<const std::string> truths, std::span<const std::string> classes);

[[nodiscard]] nlohmann::ordered_json to_json(const ClassificationReport &report);

/// Aligned text table: one row per class, an `avg/tot` row, two decimals.
/// `display_names` optionally renames rows (e.g. background -> empty).
[[nodiscard]] std::string render(const ClassificationReport &report, const std::map<std::string, std::string> &display_names = {});

/// Several reports side by side under column headers, as one block.
[[nodiscard]] std::string render_side_by_side(const std::string &title, const std::vector<std::string> &column_titles, const std::vector<ClassificationReport> &reports, const std::map<std::string, std::string> &display_names = {});

}  // namespace genaug::metrics
