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

#include "genaug/metrics.hpp"

#include "genaug/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace genaug::metrics {

PsdSqrt matrix_sqrt_psd(const Eigen::MatrixXd &m) {
    if (m.rows() != m.cols()) {
        throw ShapeError{ fmt::format("matrix_sqrt_psd needs a square matrix, got {}x{}", m.rows(), m.cols()) };
    }
    if (!m.allFinite()) {
        throw NumericError{ "matrix_sqrt_psd: matrix has non-finite entries" };
    }
    PsdSqrt result;
    if (m.size() == 0) {
        result.root = m;
        return result;
    }
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    const double asymmetry = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (asymmetry > psd_tolerance * scale) {
        throw NumericError{ fmt::format("matrix_sqrt_psd: matrix is not symmetric (max |M - M^T| = {:.3e})", asymmetry) };
    }
    const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver{ sym };
    if (solver.info() != Eigen::Success) {
        throw NumericError{ "matrix_sqrt_psd: eigendecomposition did not converge" };
    }
    Eigen::VectorXd eigenvalues = solver.eigenvalues();
    const double spectral_scale = std::max(1.0, eigenvalues.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
        const double lambda = eigenvalues(i);
        if (lambda < 0.0) {
            if (lambda < -psd_tolerance * spectral_scale) {
                throw NumericError{ fmt::format("matrix_sqrt_psd: matrix is not PSD (eigenvalue {:.6e})", lambda) };
            }
            result.clamped = true;
            result.min_eigenvalue = std::min(result.min_eigenvalue, lambda);
            eigenvalues(i) = 0.0;
        }
    }
    const Eigen::MatrixXd &vectors = solver.eigenvectors();
    result.root = vectors * eigenvalues.cwiseSqrt().asDiagonal() * vectors.transpose();
    return result;
}

std::pair<Eigen::VectorXd, Eigen::MatrixXd> gaussian_fit(const Eigen::MatrixXd &rows) {
    if (rows.rows() < 2) {
        throw InvalidArgument{ fmt::format("a covariance estimate needs at least 2 samples, got {}", rows.rows()) };
    }
    const Eigen::VectorXd mean = rows.colwise().mean().transpose();
    const Eigen::MatrixXd centered = rows.rowwise() - mean.transpose();
    Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(rows.rows() - 1);
    return { mean, cov };
}

FidReport fid_from_stats(const Eigen::VectorXd &mu_x, const Eigen::MatrixXd &sigma_x, const Eigen::VectorXd &mu_g, const Eigen::MatrixXd &sigma_g) {
    if (mu_x.size() != mu_g.size() || sigma_x.rows() != mu_x.size() || sigma_g.rows() != mu_g.size()) {
        throw ShapeError{ fmt::format("fid: feature dimensions differ ({} vs {})", mu_x.size(), mu_g.size()) };
    }
    FidReport report;
    report.mean_term = (mu_x - mu_g).squaredNorm();

    const PsdSqrt sigma_x_root = matrix_sqrt_psd(sigma_x);
    Eigen::MatrixXd inner = sigma_x_root.root * sigma_g * sigma_x_root.root;
    inner = 0.5 * (inner + inner.transpose());
    const PsdSqrt cross = matrix_sqrt_psd(inner);
    report.clamped = sigma_x_root.clamped || cross.clamped;

    report.trace_term = sigma_x.trace() + sigma_g.trace() - 2.0 * cross.root.trace();
    report.score = report.mean_term + report.trace_term;
    if (report.score < 0.0) {
        const double tolerance = 1e-9 * std::max(1.0, sigma_x.trace() + sigma_g.trace());
        if (report.score < -tolerance) {
            throw NumericError{ fmt::format("fid: score {:.6e} is negative beyond rounding", report.score) };
        }
        report.score = 0.0;
        report.trace_term = -report.mean_term;
        report.clamped = true;
    }
    return report;
}

FidReport fid(const FeatureSet &real, const FeatureSet &generated) {
    if (real.extractor_id != generated.extractor_id) {
        throw InvalidArgument{ "fid: feature sets come from different extractors ('" + real.extractor_id + "' vs '" + generated.extractor_id + "')" };
    }
    if (real.dim() != generated.dim()) {
        throw ShapeError{ fmt::format("fid: feature dimensions differ ({} vs {})", real.dim(), generated.dim()) };
    }
    if (!real.features.allFinite() || !generated.features.allFinite()) {
        throw NumericError{ "fid: feature sets contain non-finite values" };
    }
    const auto [mu_x, sigma_x] = gaussian_fit(real.features);
    const auto [mu_g, sigma_g] = gaussian_fit(generated.features);
    FidReport report = fid_from_stats(mu_x, sigma_x, mu_g, sigma_g);
    report.n_real = static_cast<std::size_t>(real.count());
    report.n_generated = static_cast<std::size_t>(generated.count());
    report.extractor_id = real.extractor_id;
    return report;
}

nlohmann::ordered_json to_json(const FidReport &report) {
    nlohmann::ordered_json j;
    j["score"] = report.score;
    j["mean_term"] = report.mean_term;
    j["trace_term"] = report.trace_term;
    j["n_real"] = report.n_real;
    j["n_generated"] = report.n_generated;
    j["extractor_id"] = report.extractor_id;
    j["clamped"] = report.clamped;
    return j;
}

FidReport fid_report_from_json(const nlohmann::json &j) {
    FidReport r;
    r.score = j.at("score").get<double>();
    r.mean_term = j.at("mean_term").get<double>();
    r.trace_term = j.at("trace_term").get<double>();
    r.n_real = j.at("n_real").get<std::size_t>();
    r.n_generated = j.at("n_generated").get<std::size_t>();
    r.extractor_id = j.at("extractor_id").get<std::string>();
    r.clamped = j.at("clamped").get<bool>();
    return r;
}

namespace {

template <typename T>
double mae_impl(std::span<const T> x, std::span<const T> x_hat) {
    if (x.size() != x_hat.size()) {
        throw ShapeError{ fmt::format("mae: sizes differ ({} vs {})", x.size(), x_hat.size()) };
    }
    if (x.empty()) {
        throw InvalidArgument{ "mae: empty input" };
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sum += std::abs(static_cast<double>(x[i]) - static_cast<double>(x_hat[i]));
    }
    return sum / static_cast<double>(x.size());
}

}  // namespace

double mae(std::span<const float> x, std::span<const float> x_hat) { return mae_impl(x, x_hat); }
double mae(std::span<const double> x, std::span<const double> x_hat) { return mae_impl(x, x_hat); }

double mae(const Image &x, const Image &x_hat) {
    if (x.height() != x_hat.height() || x.width() != x_hat.width()) {
        throw ShapeError{ fmt::format("mae: image shapes differ ({}x{} vs {}x{})", x.height(), x.width(), x_hat.height(), x_hat.width()) };
    }
    return mae(x.values(), x_hat.values());
}

ClassificationReport classification_report(std::span<const std::string> predictions, std::span<const std::string> truths, std::span<const std::string> classes) {
    if (predictions.size() != truths.size()) {
        throw InvalidArgument{ fmt::format("classification_report: {} predictions but {} truths", predictions.size(), truths.size()) };
    }
    if (classes.empty()) {
        throw InvalidArgument{ "classification_report: empty class set" };
    }
    ClassificationReport report;
    report.classes.assign(classes.begin(), classes.end());
    const std::size_t k = classes.size();
    const auto index_of = [&](const std::string &label) {
        const auto it = std::find(classes.begin(), classes.end(), label);
        if (it == classes.end()) {
            throw InvalidArgument{ "classification_report: unknown label '" + label + "'" };
        }
        return static_cast<std::size_t>(std::distance(classes.begin(), it));
    };

    report.confusion.assign(k, std::vector<std::size_t>(k, 0));
    std::size_t correct = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const std::size_t t = index_of(truths[i]);
        const std::size_t p = index_of(predictions[i]);
        ++report.confusion[t][p];
        correct += t == p ? 1 : 0;
    }

    for (std::size_t c = 0; c < k; ++c) {
        std::size_t tp = report.confusion[c][c];
        std::size_t predicted = 0;
        std::size_t actual = 0;
        for (std::size_t o = 0; o < k; ++o) {
            predicted += report.confusion[o][c];
            actual += report.confusion[c][o];
        }
        ClassMetrics m;
        m.support = actual;
        m.precision_zero_division = predicted == 0;
        m.recall_zero_division = actual == 0;
        m.precision = predicted == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(predicted);
        m.recall = actual == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(actual);
        m.f1 = m.precision + m.recall > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
        report.per_class[classes[c]] = m;
        report.macro_average.precision += m.precision;
        report.macro_average.recall += m.recall;
        report.macro_average.f1 += m.f1;
        report.total_support += actual;
    }
    report.macro_average.precision /= static_cast<double>(k);
    report.macro_average.recall /= static_cast<double>(k);
    report.macro_average.f1 /= static_cast<double>(k);
    report.accuracy = predictions.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(predictions.size());
    return report;
}

nlohmann::ordered_json to_json(const ClassificationReport &report) {
    nlohmann::ordered_json j;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto &label : report.classes) {
        const auto &m = report.per_class.at(label);
        nlohmann::ordered_json row;
        row["class"] = label;
        row["precision"] = m.precision;
        row["recall"] = m.recall;
        row["f1"] = m.f1;
        row["support"] = m.support;
        row["precision_zero_division"] = m.precision_zero_division;
        rows.push_back(std::move(row));
    }
    j["per_class"] = std::move(rows);
    j["macro_average"] = { { "precision", report.macro_average.precision }, { "recall", report.macro_average.recall }, { "f1", report.macro_average.f1 } };
    j["total_support"] = report.total_support;
    j["accuracy"] = report.accuracy;
    j["confusion"] = report.confusion;
    return j;
}

namespace {

std::string display(const std::string &label, const std::map<std::string, std::string> &names) {
    const auto it = names.find(label);
    return it == names.end() ? label : it->second;
}

constexpr int label_width = 9;

std::string cells(const double p, const double r, const double f, const std::size_t support) {
    return fmt::format("{:>10.2f}{:>8.2f}{:>10.2f}{:>9}", p, r, f, support);
}

std::string cell_header() { return fmt::format("{:>10}{:>8}{:>10}{:>9}", "Precision", "Recall", "F1 score", "Support"); }

constexpr int cell_width = 37;

}  // namespace

std::string render(const ClassificationReport &report, const std::map<std::string, std::string> &display_names) {
    return render_side_by_side("", { "" }, { report }, display_names);
}

std::string render_side_by_side(const std::string &title, const std::vector<std::string> &column_titles, const std::vector<ClassificationReport> &reports, const std::map<std::string, std::string> &display_names) {
    if (reports.empty() || column_titles.size() != reports.size()) {
        throw InvalidArgument{ "render_side_by_side: need one title per report" };
    }
    for (const auto &r : reports) {
        if (r.classes != reports.front().classes) {
            throw InvalidArgument{ "render_side_by_side: reports cover different classes" };
        }
    }
    std::ostringstream out;
    const auto width = static_cast<std::size_t>(label_width + cell_width * static_cast<int>(reports.size()) + 3 * static_cast<int>(reports.size()));
    if (!title.empty()) {
        const std::size_t pad = title.size() < width ? (width - title.size()) / 2 : 0;
        out << std::string(pad, ' ') << title << '\n';
    }
    const bool titled = std::any_of(column_titles.begin(), column_titles.end(), [](const auto &t) { return !t.empty(); });
    if (titled) {
        out << fmt::format("{:<{}}", "", label_width);
        for (const auto &t : column_titles) {
            out << " | " << fmt::format("{:^{}}", t, cell_width);
        }
        out << '\n';
    }
    out << fmt::format("{:<{}}", "", label_width);
    for (std::size_t i = 0; i < reports.size(); ++i) {
        out << " | " << cell_header();
    }
    out << '\n' << std::string(width, '-') << '\n';
    for (const auto &label : reports.front().classes) {
        out << fmt::format("{:<{}}", display(label, display_names), label_width);
        for (const auto &r : reports) {
            const auto &m = r.per_class.at(label);
            out << " | " << cells(m.precision, m.recall, m.f1, m.support);
        }
        out << '\n';
    }
    out << std::string(width, '=') << '\n';
    out << fmt::format("{:<{}}", "avg/tot", label_width);
    for (const auto &r : reports) {
        out << " | " << cells(r.macro_average.precision, r.macro_average.recall, r.macro_average.f1, r.total_support);
    }
    out << '\n';
    return out.str();
}

}  // namespace genaug::metrics
