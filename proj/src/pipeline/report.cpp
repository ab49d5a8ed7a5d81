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

#include "genaug/pipeline/report.hpp"

#include "genaug/pipeline/workspace.hpp"

#include <fmt/format.h>

namespace genaug::pipeline {

namespace {

std::string row_title(const ClassLabel label) { return label == ClassLabel::bottle ? "Bottle" : "Bag"; }

}  // namespace

std::string render_fid_table(const ReportInputs &inputs) {
    std::string out = fmt::format("{:<8} | {:>10} | {:>10} | {:>14}\n", "", "Stage 1", "Stage 2", "Reconstruction");
    out += std::string(52, '-') + "\n";
    for (const auto label : inputs.trash_classes) {
        const auto &f = inputs.fid.at(label);
        out += fmt::format("{:<8} | {:>10.2f} | {:>10.2f} | {:>14.2f}\n", row_title(label), f.at("stage1").at("score").get<double>(), f.at("stage2").at("score").get<double>(), f.at("reconstruction").at("score").get<double>());
    }
    return out;
}

std::string render_filter_table(const ReportInputs &inputs) {
    std::string out = fmt::format("{:<8} | {:>13} | {:>15} | {:>9}\n", "", "Training Acc.", "Validation Acc.", "Test Acc.");
    out += std::string(55, '-') + "\n";
    for (const auto label : inputs.trash_classes) {
        const auto &s = inputs.filter_stats.at(label);
        out += fmt::format("{:<8} | {:>13.2f} | {:>15.2f} | {:>9.2f}\n", row_title(label), s.at("train_acc").get<double>(), s.at("val_acc").get<double>(), s.at("test_acc").get<double>());
    }
    return out;
}

void write_report_bundle(const ReportInputs &inputs, const std::filesystem::path &dir) {
    const auto write = [&](const std::string &name, const std::string &text) { write_text_atomic(dir / name, text); };

    nlohmann::ordered_json fid = nlohmann::ordered_json::object();
    nlohmann::ordered_json filter = nlohmann::ordered_json::object();
    nlohmann::ordered_json comparisons = nlohmann::ordered_json::object();
    std::string table3;
    for (const auto label : inputs.trash_classes) {
        const std::string name{ to_string(label) };
        fid[name] = inputs.fid.at(label);
        filter[name] = { { "accuracy", inputs.filter_stats.at(label) }, { "pool", inputs.filter_counts.at(label) } };
        comparisons[name] = inputs.comparisons.at(label);
        table3 += inputs.comparison_text.at(label) + "\n";
    }

    auto config = inputs.config.to_json();
    config.erase("workspace_dir");
    config["labeling"].erase("host");
    config["labeling"].erase("port");

    write("table1_fid.txt", render_fid_table(inputs));
    write("table1_fid.json", fid.dump(2) + "\n");
    write("table2_filter.txt", render_filter_table(inputs));
    write("table2_filter.json", filter.dump(2) + "\n");
    write("table3_comparison.txt", table3);
    write("table3_comparison.json", comparisons.dump(2) + "\n");
    write("config.json", config.dump(2) + "\n");

    std::string summary = "FID (lower is better)\n\n" + render_fid_table(inputs) + "\nQuality filter accuracy\n\n" + render_filter_table(inputs) + "\nGenerated images passing the filter\n\n";
    for (const auto label : inputs.trash_classes) {
        const auto &c = inputs.filter_counts.at(label);
        summary += fmt::format("{:<8} {} of {}\n", row_title(label), c.at("accepted").get<std::size_t>(), c.at("pool").get<std::size_t>());
    }
    summary += "\nObject classification\n\n" + table3;
    write("report.txt", summary);

    nlohmann::ordered_json names = nlohmann::ordered_json::array();
    for (const auto label : inputs.trash_classes) {
        names.push_back(to_string(label));
    }
    const nlohmann::ordered_json index{ { "files", { "report.txt", "table1_fid.txt", "table1_fid.json", "table2_filter.txt", "table2_filter.json", "table3_comparison.txt", "table3_comparison.json", "config.json" } }, { "trash_classes", names } };
    write("bundle.json", index.dump(2) + "\n");
}

}  // namespace genaug::pipeline
