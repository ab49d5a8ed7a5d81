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

#include "genaug/pipeline/label_service.hpp"

#include "genaug/error.hpp"

#include "httplib.h"
#include "json.hpp"

#include <chrono>

namespace genaug::pipeline {

namespace {

std::int64_t now_ms() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::system_clock::now().time_since_epoch()).count();
}

void reply_json(httplib::Response &res, const int status, const nlohmann::ordered_json &body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response &res, const int status, const std::string &message) {
    reply_json(res, status, { { "error", message } });
}

}  // namespace

LabelService::LabelService(Manifest pool, quality::LabelStore &store) :
    pool_{ std::move(pool) },
    store_{ store },
    server_{ std::make_unique<httplib::Server>() } {
    if (pool_.empty()) {
        throw InvalidArgument{ "label service needs a nonempty pool" };
    }
    auto &srv = *server_;
    srv.set_default_headers({ { "Access-Control-Allow-Origin", "*" }, { "Access-Control-Allow-Headers", "Content-Type" } });
    srv.Options(R"(/.*)", [](const httplib::Request &, httplib::Response &res) { res.status = 204; });

    srv.Get("/progress", [this](const httplib::Request &, httplib::Response &res) {
        const auto p = progress();
        reply_json(res, 200, { { "labeled_good", p.labeled_good }, { "labeled_bad", p.labeled_bad }, { "remaining", p.remaining } });
    });

    srv.Get("/batch", [this](const httplib::Request &req, httplib::Response &res) {
        std::size_t n = 20;
        if (req.has_param("n")) {
            try {
                const long long v = std::stoll(req.get_param_value("n"));
                if (v < 0) {
                    throw std::invalid_argument{ "negative" };
                }
                n = static_cast<std::size_t>(v);
            } catch (const std::exception &) {
                reply_error(res, 400, "n must be a non-negative integer");
                return;
            }
        }
        const auto resolved = store_.resolved();
        nlohmann::ordered_json items = nlohmann::ordered_json::array();
        std::size_t remaining = 0;
        for (const auto &entry : pool_.entries()) {
            if (resolved.contains(entry.image_id)) {
                continue;
            }
            ++remaining;
            if (items.size() < n) {
                const auto png = encode_png(pool_.load(entry));
                items.push_back({ { "image_id", entry.image_id }, { "image_url", "/image/" + entry.image_id }, { "png_base64", httplib::detail::base64_encode(std::string(png.begin(), png.end())) } });
            }
        }
        reply_json(res, 200, { { "items", items }, { "remaining", remaining } });
    });

    srv.Get(R"(/image/([^/]+))", [this](const httplib::Request &req, httplib::Response &res) {
        const auto index = pool_.find(req.matches[1].str());
        if (!index) {
            reply_error(res, 404, "unknown image_id");
            return;
        }
        const auto png = encode_png(pool_.load(*index));
        res.set_content(std::string(png.begin(), png.end()), "image/png");
    });

    srv.Post("/label", [this](const httplib::Request &req, httplib::Response &res) {
        quality::LabelRecord record;
        try {
            const auto body = nlohmann::json::parse(req.body);
            record.image_id = body.at("image_id").get<std::string>();
            record.annotator = body.at("annotator").get<std::string>();
            record.verdict = quality::parse_verdict(body.at("verdict").get<std::string>());
        } catch (const std::exception &e) {
            reply_error(res, 400, std::string{ "malformed label: " } + e.what());
            return;
        }
        if (record.annotator.empty()) {
            reply_error(res, 400, "annotator must not be empty");
            return;
        }
        if (!pool_.contains(record.image_id)) {
            reply_error(res, 404, "unknown image_id '" + record.image_id + "'");
            return;
        }
        record.labeled_at = now_ms();
        const auto result = store_.append(record);
        notify();
        reply_json(res, 200, { { "status", result == quality::LabelStore::AppendResult::recorded ? "recorded" : "duplicate" } });
    });
}

LabelService::~LabelService() { stop(); }

int LabelService::start(const std::string &host, const int port) {
    int bound = port;
    if (port == 0) {
        bound = server_->bind_to_any_port(host);
    } else if (!server_->bind_to_port(host, port)) {
        bound = -1;
    }
    if (bound < 0) {
        throw IoError{ "label service cannot bind " + host + ":" + std::to_string(port) };
    }
    thread_ = std::thread{ [this] { server_->listen_after_bind(); } };
    server_->wait_until_ready();
    return bound;
}

void LabelService::stop() {
    {
        const std::lock_guard lock{ mutex_ };
        stopping_ = true;
    }
    changed_.notify_all();
    if (server_) {
        server_->stop();
    }
    if (thread_.joinable()) {
        thread_.join();
    }
}

LabelProgress LabelService::progress() const {
    const auto resolved = store_.resolved();
    LabelProgress p;
    for (const auto &entry : pool_.entries()) {
        const auto it = resolved.find(entry.image_id);
        if (it == resolved.end()) {
            ++p.remaining;
        } else {
            (it->second == quality::Verdict::good ? p.labeled_good : p.labeled_bad) += 1;
        }
    }
    return p;
}

void LabelService::notify() {
    {
        const std::lock_guard lock{ mutex_ };
    }
    changed_.notify_all();
}

void LabelService::wait_until_complete() {
    std::unique_lock lock{ mutex_ };
    changed_.wait(lock, [this] { return stopping_ || progress().remaining == 0; });
}

std::size_t label_via_http(const std::string &host, const int port, const std::string &annotator, const std::function<quality::Verdict(const std::string &, const Image &)> &judge, const int batch_size) {
    httplib::Client client{ host, port };
    client.set_read_timeout(60);
    std::size_t recorded = 0;
    for (;;) {
        const auto batch = client.Get("/batch?n=" + std::to_string(batch_size));
        if (!batch || batch->status != 200) {
            throw IoError{ "label service did not answer GET /batch" };
        }
        const auto body = nlohmann::json::parse(batch->body);
        if (body.at("items").empty()) {
            return recorded;
        }
        for (const auto &item : body.at("items")) {
            const auto id = item.at("image_id").get<std::string>();
            const auto png = client.Get(item.at("image_url").get<std::string>());
            if (!png || png->status != 200) {
                throw IoError{ "label service did not serve image " + id };
            }
            const Image img = decode_image(std::span{ reinterpret_cast<const std::uint8_t *>(png->body.data()), png->body.size() });
            const nlohmann::json label{ { "image_id", id }, { "verdict", quality::to_string(judge(id, img)) }, { "annotator", annotator } };
            const auto posted = client.Post("/label", label.dump(), "application/json");
            if (!posted || posted->status != 200) {
                throw IoError{ "label service rejected the label for " + id };
            }
            if (nlohmann::json::parse(posted->body).at("status") == "recorded") {
                ++recorded;
            }
        }
    }
}

}  // namespace genaug::pipeline
