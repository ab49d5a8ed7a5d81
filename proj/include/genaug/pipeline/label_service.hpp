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

#include "genaug/manifest.hpp"
#include "genaug/quality_filter.hpp"

#include <atomic>
#include <condition_variable>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <unordered_set>

namespace httplib {
class Server;
}

namespace genaug::pipeline {

struct LabelProgress {
    std::size_t labeled_good{ 0 };
    std::size_t labeled_bad{ 0 };
    std::size_t remaining{ 0 };
};

/// HTTP labeling endpoint over a pool of images.
///
///   GET  /batch?n=k      up to k unlabeled images: {items: [{image_id, image_url, png_base64}], remaining}
///   GET  /image/<id>     PNG bytes
///   POST /label          {image_id, verdict, annotator} -> {status: recorded | duplicate}
///   GET  /progress       {labeled_good, labeled_bad, remaining}
///
/// Unknown ids answer 404, malformed bodies or verdicts 400.
class LabelService {
  public:
    LabelService(Manifest pool, quality::LabelStore &store);
    ~LabelService();
    LabelService(const LabelService &) = delete;
    LabelService &operator=(const LabelService &) = delete;

    /// Binds (port 0 picks a free one), serves in the background and returns the port.
    int start(const std::string &host, int port);
    void stop();

    [[nodiscard]] LabelProgress progress() const;
    /// Blocks until every pool image carries a label or stop() is called.
    void wait_until_complete();

  private:
    void notify();

    Manifest pool_;
    quality::LabelStore &store_;
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
    mutable std::mutex mutex_;
    std::condition_variable changed_;
    bool stopping_{ false };
};

/// Labels every image of a running service through its HTTP API, fetching
/// PNG bytes per image and asking `judge` for the verdict.
/// Returns the number of POSTs answered "recorded".
std::size_t label_via_http(const std::string &host, int port, const std::string &annotator, const std::function<quality::Verdict(const std::string &image_id, const Image &image)> &judge, int batch_size = 32);

}  // namespace genaug::pipeline
