// Copyright 2026 The SalesAssist Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace salesassist::providers {

struct HttpRequest {
    std::string url;  // absolute https:// URL
    std::vector<std::pair<std::string, std::string>> headers;
    std::string body;
    std::string content_type = "application/json";
    std::chrono::milliseconds timeout{15000};
};

struct HttpResponse {
    int status = 0;
    std::string body;
};

/// POST-only transport behind the live adapters. Throws ConnectivityError
/// on network failure and TimeoutError when the deadline passes.
class HttpTransport {
public:
    virtual ~HttpTransport() = default;
    virtual HttpResponse post(const HttpRequest& request) = 0;
};

std::shared_ptr<HttpTransport> make_https_transport();

}  // namespace salesassist::providers
