// Copyright 2026 The SalesAssist Authors
// SPDX-License-Identifier: Apache-2.0

#include "salesassist/providers/http.hpp"

#include <httplib.h>

#include "salesassist/errors.hpp"

namespace salesassist::providers {

namespace {

class HttplibTransport final : public HttpTransport {
public:
    HttpResponse post(const HttpRequest& request) override {
        const auto scheme_end = request.url.find("://");
        if (scheme_end == std::string::npos) throw ContractViolation("URL needs a scheme: " + request.url);
        const auto path_start = request.url.find('/', scheme_end + 3);
        const std::string origin = request.url.substr(0, path_start);
        const std::string path = path_start == std::string::npos ? "/" : request.url.substr(path_start);

        httplib::Client client(origin);
        const auto secs = std::chrono::duration_cast<std::chrono::seconds>(request.timeout);
        const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(request.timeout - secs);
        client.set_connection_timeout(secs.count(), usecs.count());
        client.set_read_timeout(secs.count(), usecs.count());
        client.set_write_timeout(secs.count(), usecs.count());

        httplib::Headers headers;
        for (const auto& [k, v] : request.headers) headers.emplace(k, v);

        auto res = client.Post(path, headers, request.body, request.content_type);
        if (!res) {
            const auto err = res.error();
            if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read) {
                throw TimeoutError(origin + ": " + httplib::to_string(err));
            }
            throw ConnectivityError(origin + ": " + httplib::to_string(err));
        }
        return HttpResponse{res->status, res->body};
    }
};

}  // namespace

std::shared_ptr<HttpTransport> make_https_transport() {
    return std::make_shared<HttplibTransport>();
}

}  // namespace salesassist::providers
