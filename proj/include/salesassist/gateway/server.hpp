// Copyright 2026 The SalesAssist Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "salesassist/gateway/session.hpp"

namespace salesassist::gateway {

struct ServerOptions {
    std::string address = "0.0.0.0";
    std::uint16_t port = 8000;  // 0 picks an ephemeral port
    int io_threads = 2;
};

/// Body of GET /health; `ok` false maps to 503.
nlohmann::json health_body(const GatewayConfig& cfg, bool& ok);
/// Body of GET /config.
nlohmann::json config_body(const GatewayConfig& cfg);

/// HTTP + WebSocket front end: /ws, /health and /config on one port.
class Server {
public:
    Server(std::shared_ptr<const GatewayConfig> cfg, ServerOptions opts);
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    /// Binds and starts the io threads. Throws StorageError if the port is taken.
    void start();
    /// Closes the listener and every session, then joins all threads.
    void stop();
    /// Blocks until SIGINT, SIGTERM or request_stop(), then stops.
    void wait();
    /// Wakes wait(). Safe from any thread.
    void request_stop();

    std::uint16_t port() const;
    std::size_t active_sessions() const;

    struct Impl;

private:
    std::unique_ptr<Impl> impl_;
};

}  // namespace salesassist::gateway
