// Copyright 2026 The SalesAssist Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>

#include "salesassist/gateway/protocol.hpp"

namespace salesassist::gateway {

struct Frame {
    bool binary = false;
    std::string data;
};

/// Headless WebSocket client for tests, the bench and the Python module.
/// Frames are read on a background thread and queued.
class WsClient {
public:
    WsClient();
    ~WsClient();
    WsClient(const WsClient&) = delete;
    WsClient& operator=(const WsClient&) = delete;

    /// Throws ConnectivityError if the handshake fails.
    void connect(const std::string& host, std::uint16_t port, const std::string& target = "/ws");

    void send_text(std::string frame);
    void send(const WsMessage& m);
    void send_binary(std::span<const std::uint8_t> chunk);

    /// Next inbound frame, or nullopt on timeout or after the peer closed
    /// and the queue is drained.
    std::optional<Frame> next_frame(std::chrono::milliseconds timeout);
    /// Next text frame parsed as a message; throws ValidationError on a
    /// malformed frame.
    std::optional<WsMessage> next_message(std::chrono::milliseconds timeout);

    /// Closes the connection. Idempotent.
    void close();
    bool is_open() const;

    struct Impl;

private:
    std::shared_ptr<Impl> impl_;
};

}  // namespace salesassist::gateway
