// Copyright 2026 The SalesAssist Authors
// SPDX-License-Identifier: Apache-2.0

#include "salesassist/gateway/client.hpp"

#include <condition_variable>
#include <deque>
#include <mutex>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "salesassist/errors.hpp"

namespace salesassist::gateway {

namespace beast = boost::beast;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

struct WsClient::Impl : std::enable_shared_from_this<WsClient::Impl> {
    net::io_context ioc;
    std::optional<websocket::stream<beast::tcp_stream>> ws;
    std::thread io;
    beast::flat_buffer buffer;
    std::deque<Frame> outbound;  // io thread only
    bool writing = false;

    mutable std::mutex mu;
    std::condition_variable cv;
    std::deque<Frame> inbound;
    bool open = false;

    void do_read() {
        ws->async_read(buffer, [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) {
                self->mark_closed();
                return;
            }
            const auto data = self->buffer.cdata();
            Frame f{!self->ws->got_text(), std::string(static_cast<const char*>(data.data()), data.size())};
            self->buffer.consume(self->buffer.size());
            {
                std::lock_guard lock(self->mu);
                self->inbound.push_back(std::move(f));
            }
            self->cv.notify_all();
            self->do_read();
        });
    }

    void enqueue(Frame f) {
        net::post(ioc, [self = shared_from_this(), f = std::move(f)]() mutable {
            if (!self->is_open()) return;
            self->outbound.push_back(std::move(f));
            if (!self->writing) self->do_write();
        });
    }

    void do_write() {
        writing = true;
        ws->binary(outbound.front().binary);
        ws->async_write(net::buffer(outbound.front().data), [self = shared_from_this()](beast::error_code ec, std::size_t) {
            self->writing = false;
            if (ec) {
                self->mark_closed();
                return;
            }
            self->outbound.pop_front();
            if (!self->outbound.empty()) self->do_write();
        });
    }

    void mark_closed() {
        {
            std::lock_guard lock(mu);
            open = false;
        }
        cv.notify_all();
    }

    bool is_open() const {
        std::lock_guard lock(mu);
        return open;
    }
};

WsClient::WsClient() : impl_(std::make_shared<Impl>()) {}

WsClient::~WsClient() { close(); }

void WsClient::connect(const std::string& host, std::uint16_t port, const std::string& target) {
    auto& s = *impl_;
    if (s.ws) throw ContractViolation("client is already connected");
    try {
        tcp::resolver resolver(s.ioc);
        const auto results = resolver.resolve(host, std::to_string(port));
        s.ws.emplace(s.ioc);
        beast::get_lowest_layer(*s.ws).expires_after(std::chrono::seconds(10));
        beast::get_lowest_layer(*s.ws).connect(results);
        beast::get_lowest_layer(*s.ws).expires_never();
        s.ws->set_option(websocket::stream_base::timeout::suggested(beast::role_type::client));
        s.ws->read_message_max(16 * 1024 * 1024);
        s.ws->handshake(host + ":" + std::to_string(port), target);
    } catch (const beast::system_error& e) {
        s.ws.reset();
        throw ConnectivityError("websocket connect to " + host + ":" + std::to_string(port) + " failed: " + e.what());
    }
    {
        std::lock_guard lock(s.mu);
        s.open = true;
    }
    s.do_read();
    s.io = std::thread([impl = impl_] { impl->ioc.run(); });
}

void WsClient::send_text(std::string frame) {
    if (!is_open()) throw ClosedSessionError("websocket is closed");
    impl_->enqueue(Frame{false, std::move(frame)});
}

void WsClient::send(const WsMessage& m) { send_text(serialize(m)); }

void WsClient::send_binary(std::span<const std::uint8_t> chunk) {
    if (!is_open()) throw ClosedSessionError("websocket is closed");
    impl_->enqueue(Frame{true, std::string(reinterpret_cast<const char*>(chunk.data()), chunk.size())});
}

std::optional<Frame> WsClient::next_frame(std::chrono::milliseconds timeout) {
    auto& s = *impl_;
    std::unique_lock lock(s.mu);
    s.cv.wait_for(lock, timeout, [&s] { return !s.inbound.empty() || !s.open; });
    if (s.inbound.empty()) return std::nullopt;
    Frame f = std::move(s.inbound.front());
    s.inbound.pop_front();
    return f;
}

std::optional<WsMessage> WsClient::next_message(std::chrono::milliseconds timeout) {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    for (;;) {
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        auto f = next_frame(std::max(left, std::chrono::milliseconds(0)));
        if (!f) return std::nullopt;
        if (f->binary) continue;
        auto parsed = parse(f->data);
        if (auto* err = std::get_if<ProtocolError>(&parsed)) {
            throw ValidationError("malformed server frame (" + err->field + "): " + err->message);
        }
        return std::get<WsMessage>(std::move(parsed));
    }
}

void WsClient::close() {
    auto& s = *impl_;
    if (!s.ws) return;
    if (s.io.joinable()) {
        net::post(s.ioc, [impl = impl_] {
            if (!impl->is_open()) {
                impl->ioc.stop();
                return;
            }
            impl->ws->async_close(websocket::close_code::normal, [impl](beast::error_code) {
                impl->mark_closed();
                impl->ioc.stop();
            });
        });
        // the peer may never answer the close frame
        {
            std::unique_lock lock(s.mu);
            s.cv.wait_for(lock, std::chrono::seconds(2), [&s] { return !s.open; });
        }
        s.ioc.stop();
        s.io.join();
        // flush aborted handlers so they release their references to impl_
        beast::error_code ec;
        beast::get_lowest_layer(*s.ws).socket().close(ec);
        s.ioc.restart();
        s.ioc.poll();
    }
    s.mark_closed();
}

bool WsClient::is_open() const { return impl_->is_open(); }

}  // namespace salesassist::gateway
