// Copyright 2026 The SalesAssist Authors
// SPDX-License-Identifier: Apache-2.0

#include "salesassist/gateway/server.hpp"

#include <atomic>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <map>
#include <thread>
#include <vector>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <fmt/core.h>

#include "salesassist/demo/demo.hpp"
#include "salesassist/errors.hpp"

namespace salesassist::gateway {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

nlohmann::json health_body(const GatewayConfig& cfg, bool& ok) {
    ok = false;
    if (!cfg.kb) {
        return {{"status", "unavailable"}, {"error", cfg.kb_error.empty() ? "knowledge base not configured" : cfg.kb_error}};
    }
    try {
        nlohmann::json stats = cfg.kb->stats();
        ok = true;
        return {{"status", "ok"}, {"kb", std::move(stats)}};
    } catch (const Error& e) {
        return {{"status", "unavailable"}, {"error", e.what()}};
    }
}

nlohmann::json config_body(const GatewayConfig& cfg) {
    auto j = providers::public_view(cfg.providers);
    const bool has_stt = cfg.providers.stt_provider == providers::SttProvider::deepgram || !cfg.providers.stt_script.empty();
    j["ws_path"] = "/ws";
    j["default_mode"] = to_string(has_stt ? SessionMode::live : SessionMode::text_only);
    j["tts_enabled"] = cfg.providers.tts_provider != providers::TtsProvider::disabled;
    j["audio_format"] = {{"encoding", "linear16"}, {"sample_rate", 16000}, {"channels", 1}};
    std::size_t dynamic = 0;
    for (const auto& t : cfg.demo_script) dynamic += t.dynamic ? 1 : 0;
    j["demo"] = {{"turns", cfg.demo_script.size()},
                 {"dynamic_turns", dynamic},
                 {"ack_timeout_s", std::chrono::duration<double>(cfg.demo_ack_timeout).count()}};
    return j;
}

struct Server::Impl {
    std::shared_ptr<const GatewayConfig> cfg;
    ServerOptions opts;
    net::io_context ioc;
    tcp::acceptor acceptor{ioc};
    net::signal_set signals{ioc};
    std::vector<std::thread> threads;
    std::atomic<std::uint64_t> next_id{0};

    mutable std::mutex mu;
    std::condition_variable cv;
    bool running = false;
    bool stop_requested = false;
    std::vector<std::shared_ptr<SessionHandler>> handlers;
    std::map<std::string, std::function<void()>> active;  // id -> close request

    void do_accept();

    void register_session(const std::shared_ptr<SessionHandler>& h, std::function<void()> closer) {
        std::lock_guard lock(mu);
        std::erase_if(handlers, [](const auto& x) { return x->finished(); });
        handlers.push_back(h);
        active.emplace(h->id(), std::move(closer));
    }

    void retire(const std::string& id) {
        {
            std::lock_guard lock(mu);
            active.erase(id);
        }
        cv.notify_all();
    }
};

namespace {

class WsSession : public std::enable_shared_from_this<WsSession> {
public:
    WsSession(tcp::socket&& socket, Server::Impl& srv) : ws_(std::move(socket)), srv_(srv) {}

    void run(http::request<http::string_body> req) {
        ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
        ws_.read_message_max(4 * 1024 * 1024);
        ws_.async_accept(req, beast::bind_front_handler(&WsSession::on_accept, shared_from_this()));
    }

private:
    void on_accept(beast::error_code ec) {
        if (ec) return;
        const auto id = fmt::format("session-{}", ++srv_.next_id);
        std::weak_ptr<WsSession> weak = shared_from_this();
        handler_ = SessionHandler::create(id, srv_.cfg, [weak](std::string frame) {
            if (auto self = weak.lock()) self->send(std::move(frame));
        });
        srv_.register_session(handler_, [weak] {
            if (auto self = weak.lock()) net::post(self->ws_.get_executor(), [self] { self->do_close(); });
        });
        if (!handler_->start()) {
            net::post(ws_.get_executor(), [self = shared_from_this()] {
                self->closing_ = true;
                if (!self->writing_) self->do_close();
            });
            return;
        }
        do_read();
    }

    void send(std::string frame) {
        net::post(ws_.get_executor(), [self = shared_from_this(), f = std::move(frame)]() mutable {
            if (self->gone_) return;
            self->queue_.push_back(std::move(f));
            if (!self->writing_) self->do_write();
        });
    }

    void do_write() {
        writing_ = true;
        ws_.text(true);
        ws_.async_write(net::buffer(queue_.front()), beast::bind_front_handler(&WsSession::on_write, shared_from_this()));
    }

    void on_write(beast::error_code ec, std::size_t) {
        if (ec) {
            writing_ = false;
            disconnected();
            return;
        }
        queue_.pop_front();
        if (!queue_.empty()) {
            do_write();
            return;
        }
        writing_ = false;
        if (closing_) do_close();
    }

    void do_read() {
        ws_.async_read(buffer_, beast::bind_front_handler(&WsSession::on_read, shared_from_this()));
    }

    void on_read(beast::error_code ec, std::size_t) {
        if (ec) {
            disconnected();
            return;
        }
        const auto data = buffer_.cdata();
        if (ws_.got_text()) {
            handler_->on_text(std::string_view(static_cast<const char*>(data.data()), data.size()));
        } else {
            handler_->on_binary(std::span(static_cast<const std::uint8_t*>(data.data()), data.size()));
        }
        buffer_.consume(buffer_.size());
        do_read();
    }

    void do_close() {
        if (gone_ || close_sent_) return;
        close_sent_ = true;
        ws_.async_close(websocket::close_code::normal,
                        [self = shared_from_this()](beast::error_code) { self->disconnected(); });
    }

    void disconnected() {
        if (gone_) return;
        gone_ = true;
        queue_.clear();
        if (handler_) {
            handler_->close();
            srv_.retire(handler_->id());
        }
    }

    websocket::stream<beast::tcp_stream> ws_;
    Server::Impl& srv_;
    beast::flat_buffer buffer_;
    std::deque<std::string> queue_;
    bool writing_ = false;
    bool closing_ = false;
    bool gone_ = false;
    bool close_sent_ = false;
    std::shared_ptr<SessionHandler> handler_;
};

class HttpSession : public std::enable_shared_from_this<HttpSession> {
public:
    HttpSession(tcp::socket&& socket, Server::Impl& srv) : stream_(std::move(socket)), srv_(srv) {}

    void run() {
        net::dispatch(stream_.get_executor(), beast::bind_front_handler(&HttpSession::do_read, shared_from_this()));
    }

private:
    void do_read() {
        req_ = {};
        stream_.expires_after(std::chrono::seconds(30));
        http::async_read(stream_, buffer_, req_, beast::bind_front_handler(&HttpSession::on_read, shared_from_this()));
    }

    void on_read(beast::error_code ec, std::size_t) {
        if (ec == http::error::end_of_stream) {
            stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
            return;
        }
        if (ec) return;
        const std::string target(req_.target());
        const std::string path = target.substr(0, target.find('?'));
        if (websocket::is_upgrade(req_) && path == "/ws") {
            stream_.expires_never();
            std::make_shared<WsSession>(stream_.release_socket(), srv_)->run(std::move(req_));
            return;
        }
        respond(path);
    }

    void respond(const std::string& path) {
        auto res = std::make_shared<http::response<http::string_body>>();
        res->version(req_.version());
        res->keep_alive(req_.keep_alive());
        res->set(http::field::server, "salesassist");
        res->set(http::field::access_control_allow_origin, "*");

        nlohmann::json body;
        if (req_.method() == http::verb::options) {
            res->result(http::status::no_content);
            res->set(http::field::access_control_allow_methods, "GET, OPTIONS");
            res->set(http::field::access_control_allow_headers, "Content-Type");
        } else if (req_.method() != http::verb::get && req_.method() != http::verb::head) {
            res->result(http::status::method_not_allowed);
            body = {{"error", "method not allowed"}};
        } else if (path == "/health") {
            bool ok = false;
            body = health_body(*srv_.cfg, ok);
            res->result(ok ? http::status::ok : http::status::service_unavailable);
        } else if (path == "/config") {
            body = config_body(*srv_.cfg);
            res->result(http::status::ok);
        } else if (path == "/ws") {
            res->result(http::status::upgrade_required);
            body = {{"error", "websocket upgrade required"}};
        } else {
            res->result(http::status::not_found);
            body = {{"error", "not found"}, {"path", path}};
        }
        if (!body.is_null()) {
            res->set(http::field::content_type, "application/json");
            if (req_.method() != http::verb::head) res->body() = body.dump();
        }
        res->prepare_payload();
        http::async_write(stream_, *res, [self = shared_from_this(), res](beast::error_code ec, std::size_t) {
            if (ec) return;
            if (res->need_eof()) {
                self->stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
                return;
            }
            self->do_read();
        });
    }

    beast::tcp_stream stream_;
    Server::Impl& srv_;
    beast::flat_buffer buffer_;
    http::request<http::string_body> req_;
};

}  // namespace

void Server::Impl::do_accept() {
    acceptor.async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
        if (ec == net::error::operation_aborted || !acceptor.is_open()) return;
        if (!ec) std::make_shared<HttpSession>(std::move(socket), *this)->run();
        do_accept();
    });
}

Server::Server(std::shared_ptr<const GatewayConfig> cfg, ServerOptions opts) : impl_(std::make_unique<Impl>()) {
    impl_->cfg = std::move(cfg);
    impl_->opts = std::move(opts);
}

Server::~Server() { stop(); }

void Server::start() {
    auto& s = *impl_;
    {
        std::lock_guard lock(s.mu);
        if (s.running) return;
    }
    beast::error_code ec;
    const auto addr = net::ip::make_address(s.opts.address, ec);
    if (ec) throw ValidationError("invalid listen address " + s.opts.address);
    const tcp::endpoint ep{addr, s.opts.port};
    s.acceptor.open(ep.protocol(), ec);
    if (!ec) s.acceptor.set_option(net::socket_base::reuse_address(true), ec);
    if (!ec) s.acceptor.bind(ep, ec);
    if (!ec) s.acceptor.listen(net::socket_base::max_listen_connections, ec);
    if (ec) {
        s.acceptor.close();
        throw StorageError(fmt::format("cannot listen on {}:{}: {}", s.opts.address, s.opts.port, ec.message()));
    }
    s.do_accept();
    s.signals.add(SIGINT);
    s.signals.add(SIGTERM);
    s.signals.async_wait([this](beast::error_code e, int) {
        if (!e) request_stop();
    });
    {
        std::lock_guard lock(s.mu);
        s.running = true;
        s.stop_requested = false;
    }
    const int n = std::max(1, s.opts.io_threads);
    for (int i = 0; i < n; ++i) s.threads.emplace_back([&s] { s.ioc.run(); });
}

void Server::request_stop() {
    {
        std::lock_guard lock(impl_->mu);
        impl_->stop_requested = true;
    }
    impl_->cv.notify_all();
}

void Server::wait() {
    {
        std::unique_lock lock(impl_->mu);
        impl_->cv.wait(lock, [this] { return impl_->stop_requested || !impl_->running; });
    }
    stop();
}

void Server::stop() {
    auto& s = *impl_;
    std::vector<std::shared_ptr<SessionHandler>> handlers;
    std::vector<std::function<void()>> closers;
    {
        std::lock_guard lock(s.mu);
        if (!s.running) return;
        s.running = false;
        handlers = s.handlers;
        for (const auto& [id, c] : s.active) closers.push_back(c);
    }
    for (auto& h : handlers) h->close();
    net::post(s.ioc, [&s] {
        beast::error_code ec;
        s.acceptor.close(ec);
    });
    for (auto& c : closers) c();
    {
        // let clients see a close frame before the loop stops
        std::unique_lock lock(s.mu);
        s.cv.wait_for(lock, std::chrono::seconds(1), [&s] { return s.active.empty(); });
    }
    s.ioc.stop();
    for (auto& t : s.threads) t.join();
    s.threads.clear();
    beast::error_code ec;
    s.acceptor.close(ec);
    s.signals.cancel(ec);
    for (auto& h : handlers) h->join();
    {
        std::lock_guard lock(s.mu);
        s.handlers.clear();
        s.active.clear();
    }
    s.cv.notify_all();
}

std::uint16_t Server::port() const {
    beast::error_code ec;
    const auto ep = impl_->acceptor.local_endpoint(ec);
    return ec ? impl_->opts.port : ep.port();
}

std::size_t Server::active_sessions() const {
    std::lock_guard lock(impl_->mu);
    return impl_->active.size();
}

}  // namespace salesassist::gateway
