// Copyright 2026 The SalesAssist Authors
// SPDX-License-Identifier: Apache-2.0

#include "salesassist/providers/stt.hpp"

#include <atomic>
#include <limits>
#include <mutex>
#include <thread>

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/ssl.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/ssl.hpp>
#include <boost/beast/websocket.hpp>
#include <boost/beast/websocket/ssl.hpp>

#include "salesassist/errors.hpp"

namespace salesassist::providers {

namespace beast = boost::beast;
namespace websocket = beast::websocket;
namespace net = boost::asio;
namespace ssl = net::ssl;
using tcp = net::ip::tcp;

// ---------------------------------------------------------------------------
// Mock

MockSttSession::MockSttSession(std::vector<ScriptedUtterance> script, double speed, SttCallback cb)
    : events_(expand(script)), speed_(speed), cb_(std::move(cb)) {
    if (speed_ < 0) throw ContractViolation("mock STT speed must be non-negative");
}

std::vector<SttEvent> MockSttSession::expand(const std::vector<ScriptedUtterance>& script) {
    std::vector<SttEvent> out;
    for (const auto& u : script) {
        const double span = u.end_time - u.start_time;
        const double len = u.text.empty() ? 1.0 : static_cast<double>(u.text.size());
        for (const auto& prefix : u.interim_prefixes) {
            const double frac = std::min(1.0, static_cast<double>(prefix.size()) / len);
            out.push_back(SttEvent{prefix, false, u.start_time, u.start_time + span * frac, u.speaker});
        }
        out.push_back(SttEvent{u.text, true, u.start_time, u.end_time, u.speaker});
    }
    return out;
}

void MockSttSession::push_audio(std::span<const std::uint8_t> chunk) {
    if (!open_) throw ClosedSessionError("STT session is closed");
    constexpr double kBytesPerSecond = 16000.0 * 2.0;
    clock_ = speed_ == 0.0 ? std::numeric_limits<double>::infinity()
                           : clock_ + static_cast<double>(chunk.size()) / kBytesPerSecond * speed_;
    while (next_ < events_.size() && events_[next_].end_time <= clock_) {
        const SttEvent ev = events_[next_++];
        if (cb_) cb_(ev);
    }
}

// ---------------------------------------------------------------------------
// Deepgram

std::string deepgram_listen_target(const AudioFormat& fmt) {
    return "/v1/listen?model=nova-2&encoding=linear16&sample_rate=" + std::to_string(fmt.sample_rate) +
           "&channels=" + std::to_string(fmt.channels) + "&interim_results=true&punctuate=true&utterance_end_ms=" +
           std::to_string(kUtteranceEndMs);
}

std::optional<SttEvent> parse_deepgram_message(const nlohmann::json& msg) {
    if (!msg.is_object() || msg.value("type", std::string()) != "Results") return std::nullopt;
    const auto ch = msg.find("channel");
    if (ch == msg.end() || !ch->contains("alternatives") || (*ch)["alternatives"].empty()) return std::nullopt;
    const auto& alt = (*ch)["alternatives"][0];
    SttEvent ev;
    ev.text = alt.value("transcript", std::string());
    if (ev.text.empty()) return std::nullopt;
    ev.is_final = msg.value("is_final", false);
    ev.start_time = msg.value("start", 0.0);
    ev.end_time = ev.start_time + msg.value("duration", 0.0);
    if (alt.contains("words") && !alt["words"].empty() && alt["words"][0].contains("speaker")) {
        ev.channel_speaker = "speaker_" + std::to_string(alt["words"][0]["speaker"].get<int>());
    }
    return ev;
}

namespace {

constexpr const char* kDeepgramHost = "api.deepgram.com";

class DeepgramSession final : public SttSession {
public:
    DeepgramSession(const std::string& key, const AudioFormat& fmt, SttCallback cb)
        : ssl_ctx_(ssl::context::tls_client), ws_(ioc_, ssl_ctx_), cb_(std::move(cb)) {
        try {
            ssl_ctx_.set_default_verify_paths();
            ssl_ctx_.set_verify_mode(ssl::verify_peer);
            tcp::resolver resolver(ioc_);
            auto endpoints = resolver.resolve(kDeepgramHost, "443");
            net::connect(beast::get_lowest_layer(ws_), endpoints);
            if (!SSL_set_tlsext_host_name(ws_.next_layer().native_handle(), kDeepgramHost)) {
                throw ConnectivityError("cannot set TLS server name");
            }
            ws_.next_layer().handshake(ssl::stream_base::client);
            ws_.set_option(websocket::stream_base::decorator([&key](websocket::request_type& req) {
                req.set(beast::http::field::authorization, "Token " + key);
            }));
            websocket::response_type res;
            beast::error_code ec;
            ws_.handshake(res, kDeepgramHost, deepgram_listen_target(fmt), ec);
            if (res.result() == beast::http::status::unauthorized || res.result() == beast::http::status::forbidden) {
                throw ProviderAuthError("deepgram rejected the credentials");
            }
            if (ec) throw ConnectivityError("deepgram handshake failed: " + ec.message());
        } catch (const boost::system::system_error& e) {
            throw ConnectivityError(std::string("deepgram unreachable: ") + e.what());
        }
        ws_.binary(true);
        reader_ = std::thread([this] { read_loop(); });
    }

    ~DeepgramSession() override {
        try {
            close();
        } catch (...) {
        }
    }

    void push_audio(std::span<const std::uint8_t> chunk) override {
        std::lock_guard lock(write_mu_);
        if (!open_) throw ClosedSessionError("STT session is closed");
        beast::error_code ec;
        ws_.binary(true);
        ws_.write(net::buffer(chunk.data(), chunk.size()), ec);
        if (ec) throw ConnectivityError("deepgram write failed: " + ec.message());
    }

    void close() override {
        {
            std::lock_guard lock(write_mu_);
            if (!open_) return;
            open_ = false;
            beast::error_code ec;
            ws_.text(true);
            ws_.write(net::buffer(std::string(R"({"type":"CloseStream"})")), ec);
        }
        if (reader_.joinable()) reader_.join();
        beast::error_code ec;
        ws_.close(websocket::close_code::normal, ec);
    }

    bool is_open() const override { return open_; }

private:
    void read_loop() {
        for (;;) {
            beast::flat_buffer buf;
            beast::error_code ec;
            ws_.read(buf, ec);
            if (ec) return;
            auto msg = nlohmann::json::parse(beast::buffers_to_string(buf.data()), nullptr, false);
            if (msg.is_discarded()) continue;
            if (auto ev = parse_deepgram_message(msg); ev && cb_) cb_(*ev);
        }
    }

    net::io_context ioc_;
    ssl::context ssl_ctx_;
    websocket::stream<beast::ssl_stream<tcp::socket>> ws_;
    SttCallback cb_;
    std::mutex write_mu_;
    std::atomic<bool> open_{true};
    std::thread reader_;
};

}  // namespace

std::unique_ptr<SttSession> stt_open_stream(const ProviderConfig& cfg, const AudioFormat& fmt, SttCallback cb) {
    if (fmt.sample_rate != 16000 || fmt.bits_per_sample != 16 || fmt.channels != 1 || !fmt.little_endian) {
        throw ContractViolation("audio must be 16 kHz 16-bit little-endian mono PCM");
    }
    if (cfg.stt_provider == SttProvider::mock) {
        return std::make_unique<MockSttSession>(cfg.stt_script, cfg.mock_stt_speed, std::move(cb));
    }
    const auto& key = require_credential(cfg, credential_key(cfg.stt_provider));
    return std::make_unique<DeepgramSession>(key, fmt, std::move(cb));
}

}  // namespace salesassist::providers
