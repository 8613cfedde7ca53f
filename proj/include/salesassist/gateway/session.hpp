// Copyright 2026 The SalesAssist Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <condition_variable>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "salesassist/demo/demo.hpp"
#include "salesassist/gateway/protocol.hpp"
#include "salesassist/kb/knowledge_base.hpp"
#include "salesassist/pipeline/pipeline.hpp"
#include "salesassist/providers/config.hpp"
#include "salesassist/providers/stt.hpp"

namespace salesassist::gateway {

enum class SessionMode { live, demo, text_only };
std::string_view to_string(SessionMode m);

/// Everything a session needs from the server. Shared read-only by all sessions.
struct GatewayConfig {
    providers::ProviderConfig providers;
    std::shared_ptr<const kb::KnowledgeBase> kb;  // null when the store could not be opened
    std::string kb_error;                         // why `kb` is null
    std::vector<demo::DemoTurn> demo_script = demo::canonical_script();
    std::chrono::milliseconds demo_ack_timeout = demo::kDefaultAckTimeout;
    pipeline::Speaker live_speaker = pipeline::Speaker::customer;
    std::shared_ptr<demo::TtsCache> tts;  // shared across sessions
    /// Builds the per-session LLM client; defaults to make_llm_client(providers).
    std::function<std::shared_ptr<providers::LlmClient>()> llm_factory;
};

/// Fills the defaults (TTS cache, LLM factory) that depend on `providers`.
GatewayConfig make_gateway_config(providers::ProviderConfig providers, std::shared_ptr<const kb::KnowledgeBase> kb);

/// One client connection, independent of the transport. Inbound frames are
/// handled in arrival order on a per-session worker thread; demo_next is
/// routed straight to the running demo. `emit` receives outbound text
/// frames in emission order and must be thread-safe.
class SessionHandler : public std::enable_shared_from_this<SessionHandler> {
public:
    using Emit = std::function<void(std::string frame)>;

    static std::shared_ptr<SessionHandler> create(std::string session_id, std::shared_ptr<const GatewayConfig> cfg,
                                                  Emit emit);
    ~SessionHandler();

    /// Emits status connected, or error kb_unavailable and returns false
    /// (the transport should close after flushing).
    bool start();

    void on_text(std::string_view frame);
    void on_binary(std::span<const std::uint8_t> chunk);

    /// Stops accepting work and aborts a running demo. Non-blocking.
    void close();
    /// Waits for the worker to exit. Must not be called from the worker.
    void join();
    bool finished() const;

    const std::string& id() const { return id_; }
    SessionMode mode() const;

private:
    SessionHandler(std::string session_id, std::shared_ptr<const GatewayConfig> cfg, Emit emit);

    void emit(const WsMessage& m);
    void enqueue(std::function<void()> task);
    void worker_loop();
    double session_clock() const;

    void handle_text_input(const TextInput& msg);
    void handle_demo_start();
    void handle_audio(std::vector<std::uint8_t> chunk);
    void on_stt_event(const providers::SttEvent& ev);
    void drain_finals();
    void publish(const pipeline::ProcessOutcome& outcome);

    std::string id_;
    std::shared_ptr<const GatewayConfig> cfg_;
    Emit emit_;
    std::chrono::steady_clock::time_point started_;

    std::unique_ptr<pipeline::Pipeline> pipeline_;
    std::unique_ptr<providers::SttSession> stt_;

    mutable std::mutex mu_;
    std::condition_variable cv_;
    std::deque<std::function<void()>> tasks_;
    std::vector<pipeline::TranscriptSegment> pending_finals_;
    bool drain_scheduled_ = false;
    bool closed_ = false;
    bool finished_ = false;
    SessionMode mode_ = SessionMode::text_only;
    SessionMode mode_before_demo_ = SessionMode::text_only;
    std::shared_ptr<demo::DemoEngine> demo_;
    std::thread worker_;
};

}  // namespace salesassist::gateway
