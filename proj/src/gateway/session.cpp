// Copyright 2026 The SalesAssist Authors
// SPDX-License-Identifier: Apache-2.0

#include "salesassist/gateway/session.hpp"

#include <algorithm>

#include "salesassist/errors.hpp"
#include "salesassist/providers/llm.hpp"
#include "salesassist/providers/tts.hpp"
#include "salesassist/text.hpp"

namespace salesassist::gateway {

using pipeline::Speaker;
using pipeline::TranscriptSegment;

std::string_view to_string(SessionMode m) {
    switch (m) {
        case SessionMode::live: return "live";
        case SessionMode::demo: return "demo";
        case SessionMode::text_only: return "text_only";
    }
    return "text_only";
}

GatewayConfig make_gateway_config(providers::ProviderConfig providers, std::shared_ptr<const kb::KnowledgeBase> kb) {
    GatewayConfig cfg;
    cfg.providers = std::move(providers);
    cfg.kb = std::move(kb);
    std::shared_ptr<providers::TtsClient> tts;
    try {
        tts = providers::make_tts_client(cfg.providers);
    } catch (const NotConfiguredError&) {
    }
    cfg.tts = std::make_shared<demo::TtsCache>(std::move(tts));
    const auto p = cfg.providers;
    cfg.llm_factory = [p] { return std::shared_ptr<providers::LlmClient>(providers::make_llm_client(p)); };
    return cfg;
}

std::shared_ptr<SessionHandler> SessionHandler::create(std::string session_id,
                                                       std::shared_ptr<const GatewayConfig> cfg, Emit emit) {
    return std::shared_ptr<SessionHandler>(new SessionHandler(std::move(session_id), std::move(cfg), std::move(emit)));
}

SessionHandler::SessionHandler(std::string session_id, std::shared_ptr<const GatewayConfig> cfg, Emit emit)
    : id_(std::move(session_id)), cfg_(std::move(cfg)), emit_(std::move(emit)), started_(std::chrono::steady_clock::now()) {
    const auto& p = cfg_->providers;
    const bool has_stt = p.stt_provider == providers::SttProvider::deepgram || !p.stt_script.empty();
    mode_ = has_stt ? SessionMode::live : SessionMode::text_only;
}

SessionHandler::~SessionHandler() {
    close();
    if (worker_.joinable()) {
        if (worker_.get_id() == std::this_thread::get_id()) {
            worker_.detach();
        } else {
            worker_.join();
        }
    }
}

void SessionHandler::emit(const WsMessage& m) {
    emit_(serialize(m));
}

double SessionHandler::session_clock() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - started_).count();
}

SessionMode SessionHandler::mode() const {
    std::lock_guard lock(mu_);
    return mode_;
}

bool SessionHandler::start() {
    try {
        if (!cfg_->kb) throw StorageError(cfg_->kb_error.empty() ? "knowledge base not configured" : cfg_->kb_error);
        cfg_->kb->stats();
        auto llm = cfg_->llm_factory ? cfg_->llm_factory()
                                     : std::shared_ptr<providers::LlmClient>(providers::make_llm_client(cfg_->providers));
        pipeline_ = std::make_unique<pipeline::Pipeline>(std::move(llm), cfg_->kb, pipeline::PipelineOptions{true, id_});
    } catch (const ProviderAuthError& e) {
        emit(ErrorMessage{"provider_auth", e.what()});
        return false;
    } catch (const Error& e) {
        emit(ErrorMessage{"kb_unavailable", e.what()});
        return false;
    }
    emit(Status{"connected", id_});
    worker_ = std::thread([this] { worker_loop(); });
    return true;
}

void SessionHandler::enqueue(std::function<void()> task) {
    {
        std::lock_guard lock(mu_);
        if (closed_) return;
        tasks_.push_back(std::move(task));
    }
    cv_.notify_all();
}

void SessionHandler::worker_loop() {
    for (;;) {
        std::function<void()> task;
        {
            std::unique_lock lock(mu_);
            cv_.wait(lock, [this] { return closed_ || !tasks_.empty(); });
            if (closed_) break;
            task = std::move(tasks_.front());
            tasks_.pop_front();
        }
        try {
            task();
        } catch (const std::exception& e) {
            emit(ErrorMessage{"internal_error", e.what()});
        }
    }
    if (stt_) stt_->close();
    std::lock_guard lock(mu_);
    finished_ = true;
}

void SessionHandler::close() {
    std::shared_ptr<demo::DemoEngine> engine;
    {
        std::lock_guard lock(mu_);
        if (closed_) return;
        closed_ = true;
        tasks_.clear();
        engine = demo_;
        if (!worker_.joinable()) finished_ = true;
    }
    if (engine) engine->abort();
    cv_.notify_all();
}

void SessionHandler::join() {
    if (worker_.joinable() && worker_.get_id() != std::this_thread::get_id()) worker_.join();
}

bool SessionHandler::finished() const {
    std::lock_guard lock(mu_);
    return finished_;
}

// ---------------------------------------------------------------------------

void SessionHandler::on_text(std::string_view frame) {
    auto parsed = parse(frame);
    if (auto* err = std::get_if<ProtocolError>(&parsed)) {
        emit(ErrorMessage{"protocol_error", err->field + ": " + err->message});
        return;
    }
    const auto& msg = std::get<WsMessage>(parsed);
    if (!pipeline_) {
        emit(ErrorMessage{"not_ready", "session is not started"});
        return;
    }

    if (const auto* t = std::get_if<TextInput>(&msg)) {
        if (mode() == SessionMode::demo) {
            emit(ErrorMessage{"wrong_mode", "text input is not accepted while a demo is running"});
            return;
        }
        if (text::trim(t->text).empty()) {
            emit(ErrorMessage{"empty_text", "text_input needs non-empty text"});
            return;
        }
        enqueue([this, input = *t] { handle_text_input(input); });
        return;
    }
    if (const auto* n = std::get_if<DemoNext>(&msg)) {
        std::shared_ptr<demo::DemoEngine> engine;
        {
            std::lock_guard lock(mu_);
            engine = demo_;
        }
        if (engine) {
            engine->acknowledge(n->turn_id);
        } else {
            emit(ErrorMessage{"no_demo", "demo_next received but no demo is running"});
        }
        return;
    }
    if (const auto* s = std::get_if<Status>(&msg); s && s->state == "demo_start") {
        {
            std::lock_guard lock(mu_);
            if (mode_ == SessionMode::demo) {
                emit(ErrorMessage{"demo_active", "a demo is already running"});
                return;
            }
            mode_before_demo_ = mode_;
            mode_ = SessionMode::demo;
            // created here so demo_next can never race ahead of the engine
            demo_ = std::make_shared<demo::DemoEngine>(
                cfg_->demo_script, *pipeline_, *cfg_->tts, [this](const WsMessage& m) { emit(m); },
                cfg_->demo_ack_timeout);
        }
        enqueue([this] { handle_demo_start(); });
        return;
    }
    emit(ErrorMessage{"unsupported_message",
                      "the server does not accept '" + std::string(type_name(msg)) + "' frames from clients"});
}

void SessionHandler::on_binary(std::span<const std::uint8_t> chunk) {
    const auto m = mode();
    if (m == SessionMode::demo) {
        emit(ErrorMessage{"wrong_mode", "audio is not accepted while a demo is running"});
        return;
    }
    if (m == SessionMode::text_only) {
        emit(ErrorMessage{"stt_unavailable", "no speech-to-text source is configured; use text_input"});
        return;
    }
    enqueue([this, data = std::vector<std::uint8_t>(chunk.begin(), chunk.end())]() mutable {
        handle_audio(std::move(data));
    });
}

// ---------------------------------------------------------------------------
// Worker-side handlers

void SessionHandler::publish(const pipeline::ProcessOutcome& outcome) {
    if (outcome.card) emit(*outcome.card);
    if (outcome.error) emit(ErrorMessage{outcome.error->code, outcome.error->message});
}

void SessionHandler::handle_text_input(const TextInput& msg) {
    const double now = session_clock();
    TranscriptSegment seg{pipeline::parse_speaker(msg.speaker), text::trim(msg.text), true, now, now};
    emit(to_message(seg));
    publish(pipeline_->process_final_segment(seg));
}

void SessionHandler::handle_demo_start() {
    std::shared_ptr<demo::DemoEngine> engine;
    {
        std::lock_guard lock(mu_);
        engine = demo_;
    }
    if (!engine) return;
    pipeline_->buffer().clear();
    engine->run();
    std::lock_guard lock(mu_);
    demo_.reset();
    mode_ = mode_before_demo_;
}

void SessionHandler::handle_audio(std::vector<std::uint8_t> chunk) {
    try {
        if (!stt_) {
            stt_ = providers::stt_open_stream(cfg_->providers, providers::AudioFormat{},
                                              [this](const providers::SttEvent& ev) { on_stt_event(ev); });
        }
        stt_->push_audio(chunk);
    } catch (const ProviderAuthError& e) {
        stt_.reset();
        emit(ErrorMessage{"stt_auth", e.what()});
    } catch (const Error& e) {
        stt_.reset();
        emit(ErrorMessage{"stt_error", e.what()});
    }
}

void SessionHandler::on_stt_event(const providers::SttEvent& ev) {
    Speaker speaker = cfg_->live_speaker;
    if (ev.channel_speaker) {
        try {
            speaker = pipeline::parse_speaker(*ev.channel_speaker);
        } catch (const ValidationError&) {
        }
    }
    TranscriptSegment seg{speaker, ev.text, ev.is_final, ev.start_time, std::max(ev.start_time, ev.end_time)};
    emit(to_message(seg));
    if (!seg.is_final) return;
    bool schedule = false;
    {
        std::lock_guard lock(mu_);
        pending_finals_.push_back(std::move(seg));
        schedule = !drain_scheduled_;
        drain_scheduled_ = true;
    }
    if (schedule) enqueue([this] { drain_finals(); });
}

void SessionHandler::drain_finals() {
    std::vector<TranscriptSegment> batch;
    {
        std::lock_guard lock(mu_);
        batch.swap(pending_finals_);
        drain_scheduled_ = false;
    }
    if (!batch.empty()) publish(pipeline_->process_final_segments(batch));
}

}  // namespace salesassist::gateway
