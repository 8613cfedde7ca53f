// Copyright 2026 The SalesAssist Authors
// SPDX-License-Identifier: Apache-2.0

// server: WebSocket gateway plus /health and /config.

#include <CLI11.hpp>

#include "cli_common.hpp"
#include "salesassist/demo/demo.hpp"
#include "salesassist/gateway/server.hpp"
#include "salesassist/kb/knowledge_base.hpp"
#include "salesassist/providers/config.hpp"

using namespace salesassist;

int main(int argc, char** argv) {
    CLI::App app{"Real-time sales assist gateway"};
    std::string db, host = "0.0.0.0", providers_mode = "mock", delays, stt_script, demo_script;
    int port = 8000;
    int io_threads = 2;
    double stt_speed = 1.0;
    double ack_timeout = 120.0;
    app.add_option("--db", db, "SQLite store path")->required();
    app.add_option("--port", port, "Listen port (0 picks one)")->default_val(8000)->check(CLI::Range(0, 65535));
    app.add_option("--host", host, "Listen address")->default_val("0.0.0.0");
    app.add_option("--providers", providers_mode, "mock or live")
        ->default_val("mock")
        ->check(CLI::IsMember({"mock", "live"}));
    app.add_option("--delays", delays, "Mock stage delays d,r,g in seconds");
    app.add_option("--stt-script", stt_script, "Mock STT script JSON")->check(CLI::ExistingFile);
    app.add_option("--stt-speed", stt_speed, "Mock STT playback speed (0 = immediate)")->default_val(1.0);
    app.add_option("--demo-script", demo_script, "Demo script JSON (defaults to the built-in one)")
        ->check(CLI::ExistingFile);
    app.add_option("--demo-ack-timeout", ack_timeout, "Seconds to wait for demo_next")->default_val(120.0);
    app.add_option("--io-threads", io_threads, "Network threads")->default_val(2)->check(CLI::PositiveNumber);
    CLI11_PARSE(app, argc, argv);

    return cli::guarded([&] {
        auto pcfg = providers::resolve_providers(providers_mode,
                                                 delays.empty() ? providers::MockDelays{} : providers::parse_delays(delays));
        if (!stt_script.empty()) pcfg.stt_script = providers::load_stt_script(stt_script);
        pcfg.mock_stt_speed = stt_speed;

        std::shared_ptr<const kb::KnowledgeBase> store;
        std::string kb_error;
        try {
            auto opened = kb::KnowledgeBase::open_existing(db);
            opened.stats();
            store = std::make_shared<const kb::KnowledgeBase>(std::move(opened));
        } catch (const Error& e) {
            kb_error = e.what();
            std::cerr << "warning: knowledge base unavailable: " << kb_error << "\n";
        }

        auto gcfg = gateway::make_gateway_config(pcfg, store);
        gcfg.kb_error = kb_error;
        if (!demo_script.empty()) gcfg.demo_script = demo::load_script(demo_script);
        gcfg.demo_ack_timeout = std::chrono::milliseconds(static_cast<long long>(ack_timeout * 1000));

        gateway::Server server(std::make_shared<const gateway::GatewayConfig>(std::move(gcfg)),
                               gateway::ServerOptions{host, static_cast<std::uint16_t>(port), io_threads});
        server.start();
        std::cerr << fmt::format("listening on http://{}:{} (ws path /ws, providers {})\n", host, server.port(),
                                 providers_mode);
        server.wait();
        std::cerr << "stopped\n";
        return cli::kOk;
    });
}
