// Copyright 2026 The SalesAssist Authors
// SPDX-License-Identifier: Apache-2.0

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "salesassist/bench/bench.hpp"
#include "salesassist/errors.hpp"
#include "salesassist/gateway/client.hpp"
#include "salesassist/gateway/protocol.hpp"
#include "salesassist/gateway/server.hpp"
#include "salesassist/kb/dataset.hpp"
#include "salesassist/kb/knowledge_base.hpp"
#include "salesassist/pipeline/pipeline.hpp"
#include "salesassist/pipeline/sql_guard.hpp"
#include "salesassist/providers/config.hpp"

namespace py = pybind11;
using namespace salesassist;
using Delays = std::tuple<double, double, double>;

namespace {

py::object to_py(const std::string& json_text) { return py::module_::import("json").attr("loads")(json_text); }

template <class J>
py::object to_py(const J& j) {
    return to_py(j.dump());
}

std::string to_json_text(const py::handle& obj) {
    return py::module_::import("json").attr("dumps")(obj).cast<std::string>();
}

providers::ProviderConfig provider_config(const std::string& mode, const Delays& d) {
    return providers::resolve_providers(mode, {std::get<0>(d), std::get<1>(d), std::get<2>(d)});
}

py::dict kb_summary(const kb::KnowledgeBase& store) {
    const auto s = store.stats();
    py::dict out;
    out["products"] = s.products;
    out["coverage_details"] = s.coverage_details;
    out["policy_terms"] = s.policy_terms;
    out["faqs"] = s.faqs;
    out["pricing_tiers"] = s.pricing_tiers;
    out["approx_tokens"] = s.approx_tokens;
    out["products_per_category"] = store.products_per_category();
    return out;
}

std::shared_ptr<const kb::KnowledgeBase> open_kb(const std::string& db) {
    return std::make_shared<const kb::KnowledgeBase>(kb::KnowledgeBase::open_existing(db));
}

gateway::WsMessage message_from(const std::string& frame) {
    auto r = gateway::parse(frame);
    if (auto* err = std::get_if<gateway::ProtocolError>(&r)) throw ValidationError(err->field + ": " + err->message);
    return std::get<gateway::WsMessage>(std::move(r));
}

class PyPipeline {
public:
    PyPipeline(const std::string& db, const std::string& mode, const Delays& delays, bool dedup)
        : pipe_(std::shared_ptr<providers::LlmClient>(providers::make_llm_client(provider_config(mode, delays))),
                open_kb(db), pipeline::PipelineOptions{dedup, "card"}) {}

    py::dict process(const std::string& text, const std::string& speaker, double start, double end) {
        pipeline::ProcessOutcome out;
        {
            py::gil_scoped_release nogil;
            out = pipe_.process_final_segment({pipeline::parse_speaker(speaker), text, true, start, std::max(start, end)});
        }
        py::dict d;
        d["card"] = out.card ? to_py(gateway::serialize(*out.card)) : py::none();
        if (out.error) {
            py::dict e;
            e["code"] = out.error->code;
            e["message"] = out.error->message;
            d["error"] = e;
        } else {
            d["error"] = py::none();
        }
        d["duplicate"] = out.duplicate;
        d["detected"] = out.detection && out.detection->detected;
        return d;
    }

    std::string context() const { return pipe_.buffer().context(); }

private:
    pipeline::Pipeline pipe_;
};

class PyServer {
public:
    PyServer(const std::string& db, int port, const std::string& mode, const Delays& delays, const std::string& host,
             const std::optional<std::string>& stt_script, double demo_ack_timeout) {
        auto pcfg = provider_config(mode, delays);
        if (stt_script) pcfg.stt_script = providers::load_stt_script(*stt_script);
        std::shared_ptr<const kb::KnowledgeBase> store;
        std::string kb_error;
        try {
            store = open_kb(db);
        } catch (const Error& e) {
            kb_error = e.what();
        }
        auto cfg = gateway::make_gateway_config(pcfg, store);
        cfg.kb_error = kb_error;
        cfg.demo_ack_timeout = std::chrono::milliseconds(static_cast<long long>(demo_ack_timeout * 1000));
        server_ = std::make_unique<gateway::Server>(std::make_shared<const gateway::GatewayConfig>(std::move(cfg)),
                                                    gateway::ServerOptions{host, static_cast<std::uint16_t>(port), 1});
    }

    void start() { server_->start(); }
    void stop() {
        py::gil_scoped_release nogil;
        server_->stop();
    }
    int port() const { return server_->port(); }
    std::size_t active_sessions() const { return server_->active_sessions(); }

private:
    std::unique_ptr<gateway::Server> server_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Knowledge base, pipeline, gateway and benchmark bindings.";

    static py::exception<Error> base_error(m, "Error");
    py::register_exception<StorageError>(m, "StorageError", base_error.ptr());
    py::register_exception<AlreadySeededError>(m, "AlreadySeededError", base_error.ptr());
    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<ProviderAuthError>(m, "ProviderAuthError", base_error.ptr());
    py::register_exception<ConnectivityError>(m, "ConnectivityError", base_error.ptr());
    py::register_exception<ClosedSessionError>(m, "ClosedSessionError", base_error.ptr());

    m.def(
        "kb_init", [](const std::string& db) { return kb_summary(kb::KnowledgeBase::init_schema(db)); }, py::arg("db"),
        "Create the schema if absent and return the row counts.");
    m.def(
        "kb_seed",
        [](const std::string& db, std::uint64_t seed, const std::optional<std::string>& from_json, bool overwrite) {
            auto store = kb::KnowledgeBase::init_schema(db);
            {
                py::gil_scoped_release nogil;
                store.seed(from_json ? kb::load_dataset_file(*from_json) : kb::generate_synthetic_dataset(seed), overwrite);
            }
            return kb_summary(store);
        },
        py::arg("db"), py::arg("seed") = 0, py::arg("from_json") = py::none(), py::arg("overwrite") = false,
        "Seed the store from the generator or a dataset JSON file.");
    m.def(
        "kb_stats", [](const std::string& db) { return kb_summary(kb::KnowledgeBase::open_existing(db)); },
        py::arg("db"));

    m.def(
        "validate_sql",
        [](const std::string& sql) {
            const auto v = pipeline::validate_readonly_sql(sql);
            return py::make_tuple(v.accepted, v.reason);
        },
        py::arg("sql"), "(accepted, reason) for a candidate read-only statement.");

    m.def(
        "parse_message", [](const std::string& frame) { return to_py(gateway::serialize(message_from(frame))); },
        py::arg("frame"), "Validate a protocol frame and return it as a dict. Raises ValidationError.");
    m.def(
        "serialize_message",
        [](const py::dict& msg) { return gateway::serialize(message_from(to_json_text(msg))); }, py::arg("message"),
        "Canonical wire form of a message dict.");

    py::class_<PyPipeline>(m, "Pipeline")
        .def(py::init<const std::string&, const std::string&, const Delays&, bool>(), py::arg("db"),
             py::arg("providers") = "mock", py::arg("delays") = Delays{0, 0, 0}, py::arg("dedup") = true)
        .def("process", &PyPipeline::process, py::arg("text"), py::arg("speaker") = "customer", py::arg("start") = 0.0,
             py::arg("end") = 0.0)
        .def("context", &PyPipeline::context);

    m.def(
        "run_benchmark",
        [](const std::string& db, const std::string& mode, const Delays& delays, int warmup) {
            auto store = open_kb(db);
            const auto cfg = provider_config(mode, delays);
            std::vector<bench::BenchmarkSample> samples;
            {
                py::gil_scoped_release nogil;
                bench::RunOptions opts;
                opts.warmup = warmup;
                samples = bench::run_benchmark(cfg, store, bench::canonical_questions(), opts);
            }
            return to_py(bench::samples_json(samples)["samples"]);
        },
        py::arg("db"), py::arg("providers") = "mock", py::arg("delays") = Delays{0, 0, 0}, py::arg("warmup") = 1);
    m.def(
        "build_report",
        [](const py::list& samples, const std::optional<std::string>& out_dir, const std::optional<std::string>& baseline) {
            const auto parsed = bench::parse_samples(to_json_text(samples));
            const auto base = baseline ? bench::load_baseline(*baseline) : bench::canonical_baseline();
            const auto report = bench::make_report(parsed, base);
            if (out_dir) bench::emit_report(report, *out_dir);
            return to_py(bench::report_json(report));
        },
        py::arg("samples"), py::arg("out_dir") = py::none(), py::arg("baseline") = py::none());

    py::class_<PyServer>(m, "Server")
        .def(py::init<const std::string&, int, const std::string&, const Delays&, const std::string&,
                      const std::optional<std::string>&, double>(),
             py::arg("db"), py::arg("port") = 0, py::arg("providers") = "mock", py::arg("delays") = Delays{0, 0, 0},
             py::arg("host") = "127.0.0.1", py::arg("stt_script") = py::none(), py::arg("demo_ack_timeout") = 120.0)
        .def("start", &PyServer::start)
        .def("stop", &PyServer::stop)
        .def_property_readonly("port", &PyServer::port)
        .def_property_readonly("active_sessions", &PyServer::active_sessions);

    py::class_<gateway::WsClient>(m, "Client")
        .def(py::init<>())
        .def("connect", &gateway::WsClient::connect, py::arg("host"), py::arg("port"), py::arg("path") = "/ws",
             py::call_guard<py::gil_scoped_release>())
        .def("send_text", &gateway::WsClient::send_text, py::arg("frame"))
        .def(
            "send", [](gateway::WsClient& c, const py::dict& msg) { c.send(message_from(to_json_text(msg))); },
            py::arg("message"))
        .def(
            "send_binary",
            [](gateway::WsClient& c, const py::bytes& data) {
                const std::string_view view = data;
                c.send_binary(std::span(reinterpret_cast<const std::uint8_t*>(view.data()), view.size()));
            },
            py::arg("data"))
        .def(
            "next_message",
            [](gateway::WsClient& c, double timeout) -> py::object {
                std::optional<gateway::Frame> f;
                {
                    py::gil_scoped_release nogil;
                    f = c.next_frame(std::chrono::milliseconds(static_cast<long long>(timeout * 1000)));
                }
                if (!f) return py::none();
                if (f->binary) return py::bytes(f->data);
                return to_py(f->data);
            },
            py::arg("timeout") = 5.0)
        .def("close", &gateway::WsClient::close, py::call_guard<py::gil_scoped_release>())
        .def_property_readonly("is_open", &gateway::WsClient::is_open);
}
