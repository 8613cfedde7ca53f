// Copyright 2026 The SalesAssist Authors
// SPDX-License-Identifier: Apache-2.0

#include "salesassist/gateway/protocol.hpp"

#include <nlohmann/json.hpp>

namespace salesassist::gateway {

using ojson = nlohmann::ordered_json;
using nlohmann::json;

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

struct FieldError {
    ProtocolError error;
};

[[noreturn]] void fail(std::string field, std::string message) {
    throw FieldError{ProtocolError{std::move(field), std::move(message)}};
}

const json& require(const json& j, const char* field) {
    auto it = j.find(field);
    if (it == j.end()) fail(field, std::string("missing field '") + field + "'");
    return *it;
}

std::string str(const json& j, const char* field) {
    const auto& v = require(j, field);
    if (!v.is_string()) fail(field, std::string("field '") + field + "' must be a string");
    return v.get<std::string>();
}

double num(const json& j, const char* field) {
    const auto& v = require(j, field);
    if (!v.is_number()) fail(field, std::string("field '") + field + "' must be a number");
    return v.get<double>();
}

int integer(const json& j, const char* field) {
    const auto& v = require(j, field);
    if (!v.is_number_integer()) fail(field, std::string("field '") + field + "' must be an integer");
    return v.get<int>();
}

bool boolean(const json& j, const char* field) {
    const auto& v = require(j, field);
    if (!v.is_boolean()) fail(field, std::string("field '") + field + "' must be a boolean");
    return v.get<bool>();
}

std::string speaker(const json& j, const char* field) {
    auto s = str(j, field);
    if (s != "rep" && s != "customer") fail(field, "speaker must be 'rep' or 'customer'");
    return s;
}

WsMessage decode(const json& j, const std::string& type) {
    if (type == "transcript_update") {
        return TranscriptUpdate{speaker(j, "speaker"), str(j, "text"), boolean(j, "is_final"), num(j, "start_time"),
                                num(j, "end_time")};
    }
    if (type == "suggestion_card") {
        SuggestionCard c;
        c.card_id = str(j, "card_id");
        c.question = str(j, "question");
        c.answer = str(j, "answer");
        c.category = str(j, "category");
        c.confidence = num(j, "confidence");
        c.source = str(j, "source");
        const auto& t = require(j, "timings");
        if (!t.is_object()) fail("timings", "field 'timings' must be an object");
        c.timings = {num(t, "detection"), num(t, "retrieval"), num(t, "generation"), num(t, "total")};
        return c;
    }
    if (type == "audio_play") return AudioPlay{integer(j, "turn_id"), str(j, "audio_b64"), speaker(j, "speaker")};
    if (type == "status") return Status{str(j, "state"), j.contains("detail") ? str(j, "detail") : std::string()};
    if (type == "error") return ErrorMessage{str(j, "code"), str(j, "message")};
    if (type == "text_input") {
        return TextInput{j.contains("speaker") ? speaker(j, "speaker") : std::string("customer"), str(j, "text")};
    }
    if (type == "demo_next") return DemoNext{integer(j, "turn_id")};
    fail("type", "unknown message type '" + type + "'");
}

}  // namespace

std::string_view type_name(const WsMessage& m) {
    return std::visit(overloaded{
                          [](const TranscriptUpdate&) { return std::string_view("transcript_update"); },
                          [](const SuggestionCard&) { return std::string_view("suggestion_card"); },
                          [](const AudioPlay&) { return std::string_view("audio_play"); },
                          [](const Status&) { return std::string_view("status"); },
                          [](const ErrorMessage&) { return std::string_view("error"); },
                          [](const TextInput&) { return std::string_view("text_input"); },
                          [](const DemoNext&) { return std::string_view("demo_next"); },
                      },
                      m);
}

std::string serialize(const WsMessage& m) {
    ojson j;
    j["type"] = type_name(m);
    std::visit(overloaded{
                   [&](const TranscriptUpdate& t) {
                       j["speaker"] = t.speaker;
                       j["text"] = t.text;
                       j["is_final"] = t.is_final;
                       j["start_time"] = t.start_time;
                       j["end_time"] = t.end_time;
                   },
                   [&](const SuggestionCard& c) {
                       j["card_id"] = c.card_id;
                       j["question"] = c.question;
                       j["answer"] = c.answer;
                       j["category"] = c.category;
                       j["confidence"] = c.confidence;
                       j["source"] = c.source;
                       j["timings"] = ojson{{"detection", c.timings.detection},
                                            {"retrieval", c.timings.retrieval},
                                            {"generation", c.timings.generation},
                                            {"total", c.timings.total}};
                   },
                   [&](const AudioPlay& a) {
                       j["turn_id"] = a.turn_id;
                       j["audio_b64"] = a.audio_b64;
                       j["speaker"] = a.speaker;
                   },
                   [&](const Status& s) {
                       j["state"] = s.state;
                       j["detail"] = s.detail;
                   },
                   [&](const ErrorMessage& e) {
                       j["code"] = e.code;
                       j["message"] = e.message;
                   },
                   [&](const TextInput& t) {
                       j["speaker"] = t.speaker;
                       j["text"] = t.text;
                   },
                   [&](const DemoNext& d) { j["turn_id"] = d.turn_id; },
               },
               m);
    return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

ParseResult parse(std::string_view frame) {
    json j = json::parse(frame, nullptr, false);
    if (j.is_discarded()) return ProtocolError{"frame", "invalid JSON"};
    if (!j.is_object()) return ProtocolError{"frame", "frame must be a JSON object"};
    try {
        return decode(j, str(j, "type"));
    } catch (const FieldError& e) {
        return e.error;
    }
}

TranscriptUpdate to_message(const pipeline::TranscriptSegment& s) {
    return TranscriptUpdate{std::string(pipeline::to_string(s.speaker)), s.text, s.is_final, s.start_time, s.end_time};
}

}  // namespace salesassist::gateway
