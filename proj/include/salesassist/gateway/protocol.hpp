// Copyright 2026 The SalesAssist Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <variant>

#include "salesassist/pipeline/pipeline.hpp"

namespace salesassist::gateway {

struct TranscriptUpdate {
    std::string speaker;  // "rep" | "customer"
    std::string text;
    bool is_final = false;
    double start_time = 0.0;
    double end_time = 0.0;

    bool operator==(const TranscriptUpdate&) const = default;
};

using SuggestionCard = pipeline::SuggestionCard;

struct AudioPlay {
    int turn_id = 0;
    std::string audio_b64;  // base64 MP3, empty when TTS is disabled
    std::string speaker;

    bool operator==(const AudioPlay&) const = default;
};

struct Status {
    std::string state;
    std::string detail;

    bool operator==(const Status&) const = default;
};

struct ErrorMessage {
    std::string code;
    std::string message;

    bool operator==(const ErrorMessage&) const = default;
};

struct TextInput {
    std::string speaker = "customer";
    std::string text;

    bool operator==(const TextInput&) const = default;
};

struct DemoNext {
    int turn_id = 0;

    bool operator==(const DemoNext&) const = default;
};

using WsMessage = std::variant<TranscriptUpdate, SuggestionCard, AudioPlay, Status, ErrorMessage, TextInput, DemoNext>;

/// The "type" tag of a message.
std::string_view type_name(const WsMessage& m);

/// Canonical single-line JSON with "type" first, then the payload fields in
/// declaration order.
std::string serialize(const WsMessage& m);

struct ProtocolError {
    std::string field;  // offending field, "type" or "frame"
    std::string message;

    bool operator==(const ProtocolError&) const = default;
};

/// Either a typed message or a protocol error. Unknown extra fields are ignored.
using ParseResult = std::variant<WsMessage, ProtocolError>;
ParseResult parse(std::string_view frame);

inline bool ok(const ParseResult& r) { return std::holds_alternative<WsMessage>(r); }

TranscriptUpdate to_message(const pipeline::TranscriptSegment& s);

}  // namespace salesassist::gateway
