// Copyright 2026 The SalesAssist Authors
// SPDX-License-Identifier: Apache-2.0

#include "salesassist/pipeline/buffer.hpp"

#include <algorithm>

#include "salesassist/errors.hpp"
#include "salesassist/text.hpp"

namespace salesassist::pipeline {

std::string_view to_string(Speaker s) {
    return s == Speaker::rep ? "rep" : "customer";
}

Speaker parse_speaker(std::string_view s) {
    const auto v = text::to_lower(s);
    if (v == "rep") return Speaker::rep;
    if (v == "customer") return Speaker::customer;
    throw ValidationError("unknown speaker '" + std::string(s) + "'");
}

ConversationBuffer::ConversationBuffer(double window_s, double dedup_s) : window_(window_s), dedup_window_(dedup_s) {
    if (window_s <= 0 || dedup_s < 0) throw ContractViolation("buffer windows must be positive");
}

void ConversationBuffer::append(const TranscriptSegment& segment) {
    append(segment, segment.end_time);
}

void ConversationBuffer::append(const TranscriptSegment& segment, double now) {
    if (!segment.is_final) throw ContractViolation("only final segments enter the conversation buffer");
    if (segment.end_time < segment.start_time) throw ContractViolation("segment ends before it starts");
    auto pos = std::upper_bound(segments_.begin(), segments_.end(), segment.end_time,
                                [](double t, const TranscriptSegment& s) { return t < s.end_time; });
    segments_.insert(pos, segment);
    now_ = std::max({now_, now, segment.end_time});
    evict();
}

void ConversationBuffer::advance(double now) {
    now_ = std::max(now_, now);
    evict();
}

void ConversationBuffer::evict() {
    while (!segments_.empty() && now_ - segments_.front().end_time > window_) segments_.pop_front();
}

std::string ConversationBuffer::context() const {
    std::string out;
    for (const auto& s : segments_) {
        if (!out.empty()) out.push_back('\n');
        out += s.speaker == Speaker::rep ? "Rep: " : "Customer: ";
        out += s.text;
    }
    return out;
}

bool ConversationBuffer::is_duplicate(std::string_view question, double now) {
    advance(now);
    std::erase_if(seen_, [&](const auto& kv) { return now - kv.second > dedup_window_; });
    auto key = text::normalize_question(question);
    auto it = seen_.find(key);
    if (it != seen_.end() && now - it->second <= dedup_window_) return true;
    seen_[std::move(key)] = now;
    return false;
}

void ConversationBuffer::clear() {
    segments_.clear();
    seen_.clear();
    now_ = 0.0;
}

}  // namespace salesassist::pipeline
