// Copyright 2026 The SalesAssist Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <deque>
#include <string>
#include <string_view>
#include <unordered_map>

namespace salesassist::pipeline {

enum class Speaker { rep, customer };

std::string_view to_string(Speaker s);
/// Accepts "rep" and "customer" (any case); throws ValidationError otherwise.
Speaker parse_speaker(std::string_view s);

struct TranscriptSegment {
    Speaker speaker = Speaker::customer;
    std::string text;
    bool is_final = true;
    double start_time = 0.0;
    double end_time = 0.0;

    bool operator==(const TranscriptSegment&) const = default;
};

inline constexpr double kContextWindowSeconds = 60.0;
inline constexpr double kDedupWindowSeconds = 120.0;

/// Rolling window of final segments plus the recently seen questions.
class ConversationBuffer {
public:
    explicit ConversationBuffer(double window_s = kContextWindowSeconds, double dedup_s = kDedupWindowSeconds);

    /// Inserts in end_time order, then evicts everything older than the
    /// window relative to the latest time observed so far. Throws
    /// ContractViolation for interim segments or end < start.
    void append(const TranscriptSegment& segment);
    void append(const TranscriptSegment& segment, double now);

    /// Moves the clock forward (never backward) and evicts.
    void advance(double now);

    /// "Customer: ..." / "Rep: ..." lines, oldest first, '\n'-separated.
    std::string context() const;

    /// True iff the normalized question was recorded within the dedup
    /// window before `now`; otherwise records it at `now`.
    bool is_duplicate(std::string_view question, double now);

    const std::deque<TranscriptSegment>& segments() const { return segments_; }
    double now() const { return now_; }
    double window() const { return window_; }
    void clear();

private:
    void evict();

    double window_;
    double dedup_window_;
    double now_ = 0.0;
    std::deque<TranscriptSegment> segments_;
    std::unordered_map<std::string, double> seen_;
};

}  // namespace salesassist::pipeline
