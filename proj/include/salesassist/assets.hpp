// Copyright 2026 The SalesAssist Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Copies of the files under assets/, embedded at build time.
namespace salesassist::assets {

extern const char* const kDemoScript;
extern const char* const kBenchmarkQuestions;
extern const char* const kBaseline;

}  // namespace salesassist::assets
