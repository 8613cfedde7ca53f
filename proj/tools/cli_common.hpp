// Copyright 2026 The SalesAssist Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <exception>
#include <functional>
#include <iostream>

#include <fmt/core.h>

#include "salesassist/errors.hpp"

namespace salesassist::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kUsage = 2, kAlreadySeeded = 3 };

/// Runs `body`, mapping library errors to a one-line message and exit code.
inline int guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const AlreadySeededError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kAlreadySeeded;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailure;
    }
}

}  // namespace salesassist::cli
