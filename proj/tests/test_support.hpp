// Copyright 2026 The SalesAssist Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <filesystem>
#include <random>
#include <string>

#include <unistd.h>

#include "salesassist/kb/dataset.hpp"
#include "salesassist/kb/knowledge_base.hpp"

namespace testsupport {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("salesassist-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

/// Canonical (seed 0) knowledge base shared by all tests of one binary.
inline const salesassist::kb::KnowledgeBase& canonical_kb() {
    static TempDir dir;
    static salesassist::kb::KnowledgeBase kb = [] {
        auto k = salesassist::kb::KnowledgeBase::init_schema(dir / "canonical.sqlite");
        k.seed(salesassist::kb::generate_synthetic_dataset(0));
        return k;
    }();
    return kb;
}

inline const salesassist::kb::Dataset& canonical_dataset() {
    static const auto d = salesassist::kb::generate_synthetic_dataset(0);
    return d;
}

}  // namespace testsupport
