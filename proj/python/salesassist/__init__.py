# Copyright 2026 The SalesAssist Authors
# SPDX-License-Identifier: Apache-2.0

"""Python access to the sales-assist core."""

from ._core import (
    AlreadySeededError,
    Client,
    ClosedSessionError,
    ConnectivityError,
    Error,
    Pipeline,
    ProviderAuthError,
    Server,
    StorageError,
    ValidationError,
    build_report,
    kb_init,
    kb_seed,
    kb_stats,
    parse_message,
    run_benchmark,
    serialize_message,
    validate_sql,
)

__all__ = [
    "AlreadySeededError",
    "Client",
    "ClosedSessionError",
    "ConnectivityError",
    "Error",
    "Pipeline",
    "ProviderAuthError",
    "Server",
    "StorageError",
    "ValidationError",
    "build_report",
    "kb_init",
    "kb_seed",
    "kb_stats",
    "parse_message",
    "run_benchmark",
    "serialize_message",
    "validate_sql",
]
