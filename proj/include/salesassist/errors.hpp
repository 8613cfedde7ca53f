// Copyright 2026 The SalesAssist Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace salesassist {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// knowledge base
class StorageError : public Error { using Error::Error; };
class SchemaMismatchError : public Error { using Error::Error; };
class ReferentialIntegrityError : public Error { using Error::Error; };
class UniquenessError : public Error { using Error::Error; };
class AlreadySeededError : public Error { using Error::Error; };
class QueryError : public Error { using Error::Error; };
class TimeoutError : public Error { using Error::Error; };
class RejectedSqlError : public Error { using Error::Error; };

// providers
class ProviderAuthError : public Error { using Error::Error; };
class ConnectivityError : public Error { using Error::Error; };
class ProviderProtocolError : public Error { using Error::Error; };
class ClosedSessionError : public Error { using Error::Error; };
class NotConfiguredError : public Error { using Error::Error; };

// everything else
class ContractViolation : public Error { using Error::Error; };
class ValidationError : public Error { using Error::Error; };

}  // namespace salesassist
