#pragma once

#include <stdexcept>
#include <string>

namespace borg {

// Base class for everything thrown by this library. Callers that only need
// coarse handling can catch this; the subclasses exist so tests and the CLI
// can map specific failures to specific exit codes and messages.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Key generation / share handling.
struct InvalidThreshold : Error { using Error::Error; };
struct DuplicateIndex : Error { using Error::Error; };
struct InsufficientShares : Error { using Error::Error; };
struct MixedContext : Error { using Error::Error; };
struct MalformedChain : Error { using Error::Error; };

// Threshold signing.
struct NonceReuse : Error { using Error::Error; };
struct NotInSignerSet : Error { using Error::Error; };
struct BelowThreshold : Error { using Error::Error; };
struct ShareVerificationFailed : Error { using Error::Error; };
struct IncompleteSet : Error { using Error::Error; };
struct UnknownMessageIndex : Error { using Error::Error; };

// Forgery proofs.
struct IncompleteNonceReveal : Error { using Error::Error; };
struct MalformedProof : Error { using Error::Error; };

// Audit log.
struct BadAuditSignature : Error { using Error::Error; };
struct ChainMismatch : Error { using Error::Error; };

// Broadcast payload budget.
struct OversizeSib1 : Error { using Error::Error; };

// File handling (distinct from protocol failures so the CLI can map them
// to dedicated exit codes).
struct IoError : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };

}  // namespace borg
