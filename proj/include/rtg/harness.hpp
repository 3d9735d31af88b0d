#pragma once

// Pool-based random tester over small contract-equipped subjects. Each round
// picks a callable operation, fills its slots from the object pool or at
// random, checks the precondition, runs the body, then checks the
// postcondition and class invariant. Failures become FailureEvents.

#include <any>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rtg/curves.hpp"

namespace rtg::harness {

enum class SlotKind { integer, object, boolean };
enum class OperationKind { creator, mutator, query };
enum class FailureKind { precondition, postcondition, invariant, declared, undeclared };
enum class FilterPolicy { contract, exception };

std::string_view to_string(FailureKind k) noexcept;
std::string_view to_string(FilterPolicy p) noexcept;
/// "contract" or "exception"; throws std::invalid_argument otherwise.
FilterPolicy policy_from_string(std::string_view s);

/// Argument bound to one slot. Object slots point into the pool and may alias
/// the receiver.
using Arg = std::variant<std::int64_t, bool, std::any*>;
using CallResult = std::variant<std::monostate, std::int64_t, bool>;
/// Label of the violated clause, if any.
using Verdict = std::optional<std::string>;

/// Thrown by subject bodies to signal an exceptional outcome. Tokens listed
/// in the operation's declared_failures are part of its interface.
struct Raised {
    std::string token;
};

struct SubjectOperation {
    std::string name;
    OperationKind kind = OperationKind::query;
    std::vector<SlotKind> slots;
    /// `self` is null for creators.
    std::function<Verdict(const std::any* self, std::span<const Arg> args)> precondition;
    /// Creators construct into the empty `self`.
    std::function<CallResult(std::any& self, std::span<const Arg> args)> body;
    std::function<Verdict(const std::any& before, const std::any& after,
                          std::span<const Arg> args, const CallResult& result)>
        postcondition;
    std::set<std::string> declared_failures;

    bool needs_pool() const;
};

struct Subject {
    std::string name;
    std::vector<SubjectOperation> operations;
    std::function<Verdict(const std::any&)> invariant;
    /// Canonical text of an object's abstract state (used by exploration).
    std::function<std::string(const std::any&)> describe;
    /// Documented faults of the faulty variant, one line each.
    std::vector<std::string> known_faults;
};

struct FailureRecord {
    std::int64_t test_index = 0;
    std::string subject;
    std::string operation;
    FailureKind kind = FailureKind::postcondition;
    std::string discriminator;  ///< failing clause or raised token
    std::string signature;
    bool counted = false;
};

/// Whether a failure of this kind is a fault under `policy`. Preconditions
/// never count; contract mode counts postcondition, invariant and
/// undeclared failures; exception mode counts undeclared failures only.
bool classify(FailureKind kind, FilterPolicy policy) noexcept;
bool classify(const FailureRecord& record, FilterPolicy policy) noexcept;

/// subject.operation:kind:discriminator
std::string make_signature(std::string_view subject, std::string_view operation,
                           FailureKind kind, std::string_view discriminator);

struct SessionConfig {
    std::int64_t draws = 1000;
    std::uint64_t seed = 1;
    std::int64_t session_id = 0;
    FilterPolicy policy = FilterPolicy::contract;
    std::int64_t int_min = -32;
    std::int64_t int_max = 32;
};

struct SessionTrace {
    std::vector<FailureRecord> failures;
    /// Number of callable operations before each round (size = draws).
    std::vector<std::uint32_t> callable_per_round;
    std::size_t pool_size = 0;
};

/// Runs one session. Throws std::invalid_argument when draws < 1, subjects
/// is empty, or no subject has a pool-free creator.
SessionTrace run_session_trace(std::span<const Subject> subjects, const SessionConfig& cfg);

std::vector<FailureEvent> run_session(std::span<const Subject> subjects, const SessionConfig& cfg);

/// Names of the built-in subjects.
std::vector<std::string> builtin_subjects();
/// Built-in subject by name; `faulty = false` gives the corrected variant.
/// Throws std::invalid_argument for unknown names.
Subject make_subject(std::string_view name, bool faulty = true);

struct ExplorationConfig {
    int depth = 6;
    std::vector<std::int64_t> integers{-1, 0, 1, 2, 3};
    FilterPolicy policy = FilterPolicy::contract;
};

/// Exhaustively executes every call sequence of length <= depth on a fresh
/// pool (arguments drawn from `integers`, both booleans and every pooled
/// object) and returns the counted signatures reached.
std::set<std::string> enumerate_reachable_signatures(const Subject& subject,
                                                     const ExplorationConfig& cfg);

}  // namespace rtg::harness
