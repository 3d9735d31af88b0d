#include "rtg/harness.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>
#include <unordered_map>

#include "rtg/random.hpp"

namespace rtg::harness {

std::string_view to_string(FailureKind k) noexcept {
    switch (k) {
        case FailureKind::precondition: return "precondition";
        case FailureKind::postcondition: return "postcondition";
        case FailureKind::invariant: return "invariant";
        case FailureKind::declared: return "declared";
        case FailureKind::undeclared: return "undeclared";
    }
    return "?";
}

std::string_view to_string(FilterPolicy p) noexcept {
    return p == FilterPolicy::contract ? "contract" : "exception";
}

FilterPolicy policy_from_string(std::string_view s) {
    if (s == "contract") return FilterPolicy::contract;
    if (s == "exception") return FilterPolicy::exception;
    throw std::invalid_argument("unknown policy '" + std::string(s) + "'");
}

bool SubjectOperation::needs_pool() const {
    return kind != OperationKind::creator ||
           std::find(slots.begin(), slots.end(), SlotKind::object) != slots.end();
}

bool classify(FailureKind kind, FilterPolicy policy) noexcept {
    switch (kind) {
        case FailureKind::precondition:
        case FailureKind::declared: return false;
        case FailureKind::undeclared: return true;
        case FailureKind::postcondition:
        case FailureKind::invariant: return policy == FilterPolicy::contract;
    }
    return false;
}

bool classify(const FailureRecord& record, FilterPolicy policy) noexcept {
    return classify(record.kind, policy);
}

std::string make_signature(std::string_view subject, std::string_view operation, FailureKind kind,
                           std::string_view discriminator) {
    std::string s;
    s.reserve(subject.size() + operation.size() + discriminator.size() + 16);
    s.append(subject).append(".").append(operation).append(":");
    s.append(to_string(kind)).append(":").append(discriminator);
    return s;
}

namespace {

struct Outcome {
    std::optional<FailureRecord> failure;
    std::optional<std::any> created;
};

// One call, shared by random sessions and exhaustive exploration. At most one
// failure is reported per call: the first check that fails.
Outcome execute(const Subject& subject, const SubjectOperation& op, std::any* receiver,
                std::span<const Arg> args, std::int64_t test_index, FilterPolicy policy) {
    Outcome out;
    auto fail = [&](FailureKind kind, std::string discriminator) {
        FailureRecord r;
        r.test_index = test_index;
        r.subject = subject.name;
        r.operation = op.name;
        r.kind = kind;
        r.signature = make_signature(subject.name, op.name, kind, discriminator);
        r.discriminator = std::move(discriminator);
        r.counted = classify(kind, policy);
        out.failure = std::move(r);
    };

    if (op.precondition) {
        if (auto clause = op.precondition(receiver, args)) {
            fail(FailureKind::precondition, std::move(*clause));
            return out;
        }
    }

    const bool creator = op.kind == OperationKind::creator;
    std::any fresh;
    std::any& target = creator ? fresh : *receiver;
    std::any before;
    if (!creator && op.kind == OperationKind::mutator && op.postcondition) before = *receiver;
    // A call only reports invariant breakage it caused.
    const bool invariant_held =
        creator || !subject.invariant || !subject.invariant(*receiver).has_value();

    CallResult result;
    try {
        result = op.body(target, args);
    } catch (const Raised& raised) {
        const bool declared = op.declared_failures.contains(raised.token);
        fail(declared ? FailureKind::declared : FailureKind::undeclared, raised.token);
    } catch (const std::out_of_range&) {
        fail(FailureKind::undeclared, "out_of_range");
    } catch (const std::length_error&) {
        fail(FailureKind::undeclared, "length_error");
    } catch (const std::exception&) {
        fail(FailureKind::undeclared, "exception");
    }
    if (out.failure) return out;

    if (op.postcondition) {
        const std::any& old = op.kind == OperationKind::mutator ? before : target;
        if (auto clause = op.postcondition(old, target, args, result))
            fail(FailureKind::postcondition, std::move(*clause));
    }
    if (!out.failure && invariant_held && subject.invariant) {
        if (auto clause = subject.invariant(target)) fail(FailureKind::invariant, std::move(*clause));
    }
    if (creator) out.created = std::move(fresh);
    return out;
}

struct Candidate {
    std::size_t subject;
    std::size_t op;
};

}  // namespace

SessionTrace run_session_trace(std::span<const Subject> subjects, const SessionConfig& cfg) {
    if (cfg.draws < 1) throw std::invalid_argument("run_session: draws must be >= 1");
    if (subjects.empty()) throw std::invalid_argument("run_session: no subjects");
    if (cfg.int_min > cfg.int_max) throw std::invalid_argument("run_session: empty integer range");
    const bool has_creator = std::any_of(subjects.begin(), subjects.end(), [](const Subject& s) {
        return std::any_of(s.operations.begin(), s.operations.end(),
                           [](const SubjectOperation& op) { return !op.needs_pool(); });
    });
    if (!has_creator) throw std::invalid_argument("run_session: no creator without pooled slots");

    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(cfg.session_id)));
    std::deque<std::any> objects;  // stable addresses while args point into it
    std::vector<std::vector<std::any*>> by_subject(subjects.size());

    SessionTrace trace;
    trace.callable_per_round.reserve(static_cast<std::size_t>(cfg.draws));
    std::vector<Candidate> callable;
    std::vector<Arg> args;

    for (std::int64_t round = 1; round <= cfg.draws; ++round) {
        callable.clear();
        for (std::size_t s = 0; s < subjects.size(); ++s) {
            for (std::size_t o = 0; o < subjects[s].operations.size(); ++o) {
                if (!subjects[s].operations[o].needs_pool() || !by_subject[s].empty())
                    callable.push_back({s, o});
            }
        }
        trace.callable_per_round.push_back(static_cast<std::uint32_t>(callable.size()));
        const auto pick = callable[rng.below(callable.size())];
        const Subject& subject = subjects[pick.subject];
        const SubjectOperation& op = subject.operations[pick.op];
        auto& pool = by_subject[pick.subject];

        std::any* receiver = nullptr;
        if (op.kind != OperationKind::creator) receiver = pool[rng.below(pool.size())];
        args.clear();
        for (auto slot : op.slots) {
            switch (slot) {
                case SlotKind::integer: args.emplace_back(rng.between(cfg.int_min, cfg.int_max)); break;
                case SlotKind::boolean: args.emplace_back(rng.below(2) == 1); break;
                case SlotKind::object: args.emplace_back(pool[rng.below(pool.size())]); break;
            }
        }

        auto outcome = execute(subject, op, receiver, args, round, cfg.policy);
        if (outcome.failure) trace.failures.push_back(std::move(*outcome.failure));
        if (outcome.created) {
            objects.push_back(std::move(*outcome.created));
            pool.push_back(&objects.back());
        }
    }
    trace.pool_size = objects.size();
    return trace;
}

std::vector<FailureEvent> run_session(std::span<const Subject> subjects, const SessionConfig& cfg) {
    auto trace = run_session_trace(subjects, cfg);
    std::vector<FailureEvent> events;
    events.reserve(trace.failures.size());
    for (auto& f : trace.failures)
        events.push_back({cfg.session_id, f.test_index, std::move(f.signature), f.counted});
    return events;
}

namespace {

class Explorer {
public:
    Explorer(const Subject& subject, const ExplorationConfig& cfg) : subject_(subject), cfg_(cfg) {}

    std::set<std::string> run() {
        std::vector<std::any> pool;
        visit(pool, cfg_.depth);
        return std::move(found_);
    }

private:
    std::string key(const std::vector<std::any>& pool) const {
        std::vector<std::string> parts;
        parts.reserve(pool.size());
        for (const auto& o : pool) parts.push_back(subject_.describe(o));
        std::sort(parts.begin(), parts.end());
        std::string k;
        for (const auto& p : parts) k.append(p).push_back('|');
        return k;
    }

    void visit(const std::vector<std::any>& pool, int remaining) {
        const auto here = key(pool);
        auto [it, inserted] = seen_.try_emplace(here, remaining);
        if (!inserted) {
            if (it->second >= remaining) return;
            it->second = remaining;
        }
        if (remaining == 0) return;

        for (const auto& op : subject_.operations) {
            if (op.needs_pool() && pool.empty()) continue;
            const std::size_t receivers = op.kind == OperationKind::creator ? 1 : pool.size();
            for (std::size_t r = 0; r < receivers; ++r) {
                std::vector<std::size_t> choice(op.slots.size(), 0);
                while (true) {
                    try_call(pool, op, r, choice, here, remaining);
                    if (!advance(op, pool.size(), choice)) break;
                }
            }
        }
    }

    std::size_t slot_width(SlotKind slot, std::size_t pool_size) const {
        switch (slot) {
            case SlotKind::integer: return cfg_.integers.size();
            case SlotKind::boolean: return 2;
            case SlotKind::object: return pool_size;
        }
        return 0;
    }

    bool advance(const SubjectOperation& op, std::size_t pool_size,
                 std::vector<std::size_t>& choice) const {
        for (std::size_t i = 0; i < choice.size(); ++i) {
            if (++choice[i] < slot_width(op.slots[i], pool_size)) return true;
            choice[i] = 0;
        }
        return false;
    }

    void try_call(const std::vector<std::any>& pool, const SubjectOperation& op, std::size_t r,
                  const std::vector<std::size_t>& choice, const std::string& here, int remaining) {
        for (std::size_t i = 0; i < op.slots.size(); ++i) {
            if (slot_width(op.slots[i], pool.size()) == 0) return;
        }
        std::vector<std::any> next = pool;
        std::vector<Arg> args;
        for (std::size_t i = 0; i < op.slots.size(); ++i) {
            switch (op.slots[i]) {
                case SlotKind::integer: args.emplace_back(cfg_.integers[choice[i]]); break;
                case SlotKind::boolean: args.emplace_back(choice[i] == 1); break;
                case SlotKind::object: args.emplace_back(&next[choice[i]]); break;
            }
        }
        std::any* receiver = op.kind == OperationKind::creator ? nullptr : &next[r];
        auto outcome = execute(subject_, op, receiver, args, 1, cfg_.policy);
        if (outcome.failure && outcome.failure->counted) found_.insert(outcome.failure->signature);
        if (outcome.created) next.push_back(std::move(*outcome.created));
        if (next.size() != pool.size() || key(next) != here) visit(next, remaining - 1);
    }

    const Subject& subject_;
    const ExplorationConfig& cfg_;
    std::unordered_map<std::string, int> seen_;
    std::set<std::string> found_;
};

}  // namespace

std::set<std::string> enumerate_reachable_signatures(const Subject& subject,
                                                     const ExplorationConfig& cfg) {
    if (!subject.describe) throw std::invalid_argument("subject has no state description");
    return Explorer(subject, cfg).run();
}

}  // namespace rtg::harness
