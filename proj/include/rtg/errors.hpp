#pragma once

#include <stdexcept>
#include <string>

namespace rtg {

/// Event log or curve file that violates its format or invariants.
class MalformedLog : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Model evaluated outside its domain (e.g. negative powers at x = 0).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Rational model whose denominator vanishes at the requested point.
class PoleError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Request beyond what an exact method can handle (use simulation instead).
class CapacityError : public std::length_error {
public:
    using std::length_error::length_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace rtg
