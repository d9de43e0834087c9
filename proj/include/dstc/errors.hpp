#pragma once

#include <stdexcept>
#include <string>

namespace dstc {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A root or inverse that does not exist for the given arguments.
class NoSolutionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// State left the region of attraction {V <= c}; the trigger guarantees are void.
class RegionViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parameter synthesis could not certify a set.
class SynthesisError : public std::runtime_error {
public:
    SynthesisError(const std::string& what, double epsilon)
        : std::runtime_error(what), epsilon_(epsilon) {}

    [[nodiscard]] double epsilon() const noexcept { return epsilon_; }

private:
    double epsilon_;
};

/// Non-finite state or other numerical breakdown during integration.
class IntegrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An operation was invoked outside its contract (e.g. a jump off the jump set).
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Invalid experiment configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace dstc
