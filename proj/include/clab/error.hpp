#pragma once

#include <stdexcept>
#include <string>

namespace clab {

// Bad arguments or violated type invariants. The CLI maps this to exit code 1.
class InvalidInput : public std::invalid_argument {
public:
    explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

// An operation was called outside its hypotheses (e.g. eps >= tau(e)).
class PreconditionViolation : public InvalidInput {
public:
    explicit PreconditionViolation(const std::string& what) : InvalidInput(what) {}
};

// Results that should be impossible for correct inputs: a box inner product
// far below zero, g exceeding mu, ... The CLI maps this to exit code 2.
class InternalInconsistency : public std::runtime_error {
public:
    explicit InternalInconsistency(const std::string& what) : std::runtime_error(what) {}
};

class NumericalFailure : public InternalInconsistency {
public:
    explicit NumericalFailure(const std::string& what) : InternalInconsistency(what) {}
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw InvalidInput(msg);
}

}  // namespace clab
