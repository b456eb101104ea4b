// errors.hpp: exception types shared by the library and the CLI

#pragma once

#include <stdexcept>
#include <string>

namespace nltc {

// Argument outside the mathematical domain of an operation (n < -1/2, N <= 0, ...).
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// Fock-space truncation too small for the requested state or evolution.
class TruncationError : public std::runtime_error {
public:
    explicit TruncationError(const std::string& what) : std::runtime_error(what) {}
};

// Fractional-revival closed forms are only defined for odd k.
class ParityError : public std::invalid_argument {
public:
    explicit ParityError(const std::string& what) : std::invalid_argument(what) {}
};

// Dense oracle size limit or two-mode memory guard.
class SizeGuardError : public std::length_error {
public:
    explicit SizeGuardError(const std::string& what) : std::length_error(what) {}
};

// No admissible mean quantum number realises the requested gate angle.
class ThetaMismatchError : public std::runtime_error {
public:
    explicit ThetaMismatchError(const std::string& what) : std::runtime_error(what) {}
};

// Density matrix outside tolerance (non-Hermitian, non-PSD, wrong trace) or
// mismatched dimensions between two states.
class InvalidStateError : public std::invalid_argument {
public:
    explicit InvalidStateError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace nltc
