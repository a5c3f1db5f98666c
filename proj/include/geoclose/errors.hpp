#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "geoclose/element_set.hpp"

namespace geoclose {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class UnknownElement : public Error {
public:
    explicit UnknownElement(long long id)
        : Error("unknown element id " + std::to_string(id)), id_(id) {}
    explicit UnknownElement(const std::string& token)
        : Error("unknown element '" + token + "'"), id_(-1) {}
    long long id() const { return id_; }
private:
    long long id_;
};

/// Structural defect of a system: duplicate ids, out-of-range levels, a
/// generator that does not preserve levels, and the like.
class InvalidSystem : public Error {
public:
    using Error::Error;
};

class UniverseTooLarge : public Error {
public:
    UniverseTooLarge(int size, int bound)
        : Error("universe of size " + std::to_string(size) + " exceeds bound " + std::to_string(bound)) {}
};

class SearchBudgetExceeded : public Error {
public:
    explicit SearchBudgetExceeded(long long budget)
        : Error("search budget of " + std::to_string(budget) + " nodes exceeded") {}
};

class InvalidCertificate : public Error {
public:
    using Error::Error;
};

class NoGroup : public Error {
public:
    NoGroup() : Error("operation requires an automorphism group") {}
};

class NotSoftEI : public Error {
public:
    explicit NotSoftEI(Pos element)
        : Error("no real tuple is interalgebraic with element at position " + std::to_string(element)),
          element_(element) {}
    Pos element() const { return element_; }
private:
    Pos element_;
};

class NotInCarrier : public Error {
public:
    explicit NotInCarrier(Pos p)
        : Error("element at position " + std::to_string(p) + " is not in the slice carrier") {}
};

class RelationNotInvariant : public Error {
public:
    using Error::Error;
};

class NotEquivalence : public Error {
public:
    using Error::Error;
};

class ParameterUnknown : public Error {
public:
    using Error::Error;
};

/// Replayable failure of the exchange assumption: every tuple member has rank
/// one over `base` at `level`, the last member lies in the closure of the
/// others over `base` but not without the first, and the first member is not
/// in the closure of the rest.
struct ExchangeWitness {
    ElementSet base;
    int level = 0;
    std::vector<Pos> tuple;
    friend bool operator==(const ExchangeWitness&, const ExchangeWitness&) = default;
};

class ExchangeViolation : public Error {
public:
    explicit ExchangeViolation(ExchangeWitness w)
        : Error("exchange property violated"), witness_(std::move(w)) {}
    const ExchangeWitness& witness() const { return witness_; }
private:
    ExchangeWitness witness_;
};

/// A checked theorem failed on a system where its hypotheses were verified.
class TheoremContradiction : public Error {
public:
    using Error::Error;
};

}  // namespace geoclose
