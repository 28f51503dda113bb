#pragma once

#include <stdexcept>
#include <string>

namespace autgroup {

// Three families, mirrored by the CLI exit codes (2, 3, 4).

/// Malformed input text or arguments.
class ParseError : public std::runtime_error {
public:
  explicit ParseError(std::string const &what) : std::runtime_error(what) {}
  ParseError(std::size_t line, std::string const &reason)
      : std::runtime_error("line " + std::to_string(line) + ": " + reason),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_ = 0;
};

/// An operation was called outside its domain.
class PreconditionError : public std::runtime_error {
public:
  explicit PreconditionError(std::string const &what)
      : std::runtime_error(what) {}
};

/// A computed certificate failed its own check. Always a defect.
class VerificationError : public std::runtime_error {
public:
  explicit VerificationError(std::string const &what)
      : std::runtime_error(what) {}
};

#define AUTGROUP_DEFINE_ERROR(Name, Base)                                      \
  class Name : public Base {                                                   \
  public:                                                                      \
    using Base::Base;                                                          \
  }

AUTGROUP_DEFINE_ERROR(MalformedCycle, ParseError);
AUTGROUP_DEFINE_ERROR(IncompleteTable, ParseError);

AUTGROUP_DEFINE_ERROR(DegreeMismatch, PreconditionError);
AUTGROUP_DEFINE_ERROR(NotConjugate, PreconditionError);
AUTGROUP_DEFINE_ERROR(ParityUnachievable, PreconditionError);
AUTGROUP_DEFINE_ERROR(NotTransitive, PreconditionError);
AUTGROUP_DEFINE_ERROR(BadBlockStructure, PreconditionError);
AUTGROUP_DEFINE_ERROR(NonConvergence, PreconditionError);
AUTGROUP_DEFINE_ERROR(LetterOutOfRange, PreconditionError);
AUTGROUP_DEFINE_ERROR(NotLetterIndependent, PreconditionError);
AUTGROUP_DEFINE_ERROR(NotInvertible, PreconditionError);
AUTGROUP_DEFINE_ERROR(SameOrders, PreconditionError);
AUTGROUP_DEFINE_ERROR(EdgeCase, PreconditionError);
AUTGROUP_DEFINE_ERROR(HypothesisFailed, PreconditionError);
AUTGROUP_DEFINE_ERROR(NotPrimitiveTuple, PreconditionError);
AUTGROUP_DEFINE_ERROR(AlphabetMismatch, PreconditionError);
AUTGROUP_DEFINE_ERROR(SizeGuard, PreconditionError);

AUTGROUP_DEFINE_ERROR(WitnessNotFound, VerificationError);

#undef AUTGROUP_DEFINE_ERROR

} // namespace autgroup
