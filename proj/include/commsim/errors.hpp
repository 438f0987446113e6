#pragma once

#include <stdexcept>

namespace commsim {

/// A protocol emitted an action its communication model forbids.
class ModelViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A protocol exhausted the round budget or deadlocked without declaring.
class NonTerminatingProtocol : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An input broke a problem's promise (e.g. |x & y| > 1 for 2-DISJ).
class PromiseViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A protocol hit an internal inconsistency, such as an undecodable payload.
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Symmetrization was asked to run over a distribution that failed the
/// exchangeability check.
class AsymmetricDistribution : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace commsim
