#pragma once

#include <stdexcept>
#include <string>

namespace sonarfusion {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or invalid scenario input.
class ScenarioError : public Error {
 public:
  using Error::Error;
};

/// Violated precondition on a model-construction call (duplicate ids,
/// inconsistent polarity, bad parameters).
class ModelError : public Error {
 public:
  using Error::Error;
};

/// Inference could not produce an answer (impossible evidence, degenerate
/// sampling weights, exceeded budget).
class InferenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace sonarfusion
