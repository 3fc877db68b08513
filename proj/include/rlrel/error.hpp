#pragma once

#include <stdexcept>
#include <string>

namespace rlrel {

// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Malformed input: missing columns, unparsable values, bad config keys.
class SchemaError : public Error {
public:
  using Error::Error;
};

// Input that parses but violates a data invariant (duplicates, too few points).
class ValidationError : public Error {
public:
  using Error::Error;
};

// A computation that cannot proceed on otherwise valid data.
class ComputeError : public Error {
public:
  using Error::Error;
};

} // namespace rlrel
