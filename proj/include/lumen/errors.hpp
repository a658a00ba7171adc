#pragma once

#include <stdexcept>
#include <string>

namespace lumen {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BoundsError : Error {
  using Error::Error;
};

// A caller broke the measure/score/record protocol (re-measurement, duplicate
// record, verdict for the wrong cell, double dispense, ...).
struct ProtocolViolation : Error {
  using Error::Error;
};

struct CapacityError : Error {
  using Error::Error;
};

struct ScaleError : Error {
  using Error::Error;
};

struct ArityError : Error {
  using Error::Error;
};

struct UsageError : Error {
  using Error::Error;
};

}  // namespace lumen
