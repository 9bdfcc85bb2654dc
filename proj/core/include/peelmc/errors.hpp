#pragma once

#include <stdexcept>

namespace peelmc {

// Rejected argument values: bad ensemble sizes, probabilities outside [0,1],
// parameters outside a formula's validity range.
class parameter_error : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Malformed external input (edge-list files, config files, tables).
class format_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A resource guard tripped (incidence cap, brute-force size cap).
class capacity_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A chain was asked to step too close to exhausting its vertex pool.
class horizon_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Internally inconsistent state handed to a step function.
class state_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A root finder or fixed-point iteration failed to converge or bracket.
class solver_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Filesystem failures while reading or writing experiment outputs.
class io_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace peelmc
