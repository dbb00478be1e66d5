#pragma once

#include <stdexcept>
#include <string>

namespace mrnn {

// Shapes, ranges or options that cannot work together.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// NaN/Inf inputs, non-PD covariances, divergence.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A filter or cell state that violates its invariants.
class StateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnsupportedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace mrnn
