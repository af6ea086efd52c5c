#pragma once

#include <stdexcept>
#include <string>

namespace mfrac {

/// Cube boundaries do not line up with the cell grid.
class AlignmentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Exponent or generator parameter outside its admissible range.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Grid dimension or level mismatch between operands.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Requested cube family does not exist in this dimension.
class UnsupportedFamilyError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Truncation removed every admissible cube.
class EmptyFamilyError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Evaluation refused: kernel-term count above the configured cap.
class CostCapError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Config file failed schema validation.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

} // namespace mfrac
