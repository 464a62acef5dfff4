#pragma once

#include <stdexcept>
#include <string>

namespace gmfkit {

// Sizes of vectors, matrices or index tuples disagree with the declared dimension.
struct DimensionError : std::invalid_argument {
    explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

// Input document is well-formed JSON but does not follow the expected schema.
struct SchemaError : std::runtime_error {
    explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

// The numerical eigensolver failed to converge.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gmfkit
