#pragma once

#include <stdexcept>
#include <string>

namespace fieldrank {

// Malformed or inconsistent on-disk data (CSV, manifests, model files).
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure (non-finite values, failed factorization).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace fieldrank
