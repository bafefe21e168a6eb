#pragma once

#include <stdexcept>
#include <string>

namespace gtube {

// Malformed or inconsistent arguments (shape, dimension, index range).
class rejected_input : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A solvability condition failed; carries the size of the offending residual.
class obstruction_error : public std::runtime_error {
public:
    obstruction_error(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

// A matrix that had to be inverted was singular at the requested point.
class singular_error : public std::runtime_error {
public:
    singular_error(const std::string& what, double determinant)
        : std::runtime_error(what), determinant_(determinant) {}
    double determinant() const noexcept { return determinant_; }

private:
    double determinant_;
};

}  // namespace gtube
