#pragma once

#include <stdexcept>
#include <string>

namespace avwave {

// Precondition violations use std::invalid_argument. NumericalError covers
// failures that depend on the numbers rather than the caller: singular
// transfers, non-converging quadrature, blow-up, acausal stages.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace avwave
