#pragma once

#include <stdexcept>
#include <string>

namespace n2c {

// Base class for all workbench errors so callers can catch one type at the
// CLI boundary while tests catch the specific subclasses.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ShapeMismatch : Error {
    using Error::Error;
};

}  // namespace n2c
