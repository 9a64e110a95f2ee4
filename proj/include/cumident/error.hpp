#pragma once

#include <stdexcept>
#include <string>

namespace cumident {

// Every failure raised by the library derives from Error. The CLI maps the
// subclasses onto process exit codes (parse 2, numeric 3, labeling 4).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input: bad dimensions, non-finite values, unparsable files.
class InputError : public Error {
public:
    using Error::Error;
};

// Invalid option or configuration value supplied by the caller.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Singular or ill-conditioned linear algebra, eigen-solver failure.
class NumericError : public Error {
public:
    NumericError(const std::string& what, double condition = 0.0)
        : Error(what), condition_(condition) {}
    double condition() const noexcept { return condition_; }

private:
    double condition_;
};

// Permutation labeling could not pick a unique assignment.
class LabelingError : public Error {
public:
    using Error::Error;
};

}  // namespace cumident
