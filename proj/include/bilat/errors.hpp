#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bilat {

// Every failure raised by the library derives from Error so callers can
// catch the family at once and still dispatch on the concrete type.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NotSkew : public Error {
public:
    using Error::Error;
};

// Rotation angle too close to pi for a unique principal logarithm.
class NearPi : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class SingularAndUndamped : public Error {
public:
    using Error::Error;
};

class IllConditioned : public Error {
public:
    IllConditioned(const std::string& what, double condition)
        : Error(what), condition_(condition) {}

    double condition() const { return condition_; }

private:
    double condition_;
};

class Diverged : public Error {
public:
    Diverged(const std::string& what, std::size_t step)
        : Error(what), step_(step) {}

    std::size_t step() const { return step_; }

private:
    std::size_t step_;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace bilat
