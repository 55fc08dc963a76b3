#pragma once

#include <stdexcept>
#include <string>

namespace safeset {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid OSS declaration or system parameters.
class SpecError : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

// Covering set would exceed the configured centroid limit.
class CapacityError : public Error {
public:
    using Error::Error;
};

// Probability or confidence coefficient outside (0, 1].
class DomainError : public Error {
public:
    using Error::Error;
};

class EmptySetError : public Error {
public:
    using Error::Error;
};

// Two centroid sets are not expressed over the same grid.
class GridMismatchError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace safeset
