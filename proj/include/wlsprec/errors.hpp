#pragma once

#include <stdexcept>
#include <string>

namespace wlsprec {

// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class NotSymmetric : public Error {
public:
    using Error::Error;
};

class NotPositiveDefinite : public Error {
public:
    using Error::Error;
};

class NoConvergence : public Error {
public:
    using Error::Error;
};

class SingularMatrix : public Error {
public:
    using Error::Error;
};

class SingularTriangular : public SingularMatrix {
public:
    using SingularMatrix::SingularMatrix;
};

class SingularApproximation : public SingularMatrix {
public:
    using SingularMatrix::SingularMatrix;
};

class NotAdmissible : public Error {
public:
    using Error::Error;
};

class UnsupportedVariant : public Error {
public:
    using Error::Error;
};

class BreakdownDetected : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

} // namespace wlsprec
