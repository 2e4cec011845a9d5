#pragma once

#include <complex>
#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>

namespace aga {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed presentation text. Line and column are 1-based.
class ParseError : public Error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& what)
        : Error(format(line, column, what)), line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    static std::string format(std::size_t line, std::size_t column, const std::string& what) {
        std::ostringstream os;
        os << "line " << line << ", column " << column << ": " << what;
        return os.str();
    }

    std::size_t line_;
    std::size_t column_;
};

/// A call violated a documented precondition (dimensions, ranges, sampling density...).
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// The principal logarithm was requested for a unitary with spectrum touching -1.
class BranchCutError : public Error {
public:
    explicit BranchCutError(std::complex<double> eigenvalue)
        : Error(format(eigenvalue)), eigenvalue_(eigenvalue) {}

    std::complex<double> eigenvalue() const noexcept { return eigenvalue_; }

private:
    static std::string format(std::complex<double> z) {
        std::ostringstream os;
        os.precision(17);
        os << "branch-cut violation: eigenvalue (" << z.real() << ", " << z.imag()
           << ") too close to -1";
        return os.str();
    }

    std::complex<double> eigenvalue_;
};

/// Numerical routine failed to meet its accuracy contract.
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace aga
