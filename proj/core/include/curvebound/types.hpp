#pragma once

#include <boost/multiprecision/float128.hpp>
#include <stdexcept>
#include <string>

namespace curvebound {

using quad = boost::multiprecision::float128;

// Input violates a documented precondition.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Factorization, convergence or root bracketing failed.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double pi = 3.14159265358979323846;

}  // namespace curvebound
