// SPDX-License-Identifier: MIT
//
// Error taxonomy shared by all fermicavity modules.
//
// DomainError   -> the request is outside the physical/mathematical domain of
//                  the routine (negative temperature, infeasible constraints,
//                  pole of a special function, ...).  CLI maps these to exit 1.
// NumericError  -> the request is legitimate but a numerical procedure failed
//                  to meet its tolerance (non-convergence, overflow that cannot
//                  be rescued, ...).  CLI maps these to exit 2.

#pragma once

#include <stdexcept>
#include <string>

namespace fermicavity {

class DomainError : public std::invalid_argument {
public:
    explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace fermicavity
