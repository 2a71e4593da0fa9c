// errors.hpp -- exception taxonomy used across the toolkit
#ifndef DECS_ERRORS_HPP
#define DECS_ERRORS_HPP

#include <stdexcept>

namespace decs {

// Unreadable or syntactically bad input files.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Well-formed input with no solution, e.g. an empty supremal language.
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace decs

#endif
