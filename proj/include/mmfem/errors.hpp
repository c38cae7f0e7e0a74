#pragma once

#include <stdexcept>
#include <string>

namespace mmfem {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define MMFEM_DEFINE_ERROR(Name)                 \
    class Name : public Error {                  \
    public:                                      \
        explicit Name(const std::string& what)   \
            : Error(#Name ": " + what) {}        \
    };

MMFEM_DEFINE_ERROR(DivisionByZeroDual)
MMFEM_DEFINE_ERROR(DomainError)
MMFEM_DEFINE_ERROR(IndexError)
MMFEM_DEFINE_ERROR(SingularCollapse)
MMFEM_DEFINE_ERROR(UnsupportedDegree)
MMFEM_DEFINE_ERROR(DegenerateCell)
MMFEM_DEFINE_ERROR(BadIndex)
MMFEM_DEFINE_ERROR(ParseError)
MMFEM_DEFINE_ERROR(InvalidParam)
MMFEM_DEFINE_ERROR(SingularLimit)
MMFEM_DEFINE_ERROR(SpaceMismatch)
MMFEM_DEFINE_ERROR(SingularEdge)
MMFEM_DEFINE_ERROR(DegenerateFace)
MMFEM_DEFINE_ERROR(NotPositiveDefinite)
MMFEM_DEFINE_ERROR(NonConvergence)
MMFEM_DEFINE_ERROR(PointOutsideMesh)
MMFEM_DEFINE_ERROR(ConfigError)

#undef MMFEM_DEFINE_ERROR

}  // namespace mmfem
