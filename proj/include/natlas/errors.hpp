// Error taxonomy for the toolkit.
//
// Every domain error derives from Error and carries a stable code string plus
// a category: Validation errors are caller mistakes (bad parameters, excluded
// domains) and map to CLI exit code 2; Numeric errors are runtime failures of
// a computation (escape to infinity, missing crossings) and map to exit 3.

#pragma once

#include <stdexcept>
#include <string>

namespace natlas {

class Error : public std::runtime_error {
public:
    enum class Category { Validation, Numeric };

    Error(std::string code, Category cat, const std::string& what)
        : std::runtime_error(code + ": " + what), code_(std::move(code)), cat_(cat) {}

    const std::string& code() const { return code_; }
    Category category() const { return cat_; }

private:
    std::string code_;
    Category cat_;
};

#define NATLAS_ERROR(Name, Cat)                                          \
    class Name : public Error {                                          \
    public:                                                              \
        explicit Name(const std::string& what)                           \
            : Error(#Name, Category::Cat, what) {}                       \
    }

// charts
NATLAS_ERROR(NotNilpotentAtInfinity, Validation);
NATLAS_ERROR(NotSaddleType, Validation);
NATLAS_ERROR(NonIsolatedSingularities, Validation);
// blowup
NATLAS_ERROR(DegenerateBlowup, Validation);
NATLAS_ERROR(UnknownChart, Validation);
NATLAS_ERROR(DivisionByZero, Validation);
NATLAS_ERROR(NonpositiveArgument, Validation);
// integrate
NATLAS_ERROR(BlowupDetected, Numeric);
NATLAS_ERROR(StepUnderflow, Numeric);
NATLAS_ERROR(NoCrossing, Numeric);
NATLAS_ERROR(TangentialCrossing, Numeric);
// maps
NATLAS_ERROR(NoReturn, Numeric);
NATLAS_ERROR(NotASaddle, Validation);
NATLAS_ERROR(NonpositiveEta, Validation);
// verify
NATLAS_ERROR(ExcludedB, Validation);
NATLAS_ERROR(SingularOnParabola, Validation);
NATLAS_ERROR(UnresolvedConnection, Numeric);

#undef NATLAS_ERROR

} // namespace natlas
