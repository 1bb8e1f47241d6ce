#pragma once

#include <stdexcept>

namespace fracwalk {

// Base of all errors raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed or inconsistent inputs (bad files, shapes, ranges, preconditions).
struct ValidationError : Error {
    using Error::Error;
};

// Numerical failures of an otherwise well-posed computation
// (rank defects, non-integer distances, violated matrix conditions).
struct NumericalError : Error {
    using Error::Error;
};

#define FRACWALK_DEFINE_ERROR(NAME, BASE) \
    struct NAME : BASE {                  \
        using BASE::BASE;                 \
    };

FRACWALK_DEFINE_ERROR(InvalidArgument, ValidationError)
FRACWALK_DEFINE_ERROR(DisconnectedGraph, ValidationError)
FRACWALK_DEFINE_ERROR(VertexOutOfRange, ValidationError)
FRACWALK_DEFINE_ERROR(TooManyHiddenVertices, ValidationError)
FRACWALK_DEFINE_ERROR(InvalidAnchor, ValidationError)
FRACWALK_DEFINE_ERROR(DimensionMismatch, ValidationError)
FRACWALK_DEFINE_ERROR(ZeroRowSum, ValidationError)
FRACWALK_DEFINE_ERROR(InvalidStart, ValidationError)
FRACWALK_DEFINE_ERROR(EmptyObservableSet, ValidationError)
FRACWALK_DEFINE_ERROR(InsufficientData, ValidationError)
FRACWALK_DEFINE_ERROR(NonpositiveEntry, ValidationError)
FRACWALK_DEFINE_ERROR(DegenerateTriple, ValidationError)
FRACWALK_DEFINE_ERROR(DegeneratePair, ValidationError)
FRACWALK_DEFINE_ERROR(ParseError, ValidationError)
FRACWALK_DEFINE_ERROR(NonpositiveConductivity, ValidationError)

FRACWALK_DEFINE_ERROR(SingularGauge, NumericalError)
FRACWALK_DEFINE_ERROR(RankDeficient, NumericalError)
FRACWALK_DEFINE_ERROR(ConditionsViolated, NumericalError)
FRACWALK_DEFINE_ERROR(NotClassifiable, NumericalError)
FRACWALK_DEFINE_ERROR(NonIntegerDistance, NumericalError)
FRACWALK_DEFINE_ERROR(MetricViolation, NumericalError)
FRACWALK_DEFINE_ERROR(RankDefect, NumericalError)

#undef FRACWALK_DEFINE_ERROR

}  // namespace fracwalk
