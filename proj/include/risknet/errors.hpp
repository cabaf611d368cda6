#pragma once

#include <stdexcept>
#include <string>

namespace risknet {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define RISKNET_DEFINE_ERROR(Name)              \
    class Name : public Error {                 \
    public:                                     \
        using Error::Error;                     \
    }

// market
RISKNET_DEFINE_ERROR(NoCashDirection);
RISKNET_DEFINE_ERROR(RankDeficient);
RISKNET_DEFINE_ERROR(IndexOutOfRange);
RISKNET_DEFINE_ERROR(InvalidArgument);

// risk measures
RISKNET_DEFINE_ERROR(NotInHull);
RISKNET_DEFINE_ERROR(NonPositiveAffinity);

// trading
RISKNET_DEFINE_ERROR(SolverDiverged);
RISKNET_DEFINE_ERROR(InvalidTaker);

// coordinate descent
RISKNET_DEFINE_ERROR(SubsetTooSmall);

// graphs
RISKNET_DEFINE_ERROR(InvalidParams);
RISKNET_DEFINE_ERROR(UnsupportedKind);
RISKNET_DEFINE_ERROR(Disconnected);

// experiments
RISKNET_DEFINE_ERROR(EmptyInput);
RISKNET_DEFINE_ERROR(ParseError);
RISKNET_DEFINE_ERROR(ValidationError);
RISKNET_DEFINE_ERROR(IoError);

#undef RISKNET_DEFINE_ERROR

}  // namespace risknet
