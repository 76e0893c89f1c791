#ifndef BLOWUP_ERRORS_HPP
#define BLOWUP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace blowup {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonzeroRemainder : Error { using Error::Error; };
struct NonInvariantAxis : Error { using Error::Error; };
struct AxisHit : Error { using Error::Error; };
struct NonMonotone : Error { using Error::Error; };
struct OutOfRange : Error { using Error::Error; };
struct UnboundedTail : Error { using Error::Error; };
struct NonHyperbolic : Error { using Error::Error; };
struct NegativeTimeOutsideEu : Error { using Error::Error; };
struct EtaRatioTooSmall : Error { using Error::Error; };
struct OutOfBall : Error { using Error::Error; };
struct NoContraction : Error { using Error::Error; };
struct MaxIter : Error { using Error::Error; };
struct SingularChart : Error { using Error::Error; };
struct AxisApproach : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

}  // namespace blowup

#endif
