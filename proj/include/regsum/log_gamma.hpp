#pragma once

#include "regsum/rational.hpp"
#include "regsum/real.hpp"

namespace regsum {

/* log Gamma(x) for rational x in (0, 1], via an argument-shifted Stirling
 * series with exact Bernoulli coefficients. Absolute error < 2^-(prec+8). */
Real log_gamma(const Rational& x, mpfr_prec_t prec);

/* Independent second method (mpfr_lngamma), same domain. */
Real log_gamma_reference(const Rational& x, mpfr_prec_t prec);

}  // namespace regsum
