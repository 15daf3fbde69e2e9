#pragma once

#include "sdcalc/dual.hpp"
#include "sdcalc/series.hpp"

namespace sdcalc {

using D1 = Dual<double>;
using D2 = Dual<D1>;
using D3 = Dual<D2>;
using D4 = Dual<D3>;
using D5 = Dual<D4>;
using SD1 = Dual<Series>;
using SD2 = Dual<SD1>;

}  // namespace sdcalc

// The closed set of scalar types charts and fields must be evaluable at.
// Duals to depth 5 cover nested directional derivatives (up to fifth-order
// geometric information); Series and its dual liftings drive the
// boundary-layer expansions.
#define SDCALC_FOR_EACH_SCALAR(X) \
    X(double)                     \
    X(::sdcalc::D1)               \
    X(::sdcalc::D2)               \
    X(::sdcalc::D3)               \
    X(::sdcalc::D4)               \
    X(::sdcalc::D5)               \
    X(::sdcalc::Series)           \
    X(::sdcalc::SD1)              \
    X(::sdcalc::SD2)
