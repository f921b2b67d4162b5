#pragma once

#include "rdlab/field.hpp"

namespace rdlab {

/// amp * exp(-(x-center)^2 / (2 width^2))
Field gaussian_profile(const Grid1D& g, double amp, double width, double center = 0.0);

/// Smooth compactly supported bump: amp * exp(1 - 1/(1 - (x/halfwidth)^2))
/// inside |x| < halfwidth, zero outside. Peak value is amp at x = 0.
Field bump_profile(const Grid1D& g, double amp, double halfwidth);

Field constant_profile(const Grid1D& g, double value);

}  // namespace rdlab
