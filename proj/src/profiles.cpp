#include "rdlab/profiles.hpp"

#include <cmath>
#include <stdexcept>

namespace rdlab {

Field gaussian_profile(const Grid1D& g, double amp, double width, double center) {
  if (!(width > 0.0)) throw std::invalid_argument("gaussian_profile: width must be positive");
  return Field::from_function(g, [=](double x) {
    const double z = (x - center) / width;
    return amp * std::exp(-0.5 * z * z);
  });
}

Field bump_profile(const Grid1D& g, double amp, double halfwidth) {
  if (!(halfwidth > 0.0)) throw std::invalid_argument("bump_profile: halfwidth must be positive");
  return Field::from_function(g, [=](double x) {
    const double z = x / halfwidth;
    const double z2 = z * z;
    if (z2 >= 1.0) return 0.0;
    return amp * std::exp(1.0 - 1.0 / (1.0 - z2));
  });
}

Field constant_profile(const Grid1D& g, double value) {
  return Field::from_function(g, [=](double) { return value; });
}

}  // namespace rdlab
