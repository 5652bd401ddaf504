#include "squish/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace squish {

std::string_view family_name(NumericFamily f) noexcept {
  switch (f) {
    case NumericFamily::Uniform: return "uniform";
    case NumericFamily::Gaussian: return "gaussian";
    case NumericFamily::Laplace: return "laplace";
  }
  return "unknown";
}

double NumericLaw::mass(double a, double b) const {
  if (!(b > a)) return 0.0;
  const double mu = location;
  switch (family) {
    case NumericFamily::Uniform:
      return b - a;
    case NumericFamily::Gaussian: {
      const double k = 1.0 / (scale * std::numbers::sqrt2);
      const double za = (a - mu) * k;
      const double zb = (b - mu) * k;
      if (a >= mu) return 0.5 * (std::erfc(za) - std::erfc(zb));
      if (b <= mu) return 0.5 * (std::erfc(-zb) - std::erfc(-za));
      return 1.0 - 0.5 * std::erfc(zb) - 0.5 * std::erfc(-za);
    }
    case NumericFamily::Laplace: {
      const double ea = (a - mu) / scale;
      const double eb = (b - mu) / scale;
      if (a >= mu) return 0.5 * (std::exp(-ea) - std::exp(-eb));
      if (b <= mu) return 0.5 * (std::exp(eb) - std::exp(ea));
      return 1.0 - 0.5 * std::exp(-eb) - 0.5 * std::exp(ea);
    }
  }
  return 0.0;
}

double NumericLaw::density(double x) const {
  switch (family) {
    case NumericFamily::Uniform:
      return 1.0;
    case NumericFamily::Gaussian: {
      const double z = (x - location) / scale;
      return std::exp(-0.5 * z * z) / (scale * std::sqrt(2.0 * std::numbers::pi));
    }
    case NumericFamily::Laplace:
      return std::exp(-std::fabs(x - location) / scale) / (2.0 * scale);
  }
  return 0.0;
}

double left_share(const NumericLaw& law, double lo, double mid, double hi) {
  const double left = law.mass(lo, mid);
  const double right = law.mass(mid, hi);
  const double total = left + right;
  if (!(total > 0.0) || !std::isfinite(total)) return (mid - lo) / (hi - lo);
  return std::clamp(left / total, 0.0, 1.0);
}

}  // namespace squish
