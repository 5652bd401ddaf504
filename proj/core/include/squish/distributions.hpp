#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace squish {

enum class NumericFamily : std::uint8_t { Uniform = 0, Gaussian = 1, Laplace = 2 };

std::string_view family_name(NumericFamily f) noexcept;

/// Continuous law used to weight bisection branches. Uniform is implicit
/// over whatever interval it is asked about; its mass is the interval width.
struct NumericLaw {
  NumericFamily family = NumericFamily::Uniform;
  double location = 0.0;
  double scale = 1.0;

  /// Pr(a < X <= b) for Gaussian/Laplace; b - a for Uniform. Tail masses
  /// are evaluated from the near side to limit cancellation.
  double mass(double a, double b) const;
  /// Density (Uniform returns 1).
  double density(double x) const;
  std::size_t parameter_count() const noexcept { return family == NumericFamily::Uniform ? 0 : 2; }

  friend bool operator==(const NumericLaw&, const NumericLaw&) = default;
};

/// Fraction of mass(lo, hi) that lies in (lo, mid]. Falls back to the
/// width ratio when the law assigns no representable mass to (lo, hi].
double left_share(const NumericLaw& law, double lo, double mid, double hi);

}  // namespace squish
