#pragma once
// Catalog of closed-form reference laws. Grid laws are built by cell-
// averaging the exact CDF (never by sampling the density pointwise, which
// breaks down at square-root edges and the MP hard edge), then rescaled so
// the trapezoid mass is exactly one.

#include "fplab/spectral_measure.hpp"

namespace fplab::laws {

inline constexpr std::size_t kDefaultGridNodes = 4096;

// semicircle with the given variance: density sqrt(4v - t^2)/(2 pi v)
SpectralMeasure semicircle(double variance, std::size_t n = kDefaultGridNodes);

// law of the positive part of a circular element: density sqrt(4 - t^2)/pi
// on [0, 2], second moment 1
SpectralMeasure quarter_circle(std::size_t n = kDefaultGridNodes);

// Marchenko-Pastur with ratio c in (0, 1]; c > 1 would add an atom at 0,
// which the grid representation cannot carry, so it is rejected
SpectralMeasure marchenko_pastur(double ratio, std::size_t n = kDefaultGridNodes);

// arcsine law on [-2, 2] (the law of u + u* for a Haar unitary u)
SpectralMeasure arcsine(std::size_t n = kDefaultGridNodes);

SpectralMeasure uniform(double a, double b, std::size_t n = kDefaultGridNodes);

SpectralMeasure point(double c);

// weight p at a, weight 1-p at b
SpectralMeasure two_point(double p, double a, double b);

// look up by name with positional parameters, for CLI/config use;
// names: semicircle(v), quarter_circle, marchenko_pastur(c), arcsine,
// uniform(a,b), point(c), two_point(p,a,b)
SpectralMeasure by_name(const std::string& name, const std::vector<double>& params,
                        std::size_t n = kDefaultGridNodes);

}  // namespace fplab::laws
