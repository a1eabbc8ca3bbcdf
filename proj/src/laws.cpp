#include "fplab/laws.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

namespace fplab::laws {

namespace {

// node values from centered cell averages of a CDF, rescaled to unit
// trapezoid mass
SpectralMeasure from_cdf_nodes(std::vector<double> nodes,
                               const std::function<double(double)>& cdf) {
  const std::size_t n = nodes.size();
  if (n < 2) throw std::invalid_argument("law grid needs at least two nodes");
  const double a = nodes.front(), b = nodes.back();
  std::vector<double> dens(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double left = (i == 0) ? a : 0.5 * (nodes[i - 1] + nodes[i]);
    const double right = (i + 1 == n) ? b : 0.5 * (nodes[i] + nodes[i + 1]);
    dens[i] = std::max(0.0, (cdf(right) - cdf(left)) / (right - left));
  }
  double mass = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i)
    mass += 0.5 * (dens[i] + dens[i + 1]) * (nodes[i + 1] - nodes[i]);
  for (double& v : dens) v /= mass;
  return SpectralMeasure::grid_nodes(std::move(nodes), std::move(dens));
}

SpectralMeasure from_cdf(double a, double b, std::size_t n,
                         const std::function<double(double)>& cdf) {
  if (n < 2) throw std::invalid_argument("law grid needs at least two nodes");
  std::vector<double> nodes(n);
  for (std::size_t i = 0; i < n; ++i)
    nodes[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  nodes.back() = b;
  return from_cdf_nodes(std::move(nodes), cdf);
}

}  // namespace

SpectralMeasure semicircle(double variance, std::size_t n) {
  if (!(variance > 0.0)) throw std::invalid_argument("semicircle variance must be positive");
  const double s = std::sqrt(variance);
  const double edge = 2.0 * s;
  auto cdf = [s, edge](double t) {
    const double x = std::min(std::max(t, -edge), edge);
    const double r = std::sqrt(std::max(0.0, edge * edge - x * x));
    return 0.5 + x * r / (4.0 * M_PI * s * s) + std::asin(x / edge) / M_PI;
  };
  return from_cdf(-edge, edge, n, cdf);
}

SpectralMeasure quarter_circle(std::size_t n) {
  auto cdf = [](double t) {
    const double x = std::min(std::max(t, 0.0), 2.0);
    const double r = std::sqrt(std::max(0.0, 4.0 - x * x));
    return (x * r / 2.0 + 2.0 * std::asin(x / 2.0)) / M_PI;
  };
  return from_cdf(0.0, 2.0, n, cdf);
}

SpectralMeasure marchenko_pastur(double ratio, std::size_t n) {
  if (!(ratio > 0.0) || ratio > 1.0)
    throw std::invalid_argument(
        "marchenko_pastur ratio must lie in (0,1]; larger ratios carry an atom "
        "at 0 that a grid density cannot represent");
  const double c = ratio;
  const double sc = std::sqrt(c);
  const double a = (1.0 - sc) * (1.0 - sc);
  const double b = (1.0 + sc) * (1.0 + sc);
  // with x = 1 + c - 2 sqrt(c) cos(phi) the density pulls back to the smooth
  // integrand 2 sin^2(phi) / (pi (1 + c - 2 sqrt(c) cos phi)) on [0, pi];
  // integrate it by Gauss-Legendre to get the CDF (for c = 1 this is
  // (phi + sin phi)/pi exactly, used as a fast path)
  if (c == 1.0) {
    auto cdf = [](double t) {
      const double x = std::min(std::max(t, 0.0), 4.0);
      const double phi = 2.0 * std::asin(std::sqrt(x) / 2.0);
      return (phi + std::sin(phi)) / M_PI;
    };
    // the density blows up like x^{-1/2} at the hard edge 0; a quadratically
    // graded mesh keeps the per-cell mass flat so downstream quadrature stays
    // accurate there
    std::vector<double> nodes(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double u = static_cast<double>(i) / static_cast<double>(n - 1);
      nodes[i] = 4.0 * u * u;
    }
    nodes.back() = 4.0;
    return from_cdf_nodes(std::move(nodes), cdf);
  }
  static const double gl_x[8] = {
      -0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
      -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
      0.7966664774136267,  0.9602898564975363};
  static const double gl_w[8] = {
      0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
      0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
      0.2223810344533745, 0.1012285362903763};
  auto phi_of = [c, sc](double x) {
    const double cosphi = (1.0 + c - x) / (2.0 * sc);
    return std::acos(std::min(1.0, std::max(-1.0, cosphi)));
  };
  auto cdf = [c, sc, a, b, phi_of](double t) {
    const double x = std::min(std::max(t, a), b);
    const double hi = phi_of(x);
    // 64 panels of 8-point Gauss-Legendre on the smooth pullback
    double total = 0.0;
    const int panels = 64;
    for (int p = 0; p < panels; ++p) {
      const double lo = hi * p / panels, up = hi * (p + 1) / panels;
      const double mid = 0.5 * (lo + up), half = 0.5 * (up - lo);
      for (int q = 0; q < 8; ++q) {
        const double phi = mid + half * gl_x[q];
        const double s2 = std::sin(phi) * std::sin(phi);
        total += half * gl_w[q] * 2.0 * s2 / (M_PI * (1.0 + c - 2.0 * sc * std::cos(phi)));
      }
    }
    return total;
  };
  return from_cdf(a, b, n, cdf);
}

SpectralMeasure arcsine(std::size_t n) {
  auto cdf = [](double t) {
    const double x = std::min(std::max(t, -2.0), 2.0);
    return 0.5 + std::asin(x / 2.0) / M_PI;
  };
  return from_cdf(-2.0, 2.0, n, cdf);
}

SpectralMeasure uniform(double a, double b, std::size_t n) {
  if (!(a < b)) throw std::invalid_argument("uniform law needs a < b");
  return SpectralMeasure::grid(a, b, std::vector<double>(n, 1.0 / (b - a)));
}

SpectralMeasure point(double c) { return SpectralMeasure::from_atoms({{c, 1.0}}); }

SpectralMeasure two_point(double p, double a, double b) {
  if (!(p > 0.0) || !(p < 1.0))
    throw std::invalid_argument("two_point weight must lie in (0,1)");
  if (a == b) throw std::invalid_argument("two_point locations must differ");
  return SpectralMeasure::from_atoms({{a, p}, {b, 1.0 - p}});
}

SpectralMeasure by_name(const std::string& name, const std::vector<double>& params,
                        std::size_t n) {
  auto need = [&](std::size_t count) {
    if (params.size() != count)
      throw std::invalid_argument("law '" + name + "' expects " +
                                  std::to_string(count) + " parameter(s)");
  };
  if (name == "semicircle") { need(1); return semicircle(params[0], n); }
  if (name == "quarter_circle") { need(0); return quarter_circle(n); }
  if (name == "marchenko_pastur") { need(1); return marchenko_pastur(params[0], n); }
  if (name == "arcsine") { need(0); return arcsine(n); }
  if (name == "uniform") { need(2); return uniform(params[0], params[1], n); }
  if (name == "point") { need(1); return point(params[0]); }
  if (name == "two_point") { need(3); return two_point(params[0], params[1], params[2]); }
  throw std::invalid_argument("unknown law '" + name + "'");
}

}  // namespace fplab::laws
