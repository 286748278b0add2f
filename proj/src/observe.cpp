#include "lohe/observe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace lohe {

CorrelationMatrix correlations(std::span<const ComplexTensor> members) {
  const std::size_t n = members.size();
  CorrelationMatrix c;
  c.n = n;
  c.h.assign(n * n, Complex(0.0));
  c.gap.assign(n * n, Complex(0.0));
  for (std::size_t i = 0; i < n; ++i) {
    c.h[i * n + i] = frobenius_inner(members[i], members[i]);
    c.gap[i * n + i] = 1.0 - c.h[i * n + i];
    for (std::size_t j = i + 1; j < n; ++j) {
      const Complex hij = frobenius_inner(members[i], members[j]);
      const ComplexTensor diff = members[j] - members[i];
      const double re = 0.5 * frobenius_norm_sq(diff);
      const double im = -frobenius_inner(members[i], diff).imag();
      c.h[i * n + j] = hij;
      c.h[j * n + i] = std::conj(hij);
      c.gap[i * n + j] = Complex(re, im);
      c.gap[j * n + i] = Complex(re, -im);
    }
  }
  return c;
}

double order_parameter(std::span<const ComplexTensor> members) {
  return frobenius_norm(centroid(members));
}

PairMax diameter(std::span<const ComplexTensor> members) {
  PairMax best;
  for (std::size_t i = 0; i < members.size(); ++i)
    for (std::size_t j = i + 1; j < members.size(); ++j) {
      const double d = frobenius_distance(members[i], members[j]);
      if (d > best.value || (i == 0 && j == 1)) best = {d, i, j};
    }
  return best;
}

PairMax correlation_diameter(const CorrelationMatrix& c) {
  PairMax best;
  for (std::size_t i = 0; i < c.n; ++i)
    for (std::size_t j = i + 1; j < c.n; ++j) {
      const double v = std::abs(c.one_minus(i, j));
      if (v > best.value || (i == 0 && j == 1)) best = {v, i, j};
    }
  return best;
}

double lyapunov(const CorrelationMatrix& c) {
  const double lam = correlation_diameter(c).value;
  return lam * lam;
}

double generator_diameter(std::span<const SkewHermitianGenerator> generators) {
  double best = 0.0;
  for (std::size_t i = 0; i < generators.size(); ++i)
    for (std::size_t j = i + 1; j < generators.size(); ++j)
      best = std::max(best, frobenius_distance(generators[i].tensor(), generators[j].tensor()));
  return best;
}

Complex cross_ratio(const CorrelationMatrix& c, std::size_t i, std::size_t j, std::size_t k,
                    std::size_t l) {
  if (std::max({i, j, k, l}) >= c.n) throw InvalidInput("cross-ratio index out of range");
  const Complex d1 = c.one_minus(i, l);
  const Complex d2 = c.one_minus(k, j);
  if (std::abs(d1) <= kDegenerateTolerance || std::abs(d2) <= kDegenerateTolerance)
    throw DegenerateConfiguration("degenerate cross-ratio (" + std::to_string(i) + "," +
                                  std::to_string(j) + "," + std::to_string(k) + "," +
                                  std::to_string(l) + ")");
  return c.one_minus(i, j) * c.one_minus(k, l) / (d1 * d2);
}

std::vector<std::array<std::size_t, 4>> nondegenerate_tuples(const CorrelationMatrix& c) {
  std::vector<std::array<std::size_t, 4>> out;
  const std::size_t n = c.n;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) {
          if (i == j || i == k || i == l || j == k || j == l || k == l) continue;
          if (std::abs(c.one_minus(i, l)) <= kDegenerateTolerance ||
              std::abs(c.one_minus(k, j)) <= kDegenerateTolerance)
            continue;
          out.push_back({i, j, k, l});
        }
  return out;
}

double log_sum(const CorrelationMatrix& c) {
  double s = 0.0;
  for (std::size_t i = 0; i < c.n; ++i)
    for (std::size_t j = 0; j < c.n; ++j)
      if (i != j) s += std::log(std::abs(c.one_minus(i, j)));
  return s;
}

double rho_sq_rate(std::span<const ComplexTensor> members, double kappa0, double kappa1) {
  const ComplexTensor zc = centroid(members);
  const double rho2 = frobenius_norm_sq(zc);
  const double n = double(members.size());
  double a = 0.0, b = 0.0;
  for (const auto& z : members) {
    const Complex hic = frobenius_inner(z, zc);
    a += rho2 - std::norm(hic);
    b += hic.imag() * hic.imag();
  }
  return 2.0 * kappa0 / n * a + 4.0 * (kappa0 + kappa1) / n * b;
}

ObservableRecord observe(double t, std::span<const ComplexTensor> members,
                         std::span<const std::array<std::size_t, 4>> tuples) {
  ObservableRecord r;
  r.t = t;
  r.rho = order_parameter(members);
  r.diam_euclid = diameter(members).value;
  const CorrelationMatrix c = correlations(members);
  r.diam_corr = correlation_diameter(c).value;
  r.lyapunov = r.diam_corr * r.diam_corr;
  for (const auto& m : members) r.norm_drift = std::max(r.norm_drift, std::abs(frobenius_norm(m) - 1.0));
  r.cross_ratios.reserve(tuples.size());
  for (const auto& q : tuples) {
    try {
      r.cross_ratios.push_back(cross_ratio(c, q[0], q[1], q[2], q[3]));
    } catch (const DegenerateConfiguration&) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      r.cross_ratios.emplace_back(nan, nan);
    }
  }
  return r;
}

PhaseExtraction extract_phases(std::span<const Members> states, const Members& initial,
                               double tolerance) {
  const std::size_t n = initial.size();
  for (const auto& z : initial)
    if (std::abs(frobenius_norm(z) - 1.0) > kUnitNormTolerance)
      throw InvalidInput("initial members must have unit norm");
  PhaseExtraction out;
  std::vector<double> prev(n, 0.0);
  for (std::size_t k = 0; k < states.size(); ++k) {
    const Members& s = states[k];
    if (s.size() != n) throw InvalidInput("ensemble size changed along trajectory");
    std::vector<double> theta(n);
    double res = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double raw = std::arg(frobenius_inner(initial[j], s[j]));
      double step = std::remainder(raw - prev[j], 2.0 * std::numbers::pi);
      if (k == 0) step = raw;
      if (std::abs(step) > kMaxPhaseStep)
        throw ReductionViolation("phase increment too large to unwrap at sample " +
                                 std::to_string(k));
      theta[j] = prev[j] + step;
      ComplexTensor rotated = initial[j];
      rotated *= std::polar(1.0, theta[j]);
      res = std::max(res, frobenius_distance(s[j], rotated));
    }
    if (res > tolerance)
      throw ReductionViolation("trajectory leaves the phase orbit at sample " + std::to_string(k) +
                               " (residual " + std::to_string(res) + ")");
    out.theta.push_back(theta);
    out.residual.push_back(res);
    prev = std::move(theta);
  }
  return out;
}

double potential(const PhaseModel& m) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.n; ++i)
    for (std::size_t j = 0; j < m.n; ++j)
      s += m.R(i, j) * (1.0 - std::cos(m.theta[i] - m.theta[j] + m.alpha(j, i)));
  return m.kappa1 / double(m.n) * s;
}

std::vector<double> potential_gradient(const PhaseModel& m) {
  std::vector<double> g(m.n);
  const double scale = 2.0 * m.kappa1 / double(m.n);
  for (std::size_t k = 0; k < m.n; ++k) {
    double s = 0.0;
    for (std::size_t j = 0; j < m.n; ++j)
      s += m.R(k, j) * std::sin(m.theta[k] - m.theta[j] + m.alpha(j, k));
    g[k] = scale * s;
  }
  return g;
}

RateFit fit_decay_rate(std::span<const double> t, std::span<const double> y, double window) {
  if (t.size() != y.size()) throw InvalidInput("time and value series differ in length");
  if (!(window > 0.0 && window <= 1.0)) throw InvalidInput("window must lie in (0, 1]");
  if (t.empty()) throw FitDomainError("empty series");
  const double start = t.back() - window * (t.back() - t.front());
  std::vector<double> xs, ls;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] < start) continue;
    if (!(y[k] > 0.0)) throw FitDomainError("nonpositive value at t=" + std::to_string(t[k]));
    xs.push_back(t[k]);
    ls.push_back(std::log(y[k]));
  }
  if (xs.size() < 10) throw FitDomainError("fewer than 10 samples in fit window");
  const double m = double(xs.size());
  double xbar = 0.0, ybar = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    xbar += xs[k];
    ybar += ls[k];
  }
  xbar /= m;
  ybar /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double dx = xs[k] - xbar, dy = ls[k] - ybar;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw FitDomainError("fit window spans zero time");
  const double slope = sxy / sxx;
  RateFit fit;
  fit.rate = -slope;
  fit.intercept = ybar - slope * xbar;
  // A flat series is fitted exactly.
  fit.r2 = syy <= 1e-24 * m ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

std::vector<double> centered_differences(std::span<const double> t, std::span<const double> y) {
  if (t.size() != y.size()) throw InvalidInput("time and value series differ in length");
  std::vector<double> d;
  for (std::size_t k = 1; k + 1 < t.size(); ++k)
    d.push_back((y[k + 1] - y[k - 1]) / (t[k + 1] - t[k - 1]));
  return d;
}

}  // namespace lohe
