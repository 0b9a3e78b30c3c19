#include "cfnet/growth.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "cfnet/errors.hpp"

namespace cfnet {

namespace {

constexpr double kInvE = 0.36787944117144232159552377016146;
constexpr int kMaxHalley = 50;

// Series about the branch point in p = sqrt(2 (e x + 1)); sign +1 for W0,
// -1 for W_{-1}.
double branch_series(double x, double sign) {
  const double p = sign * std::sqrt(std::max(0.0, 2.0 * (std::exp(1.0) * x + 1.0)));
  return -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0 + p * (-43.0 / 540.0 + p * (769.0 / 17280.0)))));
}

double halley(double x, double w) {
  for (int it = 0; it < kMaxHalley; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double wp1 = w + 1.0;
    if (wp1 == 0.0) return w;
    const double step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
    const double next = w - step;
    if (!std::isfinite(next)) return w;
    if (std::fabs(next - w) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(next))) {
      return next;
    }
    w = next;
  }
  return w;
}

void check_branch_domain(double x) {
  if (std::isnan(x) || x < -kInvE - 4.0 * std::numeric_limits<double>::epsilon()) {
    throw DomainError("Lambert W is real only for x >= -1/e (got " + std::to_string(x) + ")");
  }
}

}  // namespace

double growth_lambda(double x) {
  if (!(x > 0)) throw DomainError("lambda(x) needs x > 0");
  const long double lx = x;
  if (x < 4.0) return static_cast<double>(1.0L - lx * std::log1p(1.0L / lx));
  // 1 - x ln(1 + 1/x) = sum_{k>=2} (-1)^k / (k x^(k-1))
  long double sum = 0, power = 1.0L / lx;
  for (int k = 2; k < 200; ++k) {
    const long double term = power / k;
    sum += (k % 2 == 0) ? term : -term;
    if (term < 1e-22L * sum) break;
    power /= lx;
  }
  return static_cast<double>(sum);
}

GrowthBound m_inf_bound(double Kbar, double Mbar, int m) {
  if (!(Kbar > 0) || !(Mbar > 0) || m < 1) throw DomainError("bound needs Kbar > 0, Mbar > 0 and m >= 1");
  GrowthBound out;
  out.Kbar = Kbar;
  out.Mbar = Mbar;
  out.m = m;
  const double lambda = growth_lambda(m * Kbar);
  out.M_inf = Mbar / lambda;
  out.t_star = lambda / Mbar;
  return out;
}

double lambert_w(double x) {
  check_branch_domain(x);
  if (x <= -kInvE) return -1.0;
  if (x == 0.0) return 0.0;
  const double p2 = 2.0 * (std::exp(1.0) * x + 1.0);
  if (p2 < 1e-6) return branch_series(x, 1.0);
  double w;
  if (x < -0.25) {
    w = branch_series(x, 1.0);
  } else if (x < 3.0) {
    w = std::log1p(x);
  } else {
    const double l1 = std::log(x), l2 = std::log(l1);
    w = l1 - l2 + l2 / l1;
  }
  return halley(x, w);
}

double lambert_w_lower(double x) {
  check_branch_domain(x);
  if (x >= 0.0) throw DomainError("the lower Lambert W branch is defined on [-1/e, 0)");
  if (x <= -kInvE) return -1.0;
  const double p2 = 2.0 * (std::exp(1.0) * x + 1.0);
  if (p2 < 1e-6) return branch_series(x, -1.0);
  double w;
  if (x < -0.25) {
    w = branch_series(x, -1.0);
  } else {
    const double l1 = std::log(-x), l2 = std::log(-l1);
    w = l1 - l2 + l2 / l1;
  }
  return halley(x, w);
}

AbelSequence abel_taylor(int m, const Coeff& K, const Coeff& M, int n_max) {
  if (m < 1 || sgn(K) <= 0 || sgn(M) <= 0) throw DomainError("abel_taylor needs m >= 1, K > 0, M > 0");
  if (n_max < 0) throw DomainError("n_max must be nonnegative");
  AbelSequence out;
  out.m = m;
  out.K = K;
  out.M = M;
  const Coeff rate = M / K;
  const auto n = static_cast<std::size_t>(n_max);
  out.z.reserve(n + 1);
  out.z.push_back(K);
  std::vector<Coeff> square, cube;  // Cauchy powers z^2 and z^3 by degree
  for (std::size_t k = 0; k < n; ++k) {
    Coeff s2 = 0, s3 = 0;
    for (std::size_t a = 0; a <= k; ++a) s2 += out.z[a] * out.z[k - a];
    square.push_back(s2);
    for (std::size_t a = 0; a <= k; ++a) s3 += square[a] * out.z[k - a];
    cube.push_back(s3);
    out.z.push_back(rate * (s2 + m * s3) / static_cast<unsigned long>(k + 1));
  }
  Coeff fact = 1;
  out.a.reserve(n + 1);
  out.Mhat.reserve(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    if (k > 0) fact *= static_cast<unsigned long>(k);
    out.a.push_back(fact * out.z[k]);
    if (k == 0) {
      out.Mhat.push_back(0.0);
    } else {
      const Coeff ratio = out.a[k] / (Coeff(static_cast<unsigned long>(k)) * out.a[k - 1]);
      out.Mhat.push_back(ratio.get_d());
    }
  }
  return out;
}

double closed_form_natural_response(int m, double K, double M, double t) {
  const GrowthBound bound = m_inf_bound(K, M, m);
  if (t < 0 || t >= bound.t_star) {
    throw DomainError("closed form is valid on [0, t_star) = [0, " + std::to_string(bound.t_star) + ")");
  }
  const double a = 1.0 / (m * K);
  const double c = 1.0 + a;
  const double arg = -c * std::exp(M * t / (m * K) - c);
  const double w = lambert_w_lower(std::max(arg, -kInvE));
  return (-1.0 / m) / (1.0 + w);
}

}  // namespace cfnet
