#include <doctest.h>

#include <boost/math/special_functions/lambert_w.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>

#include "cfnet/errors.hpp"
#include "cfnet/growth.hpp"

using namespace cfnet;
using boost::multiprecision::cpp_bin_float_50;

namespace {

double reference_m_inf(double K, double M, int m) {
  cpp_bin_float_50 x = cpp_bin_float_50(m) * K;
  cpp_bin_float_50 lam = 1 - x * log(1 + 1 / x);
  return static_cast<double>(cpp_bin_float_50(M) / lam);
}

}  // namespace

TEST_CASE("growth bound against 50-digit reference") {
  for (int m = 1; m <= 8; ++m)
    for (double K : {0.1, 1.0, 3.0, 250.0})
      for (double M : {0.5, 1.0, 4.0}) {
        GrowthBound b = m_inf_bound(K, M, m);
        const double ref = reference_m_inf(K, M, m);
        CHECK(std::fabs(b.M_inf - ref) <= 1e-12 * ref);
        CHECK(b.t_star == doctest::Approx(1 / b.M_inf).epsilon(1e-15));
        CHECK(b.M_inf > M);
      }
  CHECK_THROWS_AS(m_inf_bound(0, 1, 1), DomainError);
  CHECK_THROWS_AS(m_inf_bound(1, -1, 1), DomainError);
  CHECK_THROWS_AS(m_inf_bound(1, 1, 0), DomainError);
}

TEST_CASE("lambda is strictly decreasing") {
  double prev = growth_lambda(1e-3);
  for (double x = 2e-3; x < 1e4; x *= 1.3) {
    const double cur = growth_lambda(x);
    CHECK(cur < prev);
    CHECK(cur > 0);
    prev = cur;
  }
}

TEST_CASE("lambert W principal branch") {
  CHECK(lambert_w(0.0) == 0.0);
  CHECK(lambert_w(std::exp(1.0)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(lambert_w(-std::exp(-1.0)) == doctest::Approx(-1.0).epsilon(1e-7));
  CHECK_THROWS_AS(lambert_w(-0.4), DomainError);
  for (double x = 1e-12; x < 1e12; x *= 3.7) {
    for (double s : {1.0, -1.0}) {
      const double xx = s * x;
      if (xx < -std::exp(-1.0)) continue;
      const double w = lambert_w(xx);
      CHECK(std::fabs(w * std::exp(w) - xx) <= 1e-14 * std::max(1.0, std::fabs(xx)));
      CHECK(w == doctest::Approx(boost::math::lambert_w0(xx)).epsilon(1e-13));
    }
  }
  for (double p = 1e-9; p < 0.36; p *= 2) {
    const double x = -std::exp(-1.0) + p;
    CHECK(lambert_w(x) == doctest::Approx(boost::math::lambert_w0(x)).epsilon(1e-9));
  }
}

TEST_CASE("lambert W lower branch") {
  for (double x = -0.367; x < -1e-6; x += 0.01) {
    CHECK(lambert_w_lower(x) == doctest::Approx(boost::math::lambert_wm1(x)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(lambert_w_lower(0.1), DomainError);
}

TEST_CASE("abel recursion") {
  AbelSequence a = abel_taylor(1, 1, 1, 6);
  std::vector<Coeff> want{1, 2, 10, 82, 938, 13778, 247210};
  CHECK(a.a == want);
  AbelSequence b = abel_taylor(2, 1, 1, 5);
  std::vector<Coeff> want2{1, 3, 24, 318, 5892, 140304};
  CHECK(b.a == want2);
  for (int m = 1; m <= 4; ++m) {
    const Coeff K(2, 3), M(5, 2);
    AbelSequence s = abel_taylor(m, K, M, 3);
    CHECK(s.z[0] == K);
    CHECK(s.a[1] == M * K * (1 + m * K));
    for (const Coeff& x : s.a) CHECK(sgn(x) > 0);
  }
  CHECK(abel_taylor(1, 1, 1, 0).a.size() == 1);
}

TEST_CASE("growth estimates approach the bound from below") {
  for (int m = 1; m <= 6; ++m) {
    AbelSequence s = abel_taylor(m, 1, 1, 200);
    const double M_inf = m_inf_bound(1, 1, m).M_inf;
    for (int n = 1; n <= 200; ++n) CHECK(s.Mhat[static_cast<std::size_t>(n)] < M_inf);
    // a_n <= K' M'^n n! with M' = 1.01 M_inf: z_n / M'^n must be bounded,
    // and in fact decaying over the tail.
    const double Mp = 1.01 * M_inf;
    auto scaled = [&](int n) { return s.z[static_cast<std::size_t>(n)].get_d() / std::pow(Mp, n); };
    CHECK(scaled(200) < scaled(100));
    double peak = 0;
    for (int n = 0; n <= 200; ++n) peak = std::max(peak, scaled(n));
    CHECK(std::isfinite(peak));
  }
}

TEST_CASE("closed-form natural response") {
  CHECK(closed_form_natural_response(1, 1, 1, 0) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(closed_form_natural_response(3, 2, 5, 0) == doctest::Approx(2.0).epsilon(1e-13));
  AbelSequence s = abel_taylor(1, 1, 1, 30);
  double taylor = 0, p = 1;
  for (const Coeff& z : s.z) {
    taylor += z.get_d() * p;
    p *= 0.1;
  }
  CHECK(std::fabs(closed_form_natural_response(1, 1, 1, 0.1) - taylor) < 1e-8);

  const double ts = m_inf_bound(1, 1, 3).t_star;
  CHECK(closed_form_natural_response(3, 1, 1, ts * (1 - 1e-9)) > 1e3);
  CHECK_THROWS_AS(closed_form_natural_response(3, 1, 1, ts), DomainError);
  CHECK_THROWS_AS(closed_form_natural_response(3, 1, 1, -0.1), DomainError);
}
