#pragma once

#include <vector>

#include "cfnet/rational.hpp"

namespace cfnet {

/// Worst-case growth of an additive network whose node constants are bounded
/// by Kbar, Mbar: every closed-loop series obeys |<d,w>| < K M^|w| |w|! for
/// any M > M_inf, and the maximal network's natural response escapes at
/// t_star = 1 / M_inf.
struct GrowthBound {
  double Kbar = 0;
  double Mbar = 0;
  int m = 0;
  double M_inf = 0;
  double t_star = 0;
};

/// lambda(x) = 1 - x ln(1 + 1/x) for x > 0, evaluated without cancellation.
double growth_lambda(double x);

/// M_inf = Mbar / lambda(m Kbar). Throws DomainError on nonpositive input.
GrowthBound m_inf_bound(double Kbar, double Mbar, int m);

/// Principal branch W0 of the Lambert W function, x >= -1/e.
double lambert_w(double x);

/// Lower branch W_{-1}, defined on [-1/e, 0).
double lambert_w_lower(double x);

/// Taylor data of the maximal-network natural response z' = (M/K)(z^2 + m z^3),
/// z(0) = K.
struct AbelSequence {
  int m = 0;
  Coeff K, M;
  std::vector<Coeff> z;      // Taylor coefficients z_0..z_n
  std::vector<Coeff> a;      // a_k = k! z_k
  std::vector<double> Mhat;  // Mhat_k = a_k / (k a_{k-1}) = z_k / z_{k-1}; Mhat_0 is 0
};

AbelSequence abel_taylor(int m, const Coeff& K, const Coeff& M, int n_max);

/// Closed-form solution of the Abel equation on [0, t_star). The solution
/// starts at z(0) = K on the lower real branch W_{-1} (the principal branch
/// would give a negative initial value) and reaches the branch point -1/e
/// exactly at t_star.
double closed_form_natural_response(int m, double K, double M, double t);

}  // namespace cfnet
