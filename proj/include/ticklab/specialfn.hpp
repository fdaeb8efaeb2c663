#pragma once

// Shared special functions: normal CDF, incomplete gamma/beta, Student-t
// quantiles and a small chi-square critical table. Everything here is plain
// double precision; callers that need tighter guarantees should check the
// documented error bounds in the .cpp.

#include <cstddef>

namespace ticklab::special {

// Standard normal CDF via erfc; ~1e-15 absolute accuracy.
double norm_cdf(double x);
// CDF of N(mean, sd) at x. sd must be > 0.
double norm_cdf(double x, double mean, double sd);

// Upper incomplete gamma Gamma(s, x) = int_x^inf t^{s-1} e^{-t} dt,
// non-regularized. s > 0, x >= 0. Series for x < s+1, Lentz continued
// fraction otherwise.
double gamma_upper(double s, double x);
// Regularized versions P + Q = 1.
double gamma_p(double s, double x);
double gamma_q(double s, double x);

// Non-regularized incomplete beta B(x; a, b) = int_0^x t^{a-1}(1-t)^{b-1} dt
// for 0 <= x <= 1, a > 0, b > 0.
double inc_beta(double x, double a, double b);
// Regularized I_x(a, b) = B(x; a, b) / B(a, b).
double inc_beta_reg(double x, double a, double b);
// Complete beta function.
double beta_fn(double a, double b);

// Student-t inverse CDF at probability p (0 < p < 1), dof >= 1.
// Inverted from the incomplete beta representation by bisection.
double t_quantile(double p, std::size_t dof);

// Critical chi-square value for upper-tail probability p at the given dof.
// Exact lookup from a built-in table (p in {0.10, 0.05, 0.025, 0.01, 0.005},
// dof 1..40); no interpolation. Unknown (p, dof) throws std::invalid_argument
// unless the caller supplies the value explicitly at the call site.
double chi2_critical(double upper_tail_p, std::size_t dof);

} // namespace ticklab::special
