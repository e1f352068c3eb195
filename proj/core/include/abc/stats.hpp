#pragma once

#include <vector>

namespace abc {

double log_gamma(double x);

/// Regularized incomplete beta I_x(a, b), evaluated with the continued
/// fraction (modified Lentz), switching to the symmetric form for fast
/// convergence.
double incomplete_beta(double a, double b, double x);

/// Two-sided tail probability P(|T| >= |t|) for Student's t with nu degrees
/// of freedom: I_{nu/(nu+t^2)}(nu/2, 1/2).
double student_t_two_sided_p(double t, double nu);

double mean(const std::vector<double>& v);
double sample_variance(const std::vector<double>& v);  // ddof = 1

}  // namespace abc
