#pragma once

namespace fwmix {

// Regularized incomplete beta I_x(a, b) via the continued-fraction
// expansion (Lentz). Accurate to ~1e-12 over the ranges used here.
double regularized_incomplete_beta(double a, double b, double x);

// Two-sided tail probability of Student's t with df degrees of freedom:
// p = I_{df/(df+t^2)}(df/2, 1/2).
double student_t_two_sided_p(double t, int df);

// Kolmogorov tail function Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} e^{-2 k^2 lambda^2},
// truncated once a term drops below 1e-10. Clamped to [0, 1].
double kolmogorov_q(double lambda);

}  // namespace fwmix
