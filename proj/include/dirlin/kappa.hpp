#pragma once

namespace dirlin {

// kappa_p(x) = int_0^inf r^{p-1} exp(-(r-x)^2 / 2) dr, the radial moment
// integral behind the projected-normal density. Throws DomainError for p < 1.
double kappa(int p, double x);

// log kappa_p(x); stays accurate far into both tails where the linear value
// over/underflows.
double log_kappa(int p, double x);

}  // namespace dirlin
