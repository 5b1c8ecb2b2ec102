#pragma once

#include <span>
#include <vector>

namespace qpdcv {

// All elementary symmetric polynomials e_0..e_n of the inputs, by the
// one-pass recurrence e_k += x * e_{k-1} (descending k). O(n^2), exact for
// small integer-valued inputs well inside double precision.
std::vector<double> elementary_symmetric(std::span<const double> x);

// n choose k as a double, multiplicative form; exact for the small n used here.
double binomial(unsigned n, unsigned k);

}  // namespace qpdcv
