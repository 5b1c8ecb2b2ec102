#include "qpdcv/polynomials.hpp"

namespace qpdcv {

std::vector<double> elementary_symmetric(std::span<const double> x) {
    std::vector<double> e(x.size() + 1, 0.0);
    e[0] = 1.0;
    std::size_t used = 0;
    for (double xi : x) {
        ++used;
        for (std::size_t k = used; k >= 1; --k) e[k] += xi * e[k - 1];
    }
    return e;
}

double binomial(unsigned n, unsigned k) {
    if (k > n) return 0.0;
    if (k > n - k) k = n - k;
    double r = 1.0;
    for (unsigned i = 1; i <= k; ++i) r = r * double(n - k + i) / double(i);
    return r;
}

}  // namespace qpdcv
