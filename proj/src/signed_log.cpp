#include "qpdcv/signed_log.hpp"

namespace qpdcv {

SignedLog slog_mul(std::span<const SignedLog> factors) {
    int sign = 1;
    double log_mag = 0.0;
    for (const SignedLog& f : factors) {
        if (f.sign == 0) return {};
        sign *= f.sign;
        log_mag += f.log_mag;
    }
    return {sign, log_mag};
}

SignedLog log_sum_exp(std::span<const SignedLog> terms) {
    double m = -std::numeric_limits<double>::infinity();
    for (const SignedLog& t : terms)
        if (t.sign != 0 && t.log_mag > m) m = t.log_mag;
    if (std::isinf(m) && m < 0) return {};  // all terms zero (or empty)

    double acc = 0.0;
    for (const SignedLog& t : terms)
        if (t.sign != 0) acc += t.sign * std::exp(t.log_mag - m);
    if (acc == 0.0) return {};
    return {acc > 0.0 ? +1 : -1, m + std::log(std::abs(acc))};
}

}  // namespace qpdcv
