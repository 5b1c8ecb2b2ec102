#pragma once

#include <cmath>
#include <cstdlib>
#include <limits>
#include <span>

namespace qpdcv {

// Real number stored as (sign, log|value|). Products of very many factors
// stay representable where the plain double would over- or underflow.
// Invariant: sign is -1, 0, or +1; sign == 0 forces log_mag == -infinity.
struct SignedLog {
    int sign = 0;
    double log_mag = -std::numeric_limits<double>::infinity();

    static SignedLog from_real(double v) {
        if (v == 0.0) return {};
        return {v > 0.0 ? +1 : -1, std::log(std::abs(v))};
    }

    // +-infinity on overflow, 0.0 on underflow; that is the caller's
    // signal to stay in the log domain instead.
    double to_real() const {
        if (sign == 0) return 0.0;
        return sign * std::exp(log_mag);
    }

    bool is_zero() const { return sign == 0; }

    friend SignedLog operator*(SignedLog a, SignedLog b) {
        if (a.sign == 0 || b.sign == 0) return {};
        return {a.sign * b.sign, a.log_mag + b.log_mag};
    }

    SignedLog& operator*=(SignedLog o) {
        *this = *this * o;
        return *this;
    }
};

// Product of all factors. Empty span gives the empty product (+1, log 1).
SignedLog slog_mul(std::span<const SignedLog> factors);

// Sum of all terms, max-shifted so only the overall scale lives in the
// exponent. Exact cancellation of the shifted sum yields the zero element.
SignedLog log_sum_exp(std::span<const SignedLog> terms);

}  // namespace qpdcv
