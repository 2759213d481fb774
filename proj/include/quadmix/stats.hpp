#ifndef QUADMIX_STATS_HPP
#define QUADMIX_STATS_HPP

#include <cmath>
#include <limits>
#include <stdexcept>

namespace quadmix {

/// Standard normal CDF.
template <typename Scalar>
Scalar normal_cdf(Scalar z) {
    using std::erfc;
    using std::sqrt;
    return Scalar(0.5) * erfc(-z / sqrt(Scalar(2)));
}

/// Standard normal density.
template <typename Scalar>
Scalar normal_pdf(Scalar z) {
    using std::exp;
    using std::sqrt;
    const Scalar inv_sqrt_2pi = Scalar(1) / sqrt(Scalar(6.283185307179586476925287L));
    return inv_sqrt_2pi * exp(-Scalar(0.5) * z * z);
}

namespace detail {

// Regularized lower incomplete gamma P(a, x) by series expansion, valid for
// x < a + 1.
template <typename Scalar>
Scalar gamma_p_series(Scalar a, Scalar x) {
    using std::exp;
    using std::lgamma;
    using std::log;
    Scalar ap = a;
    Scalar sum = Scalar(1) / a;
    Scalar term = sum;
    for (int i = 0; i < 500; ++i) {
        ap += Scalar(1);
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * std::numeric_limits<Scalar>::epsilon()) {
            break;
        }
    }
    return sum * exp(-x + a * log(x) - lgamma(a));
}

// Regularized upper incomplete gamma Q(a, x) by Lentz continued fraction,
// valid for x >= a + 1.
template <typename Scalar>
Scalar gamma_q_cf(Scalar a, Scalar x) {
    using std::exp;
    using std::lgamma;
    using std::log;
    const Scalar tiny = std::numeric_limits<Scalar>::min() / std::numeric_limits<Scalar>::epsilon();
    Scalar b = x + Scalar(1) - a;
    Scalar c = Scalar(1) / tiny;
    Scalar d = Scalar(1) / b;
    Scalar h = d;
    for (int i = 1; i <= 500; ++i) {
        const Scalar an = -Scalar(i) * (Scalar(i) - a);
        b += Scalar(2);
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = Scalar(1) / d;
        const Scalar delta = d * c;
        h *= delta;
        if (std::abs(delta - Scalar(1)) < std::numeric_limits<Scalar>::epsilon()) {
            break;
        }
    }
    return exp(-x + a * log(x) - lgamma(a)) * h;
}

}  // namespace detail

/// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a).
template <typename Scalar>
Scalar gamma_p(Scalar a, Scalar x) {
    if (!(a > Scalar(0)) || x < Scalar(0)) {
        throw std::domain_error("gamma_p: requires a > 0 and x >= 0");
    }
    if (x == Scalar(0)) return Scalar(0);
    if (x < a + Scalar(1)) return detail::gamma_p_series(a, x);
    return Scalar(1) - detail::gamma_q_cf(a, x);
}

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
template <typename Scalar>
Scalar gamma_q(Scalar a, Scalar x) {
    if (!(a > Scalar(0)) || x < Scalar(0)) {
        throw std::domain_error("gamma_q: requires a > 0 and x >= 0");
    }
    if (x == Scalar(0)) return Scalar(1);
    if (x < a + Scalar(1)) return Scalar(1) - detail::gamma_p_series(a, x);
    return detail::gamma_q_cf(a, x);
}

/// Upper tail P(X > x) of a chi-square variable with `dof` degrees of freedom.
template <typename Scalar>
Scalar chi_square_tail(Scalar x, Scalar dof) {
    if (x <= Scalar(0)) return Scalar(1);
    return gamma_q(dof / Scalar(2), x / Scalar(2));
}

}  // namespace quadmix

#endif  // QUADMIX_STATS_HPP
