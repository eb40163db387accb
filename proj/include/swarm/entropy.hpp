#pragma once

// Convex entropy functions: the spliced power family (power branch below 1,
// quadratic branch above), the pure power family, and the two classical
// reference entropies. Provides derivatives, the inverse of the first
// derivative, the mobility function theta, and the mobility path constant.

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include "swarm/errors.hpp"

namespace swarm {

namespace detail {

// pow with fast paths for the negative (half-)integer exponents the flows hit.
inline double pow_fast(double r, double e) {
    if (e == -1.0) return 1.0 / r;
    if (e == -2.0) return 1.0 / (r * r);
    if (e == -3.0) return 1.0 / (r * r * r);
    if (e == -4.0) {
        const double rr = r * r;
        return 1.0 / (rr * rr);
    }
    if (e == -0.5) return 1.0 / std::sqrt(r);
    if (e == -1.5) return 1.0 / (r * std::sqrt(r));
    if (e == -2.5) return 1.0 / (r * r * std::sqrt(r));
    return std::pow(r, e);
}

} // namespace detail

enum class EntropyVariant {
    spliced_power, // power branch on (0,1), (r-1)^2/2 on [1,inf)
    pure_power,    // (r^m - 1 - m(r-1)) / (m(m-1)) everywhere
    shifted_log,   // r - 1 - log r
    xlogx,         // r log r - r + 1
};

class EntropyFamily {
  public:
    static EntropyFamily spliced(double m) { return EntropyFamily(EntropyVariant::spliced_power, m); }
    static EntropyFamily power(double m) { return EntropyFamily(EntropyVariant::pure_power, m); }
    static EntropyFamily shifted_log() { return EntropyFamily(EntropyVariant::shifted_log, 0.0); }
    static EntropyFamily xlogx() { return EntropyFamily(EntropyVariant::xlogx, 1.0); }

    EntropyVariant variant() const { return variant_; }
    double exponent() const { return m_; }

    double phi(double r) const {
        require_positive(r);
        switch (variant_) {
        case EntropyVariant::spliced_power:
            if (r >= 1.0) return 0.5 * (r - 1.0) * (r - 1.0);
            [[fallthrough]];
        case EntropyVariant::pure_power:
            return (detail::pow_fast(r, m_) - 1.0 - m_ * (r - 1.0)) / (m_ * (m_ - 1.0));
        case EntropyVariant::shifted_log:
            return r - 1.0 - std::log(r);
        case EntropyVariant::xlogx:
            return r * std::log(r) - r + 1.0;
        }
        return 0.0;
    }

    double phi_prime(double r) const {
        require_positive(r);
        switch (variant_) {
        case EntropyVariant::spliced_power:
            if (r >= 1.0) return r - 1.0;
            [[fallthrough]];
        case EntropyVariant::pure_power:
            return (detail::pow_fast(r, m_ - 1.0) - 1.0) / (m_ - 1.0);
        case EntropyVariant::shifted_log:
            return 1.0 - 1.0 / r;
        case EntropyVariant::xlogx:
            return std::log(r);
        }
        return 0.0;
    }

    double phi_second(double r) const {
        require_positive(r);
        switch (variant_) {
        case EntropyVariant::spliced_power:
            if (r >= 1.0) return 1.0;
            [[fallthrough]];
        case EntropyVariant::pure_power:
            return detail::pow_fast(r, m_ - 2.0);
        case EntropyVariant::shifted_log:
            return 1.0 / (r * r);
        case EntropyVariant::xlogx:
            return 1.0 / r;
        }
        return 0.0;
    }

    // Inverse of phi_prime; closed form, spliced family only (the only
    // variant whose derivative is onto the whole real line).
    double g_inverse(double y) const {
        require_spliced("g_inverse");
        if (y >= 0.0) return y + 1.0;
        return detail::pow_fast((m_ - 1.0) * y + 1.0, inv_m1_);
    }

    double g_prime(double y) const {
        require_spliced("g_prime");
        return 1.0 / phi_second(g_inverse(y));
    }

    // Mobility: (s-t)/(phi'(s)-phi'(t)), 1/phi''(midpoint) near the diagonal,
    // zero on the boundary. Symmetric and nonnegative.
    double theta(double s, double t) const {
        if (s <= 0.0 || t <= 0.0) return 0.0;
        if (std::abs(s - t) <= 1e-9 * std::max(s, t)) return 1.0 / phi_second(0.5 * (s + t));
        return (s - t) / (phi_prime(s) - phi_prime(t));
    }

  private:
    EntropyFamily(EntropyVariant v, double m) : variant_(v), m_(m) {
        if ((v == EntropyVariant::spliced_power || v == EntropyVariant::pure_power) && !(m < 0.0))
            throw DomainError("entropy exponent must be negative, got " + std::to_string(m));
        inv_m1_ = (v == EntropyVariant::spliced_power || v == EntropyVariant::pure_power)
                      ? 1.0 / (m - 1.0)
                      : std::numeric_limits<double>::quiet_NaN();
    }

    static void require_positive(double r) {
        if (!(r > 0.0)) throw DomainError("entropy evaluated at nonpositive argument " + std::to_string(r));
    }
    void require_spliced(const char* op) const {
        if (variant_ != EntropyVariant::spliced_power)
            throw DomainError(std::string(op) + " requires the spliced power family");
    }

    EntropyVariant variant_;
    double m_;
    double inv_m1_;
};

// Admissible annealing exponent bound: -m / (2(1-m)), in (0, 1/2) for m < 0.
inline double kappa(double m) {
    if (!(m < 0.0)) throw DomainError("kappa requires a negative exponent");
    return -m / (2.0 * (1.0 - m));
}

// Path-length constant of the mobility: the integral over r in (0,1) of
// 1/sqrt(theta(1-r, 1+r)). Near r=1 the integrand grows like
// (1-r)^((m-1)/2), so the integral converges iff m > -1; for m <= -1 the
// integral is infinite and NonFinite is thrown. The convergent case is
// summed over dyadic slivers in u = 1-r with a geometric tail.
inline double c_theta(const EntropyFamily& fam, std::size_t quadrature_points = 120000) {
    if (fam.variant() != EntropyVariant::spliced_power)
        throw DomainError("c_theta requires the spliced power family");
    const double m = fam.exponent();
    if (m <= -1.0)
        throw NonFinite("mobility path constant diverges for exponent <= -1 (endpoint power " +
                        std::to_string(0.5 * (m - 1.0)) + ")");

    const auto integrand = [&](double u) { return 1.0 / std::sqrt(fam.theta(u, 2.0 - u)); };

    const int levels = 60;
    std::size_t per_level = quadrature_points / levels;
    if (per_level < 64) per_level = 64;
    if (per_level % 2 == 1) ++per_level;

    // Composite Simpson on [a,b].
    const auto simpson = [&](double a, double b, std::size_t nodes) {
        const double h = (b - a) / static_cast<double>(nodes);
        double odd = 0.0, even = 0.0;
        for (std::size_t i = 1; i < nodes; i += 2) odd += integrand(a + h * static_cast<double>(i));
        for (std::size_t i = 2; i < nodes; i += 2) even += integrand(a + h * static_cast<double>(i));
        return h / 3.0 * (integrand(a) + integrand(b) + 4.0 * odd + 2.0 * even);
    };

    double total = 0.0;
    double prev = 0.0, last = 0.0;
    for (int k = 0; k < levels; ++k) {
        const double hi = std::ldexp(1.0, -k);
        const double lo = 0.5 * hi;
        prev = last;
        last = simpson(lo, hi, per_level);
        total += last;
    }
    // Empirical backstop: sliver integrals must decay geometrically.
    if (last > 0.9999 * prev)
        throw NonFinite("mobility path constant: dyadic slivers do not decay");
    // Analytic tail ratio 2^(-(m+1)/2) for the remaining slivers.
    const double q = std::exp2(-0.5 * (m + 1.0));
    total += last * q / (1.0 - q);
    return total;
}

} // namespace swarm
