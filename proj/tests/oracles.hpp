#pragma once

// Independent numerical oracles used to pin expected values. Deliberately
// avoids the library's own eigensolver, quadrature and root-finding paths:
// eigen-decomposition is a hand-rolled cyclic Jacobi sweep, quadrature is
// composite Simpson, root finding is plain bisection.

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include <swarm/landscape.hpp>

namespace oracles {

// Cyclic Jacobi for symmetric matrices. Returns eigenvalues ascending and
// the matching orthonormal columns.
inline std::pair<swarm::Vector, swarm::Matrix> jacobi_eigen(swarm::Matrix A) {
    const int n = static_cast<int>(A.rows());
    swarm::Matrix V = swarm::Matrix::Identity(n, n);
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += A(p, q) * A(p, q);
        if (off < 1e-30) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                if (std::abs(A(p, q)) < 1e-300) continue;
                const double tau = (A(q, q) - A(p, p)) / (2.0 * A(p, q));
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = A(k, p), akq = A(k, q);
                    A(k, p) = c * akp - s * akq;
                    A(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = A(p, k), aqk = A(q, k);
                    A(p, k) = c * apk - s * aqk;
                    A(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = V(k, p), vkq = V(k, q);
                    V(k, p) = c * vkp - s * vkq;
                    V(k, q) = s * vkp + c * vkq;
                }
            }
    }
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return A(a, a) < A(b, b); });
    swarm::Vector evals(n);
    swarm::Matrix evecs(n, n);
    for (int i = 0; i < n; ++i) {
        evals[i] = A(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(i)]);
        evecs.col(i) = V.col(idx[static_cast<std::size_t>(i)]);
    }
    return {evals, evecs};
}

inline swarm::Matrix symmetrized(const swarm::Matrix& gen, const swarm::Vector& measure) {
    const int n = static_cast<int>(gen.rows());
    swarm::Matrix B(n, n);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            B(x, y) = std::sqrt(measure[x] / measure[y]) * gen(x, y);
    return 0.5 * (B + B.transpose()); // kill roundoff asymmetry
}

inline double oracle_spectral_gap(const swarm::Matrix& gen, const swarm::Vector& measure) {
    const auto [evals, evecs] = jacobi_eigen(symmetrized(-gen, measure));
    return evals[1];
}

// mu_t = mu_0 e^{t gen} for gen reversible w.r.t. measure.
inline swarm::Vector oracle_expm_measure(const swarm::Matrix& gen, const swarm::Vector& measure,
                                         const swarm::Vector& mu0, double t) {
    const int n = static_cast<int>(gen.rows());
    const auto [evals, evecs] = jacobi_eigen(symmetrized(gen, measure));
    swarm::Vector scaled(n);
    for (int x = 0; x < n; ++x) scaled[x] = mu0[x] / std::sqrt(measure[x]);
    swarm::Vector coef = evecs.transpose() * scaled;
    for (int i = 0; i < n; ++i) coef[i] *= std::exp(t * evals[i]);
    swarm::Vector back = evecs * coef;
    for (int x = 0; x < n; ++x) back[x] *= std::sqrt(measure[x]);
    return back;
}

// The boundary-weight integral: C = int_0^1 dr / sqrt(theta(1-r, 1+r)) for
// the spliced family, via the substitution 1-r = w^p with p = 4/(m+1) so the
// integrand vanishes smoothly at the singular endpoint. Composite Simpson.
inline double oracle_c_theta(double m, std::size_t intervals = 1u << 20) {
    if (!(m > -1.0 && m < 0.0)) throw std::invalid_argument("oracle valid for -1 < m < 0");
    const auto phi_prime = [m](double r) {
        return r >= 1.0 ? r - 1.0 : (std::pow(r, m - 1.0) - 1.0) / (m - 1.0);
    };
    const double p = 4.0 / (m + 1.0);
    const auto f = [&](double w) {
        if (w <= 0.0) return 0.0;
        const double s = std::pow(w, p);      // 1 - r
        const double t = 2.0 - s;             // 1 + r
        // at w = 1 both arguments hit 1 and the ratio degenerates to 1/phi''(1) = 1
        const double theta = t == s ? 1.0 : (t - s) / (phi_prime(t) - phi_prime(s));
        return p * std::pow(w, p - 1.0) / std::sqrt(theta);
    };
    if (intervals % 2) ++intervals;
    const double h = 1.0 / static_cast<double>(intervals);
    double odd = 0.0, even = 0.0;
    for (std::size_t i = 1; i < intervals; i += 2) odd += f(h * static_cast<double>(i));
    for (std::size_t i = 2; i < intervals; i += 2) even += f(h * static_cast<double>(i));
    return h / 3.0 * (f(0.0) + f(1.0) + 4.0 * odd + 2.0 * even);
}

// Bisection solve of sum_x ell(x) g(c - beta U(x)) = 1 with the closed-form
// inverse written out locally.
inline double oracle_c_bisection(const swarm::EnergyLandscape& land, double m, double beta,
                                 int iters = 10000) {
    const auto g = [m](double y) {
        return y >= 0.0 ? y + 1.0 : std::pow((m - 1.0) * y + 1.0, 1.0 / (m - 1.0));
    };
    const auto f = [&](double c) {
        double s = 0.0;
        for (int x = 0; x < land.size(); ++x) s += land.ell[x] * g(c - beta * land.U[x]);
        return s - 1.0;
    };
    double lo = beta * land.U.minCoeff() - 1e6, hi = beta * land.U.maxCoeff() + 1e6;
    if (f(lo) > 0.0 || f(hi) < 0.0) throw std::runtime_error("oracle bracket failed");
    for (int i = 0; i < iters; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (f(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

inline double central_diff(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

// Kolmogorov-Smirnov statistic of samples against a CDF, plus the asymptotic
// p-value Q(lambda) = 2 sum_k (-1)^{k-1} exp(-2 k^2 lambda^2).
inline double ks_statistic(std::vector<double> samples,
                           const std::function<double(double)>& cdf) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double F = cdf(samples[i]);
        d = std::max(d, std::abs(F - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - F));
    }
    return d;
}

inline double ks_pvalue(double d, std::size_t n) {
    const double sn = std::sqrt(static_cast<double>(n));
    const double lambda = (sn + 0.12 + 0.11 / sn) * d;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
        sum += term;
        if (std::abs(term) < 1e-12) break;
    }
    return std::min(1.0, std::max(0.0, sum));
}

} // namespace oracles
