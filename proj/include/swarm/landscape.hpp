#pragma once

// The static optimization landscape: a finite state set, an irreducible
// Markov generator reversible with respect to a positive probability
// weight, and a real objective on the states.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>
#include <vector>

#include "swarm/errors.hpp"

namespace swarm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Density = Eigen::VectorXd; // positive, ell-mean one

struct EnergyLandscape {
    Matrix L;   // generator: nonnegative off-diagonal, zero row sums
    Vector ell; // reversible probability weight, positive
    Vector U;   // objective

    struct Edge {
        int x, y;      // x < y, L(x,y) > 0
        double weight; // ell(x) * L(x,y), symmetric by detailed balance
    };
    std::vector<Edge> edges; // undirected support of L

    int size() const { return static_cast<int>(U.size()); }
};

namespace detail {

inline void check_measure(const Vector& ell) {
    for (Eigen::Index i = 0; i < ell.size(); ++i)
        if (!(ell[i] > 0.0)) throw BadMeasure("weight must be positive at every state");
    if (std::abs(ell.sum() - 1.0) > tol::mass)
        throw BadMeasure("weight must sum to one, got " + std::to_string(ell.sum()));
}

inline void check_reversible(const Matrix& L, const Vector& ell) {
    const int n = static_cast<int>(ell.size());
    for (int x = 0; x < n; ++x)
        for (int y = x + 1; y < n; ++y) {
            const double a = ell[x] * L(x, y), b = ell[y] * L(y, x);
            if (std::abs(a - b) > tol::structural * std::max({std::abs(a), std::abs(b), 1.0}))
                throw NotReversible("detailed balance fails on edge (" + std::to_string(x) + "," +
                                    std::to_string(y) + ")");
        }
}

inline void check_irreducible(const Matrix& L) {
    const int n = static_cast<int>(L.rows());
    const auto reachable = [&](bool transpose) {
        std::vector<char> seen(n, 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        while (!stack.empty()) {
            const int x = stack.back();
            stack.pop_back();
            for (int y = 0; y < n; ++y) {
                const double rate = transpose ? L(y, x) : L(x, y);
                if (x != y && rate > 0.0 && !seen[y]) {
                    seen[y] = 1;
                    stack.push_back(y);
                }
            }
        }
        return static_cast<int>(std::count(seen.begin(), seen.end(), 1)) == n;
    };
    if (!reachable(false) || !reachable(true))
        throw NotIrreducible("the positive-rate graph is not strongly connected");
}

inline std::vector<EnergyLandscape::Edge> collect_edges(const Matrix& L, const Vector& ell) {
    std::vector<EnergyLandscape::Edge> out;
    const int n = static_cast<int>(ell.size());
    for (int x = 0; x < n; ++x)
        for (int y = x + 1; y < n; ++y)
            if (L(x, y) > 0.0) out.push_back({x, y, ell[x] * L(x, y)});
    return out;
}

} // namespace detail

// Build from an off-diagonal rate matrix; the diagonal is recomputed so rows
// sum to zero exactly.
inline EnergyLandscape build_landscape(Matrix rates, Vector ell, Vector U) {
    const int n = static_cast<int>(ell.size());
    if (rates.rows() != n || rates.cols() != n || U.size() != n)
        throw ValidationError("landscape fields have mismatched sizes");
    detail::check_measure(ell);
    for (int x = 0; x < n; ++x) {
        rates(x, x) = 0.0;
        for (int y = 0; y < n; ++y)
            if (x != y && rates(x, y) < 0.0) throw ValidationError("negative jump rate");
        rates(x, x) = -rates.row(x).sum();
    }
    detail::check_reversible(rates, ell);
    detail::check_irreducible(rates);
    EnergyLandscape land{std::move(rates), std::move(ell), std::move(U), {}};
    land.edges = detail::collect_edges(land.L, land.ell);
    return land;
}

inline EnergyLandscape build_landscape(const std::vector<std::tuple<int, int, double>>& edges,
                                       Vector ell, Vector U) {
    const int n = static_cast<int>(ell.size());
    Matrix rates = Matrix::Zero(n, n);
    for (const auto& [x, y, rate] : edges) {
        if (x < 0 || y < 0 || x >= n || y >= n || x == y)
            throw ValidationError("edge endpoints out of range");
        rates(x, y) += rate;
    }
    return build_landscape(std::move(rates), std::move(ell), std::move(U));
}

inline double osc(const Vector& U) { return U.maxCoeff() - U.minCoeff(); }

// States within tol of the minimum objective value.
inline std::vector<int> minimizer_set(const EnergyLandscape& land, double tol = 0.0) {
    const double lo = land.U.minCoeff();
    std::vector<int> out;
    for (int x = 0; x < land.size(); ++x)
        if (land.U[x] <= lo + tol) out.push_back(x);
    return out;
}

// Probability mass of the density rho on a set of states.
inline double mass_on(const EnergyLandscape& land, const Density& rho, const std::vector<int>& set) {
    double s = 0.0;
    for (int x : set) s += rho[x] * land.ell[x];
    return s;
}

// Smallest nonzero eigenvalue of -gen, via the symmetrization
// D^{1/2} (-gen) D^{-1/2} with D = diag(measure).
inline double spectral_gap(const Matrix& gen, const Vector& measure) {
    const int n = static_cast<int>(measure.size());
    for (int i = 0; i < n; ++i)
        if (!(measure[i] > 0.0)) throw BadMeasure("spectral weight must be positive");
    for (int x = 0; x < n; ++x)
        for (int y = x + 1; y < n; ++y) {
            const double a = measure[x] * gen(x, y), b = measure[y] * gen(y, x);
            if (std::abs(a - b) > tol::structural * std::max({std::abs(a), std::abs(b), 1.0}))
                throw NotReversible("generator is not reversible for the given weight");
        }
    Matrix B(n, n);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            B(x, y) = -gen(x, y) * std::sqrt(measure[x] / measure[y]);
    B = 0.5 * (B + B.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> solver(B, Eigen::EigenvaluesOnly);
    return solver.eigenvalues()[1];
}

inline void validate_density(const EnergyLandscape& land, const Density& rho,
                             double mass_tol = tol::mass) {
    if (rho.size() != land.size()) throw ValidationError("density has wrong length");
    for (int x = 0; x < land.size(); ++x)
        if (!(rho[x] > 0.0)) throw BadMeasure("density must be strictly positive");
    const double mass = rho.dot(land.ell);
    if (std::abs(mass - 1.0) > mass_tol)
        throw BadMeasure("density mass is " + std::to_string(mass));
}

inline Density uniform_density(int n) { return Density::Ones(n); }

// The 20-state cyclic benchmark landscape: unit nearest-neighbor rates,
// uniform weight, and an oscillatory objective whose unique minimizer is
// state 7.
inline EnergyLandscape ring20() {
    const int n = 20;
    Matrix rates = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        rates(i, (i + 1) % n) = 1.0;
        rates(i, (i + n - 1) % n) = 1.0;
    }
    Vector ell = Vector::Constant(n, 1.0 / n);
    Vector U(n);
    for (int i = 0; i < n; ++i) {
        const double x = -0.6 + static_cast<double>(i) / 5.5;
        U[i] = x * x / 10.0 + 2.0 * (std::cos(3.0 * x) + std::sin(7.0 * x));
    }
    return build_landscape(std::move(rates), std::move(ell), std::move(U));
}

} // namespace swarm
