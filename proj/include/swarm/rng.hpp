#pragma once

// Seeded pseudorandom stream for the samplers. All stochastic code draws
// through this wrapper so that a fixed seed fixes the entire event sequence.

#include <cstdint>
#include <cmath>
#include <random>
#include <vector>

#include "swarm/errors.hpp"

namespace swarm {

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // Standard exponential; log1p keeps precision for small uniforms.
    double exponential() { return -std::log1p(-uniform()); }

    // Index drawn proportionally to nonnegative weights with known total.
    // The final nonzero weight absorbs roundoff.
    int pick(const std::vector<double>& weights, double total) {
        if (!(total > 0.0)) throw DomainError("pick needs positive total weight");
        const double u = uniform() * total;
        double acc = 0.0;
        int last = -1;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (weights[i] <= 0.0) continue;
            last = static_cast<int>(i);
            acc += weights[i];
            if (u < acc) return last;
        }
        if (last < 0) throw DomainError("pick needs a positive weight");
        return last;
    }

    std::uint64_t raw() { return gen_(); }

  private:
    std::mt19937_64 gen_;
};

} // namespace swarm
