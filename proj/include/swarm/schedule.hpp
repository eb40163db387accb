#pragma once

// Penalty-strength schedules: the power ramp beta_t = (t0+t)^alpha - 1,
// a constant schedule, and a user-supplied curve. The power ramp has a
// closed-form time integral, which the samplers rely on.

#include <cmath>
#include <functional>
#include <string>

#include "swarm/entropy.hpp"
#include "swarm/errors.hpp"

namespace swarm {

class Schedule {
  public:
    enum class Form { power, constant, custom };

    static Schedule power(double t0, double alpha) {
        if (!(t0 >= 1.0)) throw DomainError("power schedule requires t0 >= 1");
        if (!(alpha > 0.0)) throw DomainError("power schedule requires alpha > 0");
        Schedule s;
        s.form_ = Form::power;
        s.t0_ = t0;
        s.alpha_ = alpha;
        return s;
    }

    static Schedule constant(double beta) {
        if (!(beta >= 0.0)) throw DomainError("constant schedule requires beta >= 0");
        Schedule s;
        s.form_ = Form::constant;
        s.beta_const_ = beta;
        return s;
    }

    static Schedule custom(std::function<double(double)> beta,
                           std::function<double(double)> beta_dot) {
        Schedule s;
        s.form_ = Form::custom;
        s.beta_fn_ = std::move(beta);
        s.beta_dot_fn_ = std::move(beta_dot);
        return s;
    }

    Form form() const { return form_; }
    double t0() const { return t0_; }
    double alpha() const { return alpha_; }

    double beta(double t) const {
        switch (form_) {
        case Form::power: return std::pow(t0_ + t, alpha_) - 1.0;
        case Form::constant: return beta_const_;
        case Form::custom: return beta_fn_(t);
        }
        return 0.0;
    }

    double beta_dot(double t) const {
        switch (form_) {
        case Form::power: return alpha_ * std::pow(t0_ + t, alpha_ - 1.0);
        case Form::constant: return 0.0;
        case Form::custom: return beta_dot_fn_(t);
        }
        return 0.0;
    }

    // Integral of beta over [s, t]; closed form except for custom curves,
    // which use adaptive Simpson refinement to 1e-12 relative.
    double beta_integral(double s, double t) const {
        switch (form_) {
        case Form::power: {
            const double p = alpha_ + 1.0;
            return (std::pow(t0_ + t, p) - std::pow(t0_ + s, p)) / p - (t - s);
        }
        case Form::constant: return beta_const_ * (t - s);
        case Form::custom: return integrate_custom(s, t);
        }
        return 0.0;
    }

    // Convergence-guaranteed regime for the power ramp.
    bool admissible_for(double m) const {
        if (form_ != Form::power) return form_ == Form::constant;
        return alpha_ <= kappa(m) + 1e-15;
    }

  private:
    double integrate_custom(double s, double t) const {
        double total = 0.0;
        std::size_t n = 64;
        double prev = 0.0;
        for (int pass = 0; pass < 16; ++pass) {
            total = 0.0;
            const double h = (t - s) / static_cast<double>(n);
            double odd = 0.0, even = 0.0;
            for (std::size_t i = 1; i < n; i += 2) odd += beta_fn_(s + h * static_cast<double>(i));
            for (std::size_t i = 2; i < n; i += 2) even += beta_fn_(s + h * static_cast<double>(i));
            total = h / 3.0 * (beta_fn_(s) + beta_fn_(t) + 4.0 * odd + 2.0 * even);
            if (pass > 0 && std::abs(total - prev) <= 1e-12 * (1.0 + std::abs(total))) return total;
            prev = total;
            n *= 2;
        }
        return total;
    }

    Form form_ = Form::constant;
    double t0_ = 1.0;
    double alpha_ = 0.25;
    double beta_const_ = 0.0;
    std::function<double(double)> beta_fn_;
    std::function<double(double)> beta_dot_fn_;
};

} // namespace swarm
