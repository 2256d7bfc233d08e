#pragma once

#include <concepts>

namespace sea {

/// State types usable with the fixed-step integrators: closed under addition
/// and scalar multiplication.
template <typename S>
concept VectorLike = requires(S a, S b, double h) {
    { a + b } -> std::convertible_to<S>;
    { h * a } -> std::convertible_to<S>;
};

/// Classical fourth-order Runge-Kutta step of x' = f(t, x).
template <VectorLike State, typename Field>
    requires std::invocable<Field&, double, const State&>
State rk4_step(Field&& f, double t, const State& x, double dt) {
    const State k1 = f(t, x);
    const State k2 = f(t + 0.5 * dt, x + (0.5 * dt) * k1);
    const State k3 = f(t + 0.5 * dt, x + (0.5 * dt) * k2);
    const State k4 = f(t + dt, x + dt * k3);
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace sea
