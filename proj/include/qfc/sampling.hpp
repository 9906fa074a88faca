#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>

#include "qfc/channel.hpp"

namespace qfc {

/// Additive-recurrence (Kronecker) low-discrepancy sequence in [0, 1)^6.
/// Fully deterministic; used wherever a spread of parameter tuples is needed
/// without a random number generator.
class WeylSequence {
public:
    std::array<double, 6> at(std::size_t n) const {
        // fractional parts of sqrt of the first six primes
        static constexpr std::array<double, 6> kAlpha = {0.41421356237309515, 0.7320508075688772,
                                                         0.2360679774997898,  0.6457513110645907,
                                                         0.3166247903554,     0.6055512754639891};
        std::array<double, 6> u{};
        for (std::size_t k = 0; k < u.size(); ++k) {
            const double v = 0.5 + static_cast<double>(n + 1) * kAlpha[k];
            u[k] = v - std::floor(v);
        }
        return u;
    }
};

/// Maps a point of the unit cube onto the admissible parameter box.
inline ControlParams params_from_unit(const std::array<double, 6>& u) {
    ControlParams c;
    c.theta = u[0] * kHalfPi;
    c.phi = u[1] * kTwoPi;
    c.p = u[2] * 0.5;
    c.chi = u[3] * kHalfPi;
    c.eta = std::numbers::pi - u[4] * kTwoPi;  // (-pi, pi]
    c.beta = u[5] * kTwoPi;
    if (c.phi >= kTwoPi) c.phi = 0.0;
    if (c.beta >= kTwoPi) c.beta = 0.0;
    if (c.eta <= -std::numbers::pi) c.eta = std::numbers::pi;
    return c;
}

}  // namespace qfc
