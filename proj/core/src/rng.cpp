#include "levykb/rng.hpp"

#include <cmath>
#include <numbers>

namespace levykb {

double Rng::stable(double alpha) {
    // Chambers-Mallows-Stuck, symmetric case: U uniform on (-pi/2, pi/2),
    // E exponential(1); cf of the result is exp(-|u|^alpha).
    const double u = (uniform() - 0.5) * std::numbers::pi;
    double e;
    do {
        e = -std::log1p(-uniform());
    } while (!(e > 0.0));
    const double num = std::sin(alpha * u);
    const double den = std::pow(std::cos(u), 1.0 / alpha);
    const double tail = std::pow(std::cos((1.0 - alpha) * u) / e, (1.0 - alpha) / alpha);
    return num / den * tail;
}

} // namespace levykb
