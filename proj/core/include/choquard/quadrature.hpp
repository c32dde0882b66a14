// Gauss-Legendre rules used by the angular kernel quadrature and by test
// oracles. Nodes are computed by Newton iteration on the Legendre recurrence.
#pragma once

#include <vector>

namespace choquard {

struct GaussLegendre {
    std::vector<double> nodes;    // in (-1, 1), ascending
    std::vector<double> weights;  // positive, sum to 2

    // Rule mapped onto [a, b].
    struct Mapped {
        std::vector<double> nodes;
        std::vector<double> weights;
    };
    Mapped mapped(double a, double b) const;
};

// n-point rule on (-1, 1); results are cached per n and safe to share.
const GaussLegendre& gauss_legendre(int n);

}  // namespace choquard
