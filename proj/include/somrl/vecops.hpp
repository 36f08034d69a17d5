#pragma once

#include <cmath>
#include <span>

#include "somrl/errors.hpp"

namespace somrl {

inline double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ContractViolation("dot: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double squared_norm(std::span<const double> a) {
    double s = 0.0;
    for (double v : a) s += v * v;
    return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(squared_norm(a)); }

// Cosine similarity of two non-zero vectors, clamped to [-1, 1].
inline double cosine(std::span<const double> a, std::span<const double> b) {
    const double na = squared_norm(a);
    const double nb = squared_norm(b);
    if (na == 0.0 || nb == 0.0)
        throw ContractViolation("cosine: undefined for zero-norm vector");
    const double c = dot(a, b) / std::sqrt(na * nb);
    return c > 1.0 ? 1.0 : (c < -1.0 ? -1.0 : c);
}

}  // namespace somrl
