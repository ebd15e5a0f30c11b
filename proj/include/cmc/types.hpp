#pragma once

#include <stdexcept>

namespace cmc {

/// Dimensional parameters of the rotational immersion
/// S^ell x S^m x S^1 -> S^(ell+m+2), plus the target mean curvature H.
/// n is never stored: it is always recomputed as ell + m + 1.
struct ModelParams {
    int ell = 1;
    int m = 1;
    double H = 0.0;

    int n() const noexcept { return ell + m + 1; }
    bool valid() const noexcept { return ell >= 1 && m >= 1; }
};

inline ModelParams with_H(ModelParams p, double H) {
    p.H = H;
    return p;
}

/// State of the profile curve at arc length t.  theta is unwrapped (no
/// reduction mod 2*pi): the closure condition compares theta(T) against pi
/// as a plain real number, and the reflection extension needs the raw angle.
struct ProfileState {
    double t = 0.0;
    double f1 = 0.0;
    double f2 = 0.0;
    double theta = 0.0;
};

/// Quantities derived from a profile state:
///   g  = f2 cos(theta) - f1 sin(theta)
///   h  = sqrt(1 - g^2)
///   f3 = sqrt(1 - f1^2 - f2^2)
struct DerivedQuantities {
    double g;
    double h;
    double f3;
};

struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OutOfRangeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace cmc
