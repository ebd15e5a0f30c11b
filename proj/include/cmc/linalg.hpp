#pragma once

#include <array>
#include <cmath>

#include "cmc/types.hpp"

namespace cmc {

using Vec3 = std::array<double, 3>;

inline double dot(const Vec3& a, const Vec3& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0]};
}

inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

inline Vec3 scaled(const Vec3& a, double c) {
    return {a[0] * c, a[1] * c, a[2] * c};
}

inline Vec3 operator+(const Vec3& a, const Vec3& b) {
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}

inline Vec3 operator-(const Vec3& a, const Vec3& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

/// Solve A x = b for small dense systems by Gaussian elimination with
/// partial pivoting.  Throws DomainError on a (numerically) singular matrix.
template <int N>
std::array<double, N> solve_dense(std::array<std::array<double, N>, N> A,
                                  std::array<double, N> b) {
    for (int col = 0; col < N; ++col) {
        int pivot = col;
        for (int r = col + 1; r < N; ++r)
            if (std::abs(A[r][col]) > std::abs(A[pivot][col])) pivot = r;
        if (std::abs(A[pivot][col]) < 1e-300)
            throw DomainError("singular linear system");
        std::swap(A[col], A[pivot]);
        std::swap(b[col], b[pivot]);
        for (int r = col + 1; r < N; ++r) {
            const double f = A[r][col] / A[col][col];
            for (int c = col; c < N; ++c) A[r][c] -= f * A[col][c];
            b[r] -= f * b[col];
        }
    }
    std::array<double, N> x{};
    for (int r = N - 1; r >= 0; --r) {
        double acc = b[r];
        for (int c = r + 1; c < N; ++c) acc -= A[r][c] * x[c];
        x[r] = acc / A[r][r];
    }
    return x;
}

}  // namespace cmc
