#pragma once

#include <complex>

#include <Eigen/Dense>

namespace nvc {

using Matrix3c = Eigen::Matrix3cd;
using Matrix9c = Eigen::Matrix<std::complex<double>, 9, 9>;

/// Spin-1 operator matrices (hbar = 1) in the basis |+1>, |0>, |-1>.
/// The same matrices serve the electron spin S and the 14N nuclear spin I.
struct SpinMatrices {
    Matrix3c sx, sy, sz, identity;

    static const SpinMatrices& spin1() {
        static const SpinMatrices m = [] {
            using namespace std::complex_literals;
            const double r = 1.0 / std::sqrt(2.0);
            SpinMatrices s;
            s.sx << 0, r, 0,
                    r, 0, r,
                    0, r, 0;
            s.sy << 0, -1i * r, 0,
                    1i * r, 0, -1i * r,
                    0, 1i * r, 0;
            s.sz << 1, 0, 0,
                    0, 0, 0,
                    0, 0, -1;
            s.identity = Matrix3c::Identity();
            return s;
        }();
        return m;
    }
};

/// Kronecker product for the |m_s> (x) |m_I> composite space.
inline Matrix9c kron3(const Matrix3c& a, const Matrix3c& b) {
    Matrix9c out;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            out.block<3, 3>(3 * i, 3 * j) = a(i, j) * b;
    return out;
}

}  // namespace nvc
