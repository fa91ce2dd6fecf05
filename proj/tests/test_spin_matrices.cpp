#include <catch2/catch_amalgamated.hpp>

#include "nvc/spin_matrices.hpp"

using namespace nvc;

namespace {

double max_abs(const Matrix3c& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("spin-1 matrices are Hermitian") {
    const auto& s = SpinMatrices::spin1();
    for (const auto* m : {&s.sx, &s.sy, &s.sz}) {
        CHECK(max_abs(*m - m->adjoint()) < 1e-14);
    }
}

TEST_CASE("spin-1 commutation relations") {
    const auto& s = SpinMatrices::spin1();
    const std::complex<double> i(0.0, 1.0);
    CHECK(max_abs(s.sx * s.sy - s.sy * s.sx - i * s.sz) < 1e-14);
    CHECK(max_abs(s.sy * s.sz - s.sz * s.sy - i * s.sx) < 1e-14);
    CHECK(max_abs(s.sz * s.sx - s.sx * s.sz - i * s.sy) < 1e-14);
}

TEST_CASE("spin-1 component eigenvalues are -1, 0, +1") {
    const auto& s = SpinMatrices::spin1();
    for (const auto* m : {&s.sx, &s.sy, &s.sz}) {
        Eigen::SelfAdjointEigenSolver<Matrix3c> solver(*m);
        REQUIRE(solver.info() == Eigen::Success);
        const auto ev = solver.eigenvalues();
        CHECK(std::abs(ev[0] + 1.0) < 1e-14);
        CHECK(std::abs(ev[1]) < 1e-14);
        CHECK(std::abs(ev[2] - 1.0) < 1e-14);
    }
}

TEST_CASE("Casimir S^2 = S(S+1) identity") {
    const auto& s = SpinMatrices::spin1();
    const Matrix3c s2 = s.sx * s.sx + s.sy * s.sy + s.sz * s.sz;
    CHECK(max_abs(s2 - 2.0 * s.identity) < 1e-14);
}

TEST_CASE("kron3 reproduces the product-basis block structure") {
    const auto& s = SpinMatrices::spin1();
    const Matrix9c k = kron3(s.sz, s.identity);
    for (int i = 0; i < 9; ++i) {
        const double expected = static_cast<double>(1 - i / 3);
        CHECK(std::abs(k(i, i).real() - expected) < 1e-15);
    }
    const Matrix9c zz = kron3(s.sz, s.sz);
    CHECK(std::abs(zz(0, 0).real() - 1.0) < 1e-15);  // |+1,+1>
    CHECK(std::abs(zz(2, 2).real() + 1.0) < 1e-15);  // |+1,-1>
    CHECK(std::abs(zz(8, 8).real() - 1.0) < 1e-15);  // |-1,-1>
    CHECK(zz.cwiseAbs().sum() == 4.0);               // diagonal with four nonzero entries
}
