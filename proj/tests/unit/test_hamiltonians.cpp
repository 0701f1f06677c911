#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>

#include "mqspin/error.hpp"
#include "mqspin/evolution.hpp"
#include "mqspin/hamiltonians.hpp"
#include "mqspin/mq.hpp"
#include "support/generators.hpp"

using namespace mqspin;
using mqspin::testing::max_abs;

namespace {

// Term-by-term construction from explicit single-spin operator products.
CMatrix dq_from_products(const SpinSystem& sys, const ZeemanBasis& basis) {
    const auto dim = static_cast<Eigen::Index>(basis.dim());
    CMatrix h = CMatrix::Zero(dim, dim);
    for (int i = 0; i < sys.n_spins; ++i) {
        for (int j = i + 1; j < sys.n_spins; ++j) {
            const CMatrix pi = single_spin_op(basis, i, SpinComponent::plus).matrix;
            const CMatrix pj = single_spin_op(basis, j, SpinComponent::plus).matrix;
            const CMatrix mi = single_spin_op(basis, i, SpinComponent::minus).matrix;
            const CMatrix mj = single_spin_op(basis, j, SpinComponent::minus).matrix;
            h += -0.5 * sys.couplings(i, j) * (pi * pj + mi * mj);
        }
    }
    return h;
}

CMatrix secular_from_products(const SpinSystem& sys, const ZeemanBasis& basis) {
    const auto dim = static_cast<Eigen::Index>(basis.dim());
    CMatrix h = CMatrix::Zero(dim, dim);
    for (int i = 0; i < sys.n_spins; ++i) {
        for (int j = i + 1; j < sys.n_spins; ++j) {
            const CMatrix zi = single_spin_op(basis, i, SpinComponent::z).matrix;
            const CMatrix zj = single_spin_op(basis, j, SpinComponent::z).matrix;
            const CMatrix pi = single_spin_op(basis, i, SpinComponent::plus).matrix;
            const CMatrix pj = single_spin_op(basis, j, SpinComponent::plus).matrix;
            const CMatrix mi = single_spin_op(basis, i, SpinComponent::minus).matrix;
            const CMatrix mj = single_spin_op(basis, j, SpinComponent::minus).matrix;
            h += sys.couplings(i, j) * (2.0 * zi * zj - 0.5 * (pi * mj + mi * pj));
        }
    }
    return h;
}

}  // namespace

TEST_CASE("hexagon coupling ratios") {
    const SpinSystem hex = hexagon_couplings(1.0);
    CHECK(hex.n_spins == 6);
    CHECK(hex.couplings(0, 1) == 1.0);
    CHECK(hex.couplings(0, 2) == doctest::Approx(0.19245009).epsilon(1e-8));
    CHECK(hex.couplings(0, 2) == doctest::Approx(1.0 / (3.0 * std::sqrt(3.0))));
    CHECK(hex.couplings(0, 3) == 0.125);
    CHECK(hex.couplings.isApprox(hex.couplings.transpose()));
    for (int i = 0; i < 6; ++i) {
        CHECK(hex.couplings(i, i) == 0.0);
        std::vector<double> row;
        for (int j = 0; j < 6; ++j) {
            if (j != i) row.push_back(hex.couplings(i, j));
        }
        std::sort(row.begin(), row.end());
        const double r3 = 1.0 / (3.0 * std::sqrt(3.0));
        CHECK(row[0] == doctest::Approx(0.125));
        CHECK(row[1] == doctest::Approx(r3));
        CHECK(row[2] == doctest::Approx(r3));
        CHECK(row[3] == 1.0);
        CHECK(row[4] == 1.0);
    }
    CHECK(hexagon_couplings(2.0).couplings.isApprox(2.0 * hex.couplings));
    CHECK_THROWS_AS(hexagon_couplings(0.0), ValidationError);
    CHECK_THROWS_AS(hexagon_couplings(-1.0), ValidationError);
}

TEST_CASE("double-quantum Hamiltonian, two spins") {
    RMatrix d(2, 2);
    d << 0, 1, 1, 0;
    const SpinSystem sys = SpinSystem::make(d, "pair");
    const ZeemanBasis b = build_basis(2);
    const Operator h = dq_hamiltonian(sys, b);
    CHECK(h.hermitian);
    CHECK(h.matrix(3, 0) == Complex(-0.5, 0.0));
    CHECK(h.matrix(0, 3) == Complex(-0.5, 0.0));
    CHECK(h.matrix.cwiseAbs().sum() == doctest::Approx(1.0));
    CHECK_THROWS_AS(dq_hamiltonian(sys, build_basis(3)), ValidationError);
}

TEST_CASE("double-quantum Hamiltonian, hexagon") {
    const SpinSystem hex = hexagon_couplings(1.0);
    const ZeemanBasis b = build_basis(6);
    const Operator h = dq_hamiltonian(hex, b);

    for (int a = 0; a < 64; ++a) {
        for (int c = 0; c < 64; ++c) {
            if (std::abs(b.twice_m(a) - b.twice_m(c)) != 4) CHECK(h.matrix(a, c) == Complex(0.0, 0.0));
        }
    }
    // Frobenius norm: products oracle, frozen numpy value, and the closed form
    // sum_{i<j} D_ij^2 * (1/4) * 2 * 2^(N-2).
    const CMatrix oracle = dq_from_products(hex, b);
    CHECK(std::abs(h.matrix.norm() - oracle.norm()) < 1e-12);
    CHECK(max_abs(h.matrix - oracle) < 1e-15);
    CHECK(h.matrix.norm() == doctest::Approx(7.08186259241012).epsilon(1e-13));

    // filtering at order 2 reproduces H
    const DensityMatrix as_state(h.matrix);
    CHECK(max_abs(filter_order(as_state, b, 2).matrix() - h.matrix) == 0.0);
    CHECK(h.matrix.imag().cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("negation is an exact time reversal") {
    const SpinSystem hex = hexagon_couplings(1.0);
    const ZeemanBasis b = build_basis(6);
    const Operator h = dq_hamiltonian(hex, b);
    const Operator minus_h = negated(h);
    CHECK((h.matrix + minus_h.matrix).norm() == 0.0);

    const EigenSystem es = diagonalize(h);
    const EigenSystem es_neg = diagonalize(minus_h);
    for (Eigen::Index k = 0; k < es.eigenvalues.size(); ++k) {
        CHECK(es_neg.eigenvalues(k) == doctest::Approx(-es.eigenvalues(63 - k)).epsilon(1e-12));
    }
    const DensityMatrix rho0 = thermal_state(b);
    const DensityMatrix back = evolve(evolve(rho0, h, 0.8), minus_h, 0.8);
    CHECK(max_abs(back.matrix() - rho0.matrix()) < 1e-10);
}

TEST_CASE("secular dipolar Hamiltonian, two spins") {
    RMatrix d(2, 2);
    d << 0, 1, 1, 0;
    const SpinSystem sys = SpinSystem::make(d, "pair");
    const ZeemanBasis b = build_basis(2);
    const Operator h = secular_dipolar_hamiltonian(sys, b);
    // explicit 4x4 in the order dd, du, ud, uu:
    //   2 Iz Iz = diag(1/2, -1/2, -1/2, 1/2); flip-flop -1/2 between du and ud
    Eigen::Matrix4d explicit_h;
    explicit_h << 0.5, 0, 0, 0,
                  0, -0.5, -0.5, 0,
                  0, -0.5, -0.5, 0,
                  0, 0, 0, 0.5;
    CHECK(max_abs(h.matrix - explicit_h.cast<Complex>()) == 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(explicit_h);
    CHECK(es.eigenvalues()(0) == doctest::Approx(-1.0));
    CHECK(std::abs(es.eigenvalues()(1)) < 1e-15);
    CHECK(es.eigenvalues()(2) == doctest::Approx(0.5));
    CHECK(es.eigenvalues()(3) == doctest::Approx(0.5));
    const EigenSystem mine = diagonalize(h);
    CHECK((mine.eigenvalues - es.eigenvalues()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("secular dipolar Hamiltonian, hexagon") {
    const SpinSystem hex = hexagon_couplings(1.0);
    const ZeemanBasis b = build_basis(6);
    const Operator h = secular_dipolar_hamiltonian(hex, b);
    CHECK(max_abs(h.matrix - secular_from_products(hex, b)) < 1e-15);
    CHECK(h.matrix.norm() == doctest::Approx(12.2661458222758).epsilon(1e-13));

    const CMatrix iz = collective_op(b, SpinComponent::z).matrix;
    CHECK(max_abs(h.matrix * iz - iz * h.matrix) < 1e-14);
    CHECK(h.matrix.imag().cwiseAbs().maxCoeff() < 1e-14);

    const MQDecomposition dec = decompose(DensityMatrix(h.matrix), b);
    CHECK(max_abs(dec.component(0) - h.matrix) == 0.0);

    // m -> -m spectral symmetry, block by block
    std::map<int, std::vector<Eigen::Index>> blocks;
    for (Eigen::Index s = 0; s < 64; ++s) blocks[b.twice_m(s)].push_back(s);
    auto block_eigs = [&](int twice_m) {
        const auto& idx = blocks[twice_m];
        const auto n = static_cast<Eigen::Index>(idx.size());
        CMatrix sub(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) sub(i, j) = h.matrix(idx[i], idx[j]);
        return Eigen::SelfAdjointEigenSolver<CMatrix>(sub).eigenvalues().eval();
    };
    for (int tm = 2; tm <= 6; tm += 2) {
        const RVector a = block_eigs(tm);
        const RVector c = block_eigs(-tm);
        CHECK((a - c).cwiseAbs().maxCoeff() < 1e-12);
    }

    CHECK(max_abs(secular_dipolar_hamiltonian(hex, b, 2.0).matrix - 2.0 * h.matrix) < 1e-15);
}

TEST_CASE("highest-order coherence excitability rule") {
    CHECK(homq_excitable(2));
    CHECK_FALSE(homq_excitable(4));
    CHECK(homq_excitable(6));
    CHECK_FALSE(homq_excitable(8));
    CHECK(homq_excitable(10));
    CHECK_FALSE(homq_excitable(3));
}

TEST_CASE("coupling file import") {
    const auto dir = std::filesystem::temp_directory_path() / "mqspin_coupling_test";
    std::filesystem::create_directories(dir);
    const auto good = dir / "tri.txt";
    {
        std::ofstream out(good);
        out << "3\n0 1 0.5\n1 0 0.25\n0.5 0.25 0\n";
    }
    const SpinSystem sys = load_couplings(good);
    CHECK(sys.n_spins == 3);
    CHECK(sys.couplings(1, 2) == 0.25);
    CHECK(sys.label == "tri.txt");

    const auto asym = dir / "asym.txt";
    {
        std::ofstream out(asym);
        out << "2\n0 1\n2 0\n";
    }
    CHECK_THROWS_AS(load_couplings(asym), ValidationError);
    const auto short_file = dir / "short.txt";
    {
        std::ofstream out(short_file);
        out << "3\n0 1 0\n";
    }
    CHECK_THROWS_AS(load_couplings(short_file), ValidationError);
    CHECK_THROWS_AS(load_couplings(dir / "missing.txt"), ValidationError);
    std::filesystem::remove_all(dir);
}
