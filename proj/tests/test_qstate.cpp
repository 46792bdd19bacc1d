#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "phasekey/oracles.hpp"
#include "phasekey/qstate.hpp"

using namespace phasekey::qstate;
using phasekey::oracles::coherent_overlap_exact;

namespace {

const cplx I(0.0, 1.0);

void expect_near(cplx a, cplx b, double tol) {
    EXPECT_NEAR(a.real(), b.real(), tol);
    EXPECT_NEAR(a.imag(), b.imag(), tol);
}

}  // namespace

TEST(FockKet, VacuumCoherentState) {
    const auto v = make_coherent(0.0, 4);
    ASSERT_EQ(v.dim(), 5u);
    expect_near(v[0], 1.0, 0.0);
    for (std::size_t n = 1; n < 5; ++n) expect_near(v[n], 0.0, 0.0);
}

TEST(FockKet, CoherentNormAtAlphaOne) {
    const auto v = make_coherent(1.0, 40);
    EXPECT_NEAR(v.squared_norm(), 1.0, 1e-12);
    EXPECT_LT(v.tail_mass(), 1e-12);
}

TEST(FockKet, AmplitudesMatchRecurrence) {
    const cplx alpha(1.3, -0.4);
    const auto v = make_coherent(alpha, 50);
    const auto ref = phasekey::oracles::coherent_amplitudes(alpha, 50);
    for (int n = 0; n <= 50; ++n) expect_near(v[n], ref[n], 1e-14);
}

TEST(FockKet, TruncationLosesNorm) {
    const auto v = make_coherent(2.0, 3);
    EXPECT_LT(v.squared_norm(), 1.0);
    EXPECT_GT(v.tail_mass(), 0.0);
}

TEST(FockKet, RejectsBadInput) {
    EXPECT_THROW(make_coherent(cplx(std::nan(""), 0.0), 5), std::invalid_argument);
    EXPECT_THROW(make_coherent(1.0, -1), std::invalid_argument);
    EXPECT_THROW(FockKet(std::vector<cplx>{}), std::invalid_argument);
    EXPECT_THROW(FockKet(std::vector<cplx>{1.0, 1.0}), std::invalid_argument);
}

TEST(FockKet, OverlapSpotValue) {
    const cplx a(0.3, 0.1), b(0.7, 0.0);
    const auto got = inner(make_coherent(a, 60), make_coherent(b, 60));
    expect_near(got, coherent_overlap_exact(a, b), 1e-10);
}

TEST(FockKet, OverlapRandomPairs) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> r(0.0, 3.0), ph(-std::numbers::pi, std::numbers::pi);
    for (int i = 0; i < 50; ++i) {
        const auto a = std::polar(r(rng), ph(rng));
        const auto b = std::polar(r(rng), ph(rng));
        const auto got = inner(make_coherent(a, 80), make_coherent(b, 80));
        EXPECT_LE(std::abs(got - coherent_overlap_exact(a, b)), 1e-9) << a << " " << b;
    }
}

TEST(FockKet, InnerIsConjugateLinearAndPositive) {
    const auto x = make_coherent(cplx(0.5, 0.2), 30);
    const auto y = make_coherent(cplx(-0.1, 0.9), 30);
    expect_near(inner(x, y), std::conj(inner(y, x)), 1e-15);
    const cplx xx = inner(x, x);
    EXPECT_GE(xx.real(), 0.0);
    EXPECT_NEAR(xx.imag(), 0.0, 1e-15);
}

TEST(FockKet, DimensionMismatchThrows) {
    EXPECT_THROW(inner(make_coherent(0.5, 10), make_coherent(0.5, 11)), std::invalid_argument);
}

TEST(Qubit, BasisOverlaps) {
    const double h = 1.0 / std::sqrt(2.0);
    expect_near(inner(x_ket(0), x_ket(1)), 0.0, 1e-15);
    expect_near(inner(y_ket(0), y_ket(1)), 0.0, 1e-15);
    expect_near(inner(z_ket(0), x_ket(1)), h, 1e-15);
    expect_near(inner(z_ket(1), x_ket(1)), -h, 1e-15);
    expect_near(inner(z_ket(1), y_ket(0)), I * h, 1e-15);
    expect_near(inner(z_ket(1), y_ket(1)), -I * h, 1e-15);
    expect_near(inner(x_ket(0), y_ket(0)), 0.5 * (1.0 + I), 1e-15);
    for (int j = 0; j < 2; ++j) {
        EXPECT_NEAR(x_ket(j).squared_norm(), 1.0, 1e-12);
        EXPECT_NEAR(y_ket(j).squared_norm(), 1.0, 1e-12);
    }
}

TEST(Qubit, PhiZeroInZBasis) {
    // cos(d/2)|0x> - i sin(d/2)|1x> = (e^{-id/2}|0z> + e^{id/2}|1z>)/sqrt(2)
    const double d = 0.1;
    const auto phi = phi_ket(0, d);
    expect_near(inner(z_ket(0), phi), std::exp(-I * (d / 2)) / std::sqrt(2.0), 1e-12);
    expect_near(inner(z_ket(1), phi), std::exp(I * (d / 2)) / std::sqrt(2.0), 1e-12);
}

TEST(Qubit, PhiBarOrthogonalToPhi) {
    for (double d : {0.01, 0.3, 1.0}) {
        for (int j = 0; j < 2; ++j) {
            expect_near(inner(phi_ket(j, d), phi_bar_ket(j, d)), 0.0, 1e-15);
            EXPECT_NEAR(phi_bar_ket(j, d).squared_norm(), 1.0, 1e-12);
        }
    }
}

TEST(Qubit, ApplyIdentityAndProjector) {
    const QubitKet v{cplx(0.3, 0.1), cplx(-0.2, 0.7)};
    const auto w = apply(QubitOperator::identity(), v);
    expect_near(w.c0, v.c0, 0.0);
    expect_near(w.c1, v.c1, 0.0);
    const auto z = apply(QubitOperator::projector(x_ket(0)), x_ket(1));
    EXPECT_NEAR(z.squared_norm(), 0.0, 1e-30);
}

TEST(Qubit, FilterOnZeroZ) {
    const double d = 0.2;
    const auto fs = std::sin(d / 2) * QubitOperator::projector(x_ket(0)) +
                    std::cos(d / 2) * QubitOperator::projector(x_ket(1));
    const auto out = apply(fs, z_ket(0));
    expect_near(out.c0, (std::sin(0.1) + std::cos(0.1)) / 2, 1e-12);
    expect_near(out.c1, (std::sin(0.1) - std::cos(0.1)) / 2, 1e-12);
}

TEST(Qubit, Fidelity) {
    const QubitKet v = QubitKet{cplx(1.0, 2.0), cplx(-0.5, 0.0)}.normalized();
    EXPECT_NEAR(fidelity(v, v), 1.0, 1e-15);
    EXPECT_NEAR(fidelity(y_ket(0), y_ket(1)), 0.0, 1e-15);
    EXPECT_THROW(fidelity(QubitKet{1.0, 1.0}, y_ket(0)), std::invalid_argument);
    const auto mes = y_basis_mes();
    EXPECT_NEAR(fidelity(mes, mes), 1.0, 1e-15);
}

TEST(Qubit, OperatorHermiticityAndSpectrum) {
    const auto p = QubitOperator::projector(y_ket(1));
    EXPECT_TRUE(p.is_hermitian());
    const auto ev = p.hermitian_eigenvalues();
    EXPECT_NEAR(ev[0], 0.0, 1e-15);
    EXPECT_NEAR(ev[1], 1.0, 1e-15);
    const QubitOperator skew(0.0, 1.0, -1.0, 0.0);
    EXPECT_FALSE(skew.is_hermitian());
}

TEST(TwoQubit, SchmidtCoefficients) {
    const auto mes = y_basis_mes();
    const auto sc = schmidt_coefficients(mes);
    EXPECT_NEAR(sc[0], std::sqrt(0.5), 1e-12);
    EXPECT_NEAR(sc[1], std::sqrt(0.5), 1e-12);
    const auto prod = schmidt_coefficients(kron(x_ket(0), y_ket(1)));
    EXPECT_NEAR(prod[0], 1.0, 1e-12);
    EXPECT_NEAR(prod[1], 0.0, 1e-7);
}

TEST(TwoQubit, LocalPhaseFidelity) {
    // A relative phase on Bob's |1_y> leaves the local-phase fidelity at 1.
    const cplx ph = std::polar(1.0, 0.7);
    const auto v = (1.0 / std::sqrt(2.0)) * (kron(y_ket(0), y_ket(0)) + ph * kron(y_ket(1), y_ket(1)));
    EXPECT_NEAR(y_mes_fidelity_up_to_local_phase(v), 1.0, 1e-12);
    EXPECT_LT(fidelity(v, y_basis_mes()), 0.99);
    EXPECT_NEAR(y_mes_fidelity_up_to_local_phase(kron(y_ket(0), y_ket(0))), 0.5, 1e-12);
}

TEST(SinglePhoton, NumberStatesGiveBasis) {
    const auto one = FockKet::number(1, 3);
    const auto vac = FockKet::vacuum(3);
    const auto q = single_photon_qubit(one, vac);
    ASSERT_TRUE(q.has_value());
    EXPECT_NEAR(q->weight, 1.0, 1e-15);
    expect_near(q->qubit.c0, 0.0, 0.0);
    expect_near(q->qubit.c1, 1.0, 0.0);
    const auto r = single_photon_qubit(vac, one);
    ASSERT_TRUE(r.has_value());
    expect_near(r->qubit.c0, 1.0, 0.0);
}

TEST(SinglePhoton, VacuumIsDegenerate) {
    EXPECT_FALSE(single_photon_qubit(FockKet::vacuum(2), FockKet::vacuum(2)).has_value());
    EXPECT_THROW(single_photon_component(FockKet::vacuum(0), FockKet::vacuum(0)), std::invalid_argument);
}

TEST(SinglePhoton, PulsePairWeightAndDirection) {
    for (double mu : {0.1, 0.5, 1.0, 2.5, 5.0}) {
        const double d = 0.3;
        const auto sp = make_coherent(std::polar(std::sqrt(mu), d), 60);
        const auto rp = make_coherent(std::sqrt(mu), 60);
        const auto q = single_photon_qubit(sp, rp);
        ASSERT_TRUE(q.has_value());
        EXPECT_NEAR(q->weight, 2.0 * mu * std::exp(-2.0 * mu), 1e-10) << "mu=" << mu;
        const QubitKet expect{1.0 / std::sqrt(2.0), std::polar(1.0, d) / std::sqrt(2.0)};
        EXPECT_NEAR(fidelity(q->qubit, expect), 1.0, 1e-12);
    }
}
