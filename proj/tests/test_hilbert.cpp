#include "doctest.h"

#include "nltc/entanglement.hpp"
#include "nltc/errors.hpp"
#include "nltc/hilbert.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace nltc;

namespace {
const double kS = 1.0 / std::sqrt(2.0);

double purity_of(const Eigen::MatrixXcd& rho) { return (rho * rho).trace().real(); }
}  // namespace

TEST_CASE("Bell and bare conventions") {
    const auto phi_plus = BellAmplitudes::from_bare(Vec4(kS, 0.0, 0.0, kS));
    CHECK(std::abs(phi_plus.d_plus - 1.0) < 1e-15);
    CHECK(std::abs(phi_plus.d_minus) < 1e-15);
    const auto psi_minus = BellAmplitudes::from_bare(Vec4(0.0, kS, -kS, 0.0));
    CHECK(std::abs(psi_minus.c_minus - 1.0) < 1e-15);

    const auto ee = BellAmplitudes::preset("ee");
    CHECK(std::abs(ee.d_plus - kS) < 1e-15);
    CHECK(std::abs(ee.d_minus + kS) < 1e-15);
    CHECK(std::abs(ee.c_e() - 1.0) < 1e-15);
    CHECK(std::abs(ee.c_g()) < 1e-15);
    CHECK_THROWS(BellAmplitudes::preset("xx"));
}

TEST_CASE("d_pm from c_g and c_e") {
    for (std::uint64_t k = 0; k < 20; ++k) {
        const auto a = haar_random_two_qubit(sample_seed(3, k));
        const Vec4 bare = a.bare();
        CHECK(std::abs(a.d_plus - (bare[0] + bare[3]) * kS) < 1e-14);
        CHECK(std::abs(a.d_minus - (bare[0] - bare[3]) * kS) < 1e-14);
        CHECK(std::abs(a.c_g() - bare[0]) < 1e-14);
        CHECK(std::abs(a.c_e() - bare[3]) < 1e-14);
    }
}

TEST_CASE("basis round trips") {
    for (std::uint64_t k = 0; k < 20; ++k) {
        const auto a = haar_random_two_qubit(sample_seed(11, k));
        CHECK((BellAmplitudes::from_bare(a.bare()).bell_vector() - a.bell_vector()).norm() < 1e-14);
        CHECK((BellAmplitudes::from_internal(a.internal()).bell_vector() - a.bell_vector()).norm() < 1e-14);
        CHECK(std::abs(a.norm_sq() - 1.0) < 1e-12);
    }
    const Mat4 op = Mat4::Random();
    CHECK((basis::bare_operator_to_bell(basis::bell_operator_to_bare(op)) - op).norm() < 1e-13);
}

TEST_CASE("coherent amplitudes") {
    const auto vac = coherent_fock({0.0, 0.0}, 10);
    CHECK(std::abs(vac[0] - 1.0) < 1e-15);
    CHECK(vac.tail(10).norm() == 0.0);

    const int n_max = default_truncation(85);
    const auto c = coherent_fock({std::sqrt(85.0), 0.0}, n_max);
    Eigen::Index arg;
    c.cwiseAbs().maxCoeff(&arg);
    CHECK((arg == 84 || arg == 85));
    CHECK(c.squaredNorm() == doctest::Approx(1.0).epsilon(1e-12));

    const auto plain = coherent_fock({2.0, 0.0}, 40);
    const auto flipped = coherent_fock({2.0, std::numbers::pi}, 40);
    for (int n = 0; n <= 40; ++n) CHECK(std::abs(flipped[n] - plain[n] * (n % 2 ? -1.0 : 1.0)) < 1e-14);

    // explicit factorial formula
    for (int n = 0; n <= 10; ++n) {
        double fact = 1.0;
        for (int k = 2; k <= n; ++k) fact *= k;
        CHECK(std::abs(plain[n].real() - std::exp(-2.0) * std::pow(2.0, n) / std::sqrt(fact)) < 1e-12);
    }
    CHECK_THROWS_AS(coherent_fock({std::sqrt(85.0), 0.0}, 90), TruncationError);
    CHECK_THROWS_AS(coherent_fock({-1.0, 0.0}, 10), DomainError);
}

TEST_CASE("large amplitudes stay finite") {
    const auto c = coherent_amplitudes(Complex(std::sqrt(5000.0), 0.0), 5600);
    CHECK(std::isfinite(c.squaredNorm()));
    CHECK(c.squaredNorm() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("default truncation") {
    for (double n : {1.0, 85.0, 2000.0}) {
        const int m = default_truncation(n);
        CHECK(m >= std::ceil(n + 8.0 * std::sqrt(n)));
    }
}

TEST_CASE("initial product states") {
    const double alpha = std::sqrt(85.0);
    const int n_max = default_truncation(85);
    const auto p = coherent_fock({alpha, 0.0}, n_max);

    const auto s = build_initial(BellAmplitudes::preset("ee"), {alpha, 0.0}, n_max);
    for (int n = 0; n <= n_max; ++n) CHECK(std::abs(s.at(kEE, n) - p[n]) < 1e-15);
    CHECK(s.norm_sq() == doctest::Approx(1.0).epsilon(1e-12));

    const auto singlet = build_initial(BellAmplitudes::preset("psi-"), {alpha, 0.0}, n_max);
    double off = 0.0;
    for (int n = 0; n <= n_max; ++n)
        for (int a = 1; a < 4; ++a) off += std::norm(singlet.at(a, n));
    CHECK(off == 0.0);

    const auto gg_ee = BellAmplitudes::from_bare(Vec4(kS, 0.0, 0.0, kS));
    CHECK((gg_ee.bell_vector() - Vec4(0.0, 0.0, 0.0, 1.0)).norm() < 1e-15);
    CHECK_THROWS_AS(build_initial(BellAmplitudes{2.0, 0.0, 0.0, 0.0}, {alpha, 0.0}, n_max), InvalidStateError);
}

TEST_CASE("two-mode states") {
    const auto s = build_initial(BellAmplitudes::preset("phi-"), {2.0, 0.0}, {1.5, 0.3}, 40);
    CHECK(s.mode_count() == 2);
    CHECK(s.norm_sq() == doctest::Approx(1.0).epsilon(1e-12));
    const auto pa = coherent_fock({2.0, 0.0}, 40);
    const auto pb = coherent_fock({1.5, 0.3}, 40);
    CHECK(std::abs(s.at(kGG, 3, 5) - kS * pa[3] * pb[5]) < 1e-15);
    CHECK_THROWS_AS(JointState(2, 5000), SizeGuardError);
}

TEST_CASE("Haar sampling") {
    const auto a = haar_random_two_qubit(42);
    const auto b = haar_random_two_qubit(42);
    CHECK((a.bell_vector() - b.bell_vector()).norm() == 0.0);
    CHECK(sample_seed(1, 2) == sample_seed(1, 2));
    CHECK(sample_seed(1, 2) != sample_seed(1, 3));

    const int samples = 10000;
    double mean_cm = 0.0;
    double mean_c = 0.0;
    double mean_prod_c = 0.0;
    for (int k = 0; k < samples; ++k) {
        const auto s = haar_random_two_qubit(sample_seed(2024, k));
        mean_cm += std::norm(s.c_minus);
        mean_c += pure_concurrence(s);
        mean_prod_c += pure_concurrence(haar_random_product(sample_seed(2024, k)));
    }
    mean_cm /= samples;
    mean_c /= samples;
    mean_prod_c /= samples;
    CHECK(std::abs(mean_cm - 0.25) < 0.013);
    // mean concurrence of Haar pure states on C2 x C2 is 3π/16
    CHECK(std::abs(mean_c - 3.0 * std::numbers::pi / 16.0) < 0.02);
    CHECK(mean_prod_c < 1e-12);
}

TEST_CASE("partial traces") {
    const double alpha = std::sqrt(85.0);
    const int n_max = default_truncation(85);
    const auto atoms = haar_random_two_qubit(5);
    const auto s = build_initial(atoms, {alpha, 0.0}, n_max);
    const auto rho = partial_trace_atoms(s);
    CHECK((rho.bell - atoms.bell_vector() * atoms.bell_vector().adjoint()).norm() < 1e-12);
    CHECK_NOTHROW(rho.validate());
    const auto rho_os = partial_trace_oscillator(s);
    CHECK(purity_of(rho_os) == doctest::Approx(1.0).epsilon(1e-12));

    // (|Ψ+>|α> + |Φ+>|-α>)/√2
    const auto plus = coherent_fock({alpha, 0.0}, n_max);
    const auto minus = coherent_fock({alpha, std::numbers::pi}, n_max);
    JointState cat(1, n_max);
    for (int m = 0; m <= n_max; ++m) {
        cat.at(kPsiPlus, m) = kS * plus[m];
        cat.at(kGG, m) = 0.5 * minus[m];
        cat.at(kEE, m) = 0.5 * minus[m];
    }
    const auto rc = partial_trace_atoms(cat);
    Mat4 expect = Mat4::Zero();
    expect(1, 1) = 0.5;
    expect(3, 3) = 0.5;
    CHECK((rc.bell - expect).cwiseAbs().maxCoeff() < 1e-12);
    const auto ro = partial_trace_oscillator(cat);
    CHECK(ro.trace().real() == doctest::Approx(1.0));
    CHECK(purity_of(ro) == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("Schmidt symmetry of purities") {
    for (std::uint64_t k = 0; k < 10; ++k) {
        const int n_max = 30;
        JointState s(1, n_max);
        std::mt19937_64 rng(sample_seed(99, k));
        std::normal_distribution<double> g;
        for (Eigen::Index i = 0; i < s.size(); ++i) s.data()[i] = Complex(g(rng), g(rng));
        s.data().normalize();
        const auto ra = partial_trace_atoms(s);
        const auto ro = partial_trace_oscillator(s);
        CHECK(std::abs((ra.bell * ra.bell).trace().real() - purity_of(ro)) < 1e-9);
    }
}

TEST_CASE("two-mode four-pointer state is maximally mixed on the atoms") {
    const double alpha = std::sqrt(20.0);
    const int n_max = default_truncation(20);
    JointState s(2, n_max);
    const auto p = coherent_fock({alpha, 0.0}, n_max);
    const auto q = coherent_fock({alpha, std::numbers::pi}, n_max);
    const Eigen::VectorXcd* field[2] = {&p, &q};
    const Mat4& t = basis::internal_from_bell();
    const int bell_of[2][2] = {{0, 2}, {3, 1}};
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            Vec4 bell = Vec4::Zero();
            bell[bell_of[a][b]] = 0.5;
            const Vec4 internal = t * bell;
            for (int ma = 0; ma <= n_max; ++ma)
                for (int mb = 0; mb <= n_max; ++mb)
                    for (int k = 0; k < 4; ++k) s.at(k, ma, mb) += internal[k] * (*field[a])[ma] * (*field[b])[mb];
        }
    const auto rho = partial_trace_atoms(s);
    CHECK((rho.bell - 0.25 * Mat4::Identity()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("density-matrix validation") {
    AtomicDensityMatrix bad;
    bad.bell = Mat4::Identity();
    CHECK_THROWS_AS(bad.validate(), InvalidStateError);
    bad.bell = 0.25 * Mat4::Identity();
    CHECK_NOTHROW(bad.validate());
    bad.bell(0, 0) = -0.1;
    bad.bell(1, 1) = 0.6;
    CHECK_THROWS_AS(bad.validate(), InvalidStateError);
}
