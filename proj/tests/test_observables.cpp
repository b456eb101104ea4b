#include "doctest.h"

#include "nltc/errors.hpp"
#include "nltc/evolution.hpp"
#include "nltc/observables.hpp"

#include <cmath>
#include <numbers>
#include <algorithm>
#include <sstream>

using namespace nltc;

namespace {
constexpr double kPi = std::numbers::pi;

JointState ee_state(double n) {
    return build_initial(BellAmplitudes::preset("ee"), {std::sqrt(n), 0.0}, default_truncation(n));
}

bool near(Complex a, Complex b, double r) { return std::abs(a - b) < r; }
}  // namespace

TEST_CASE("S_z expectation") {
    CHECK(expect_sz(ee_state(85)) == doctest::Approx(1.0));
    JointState p(1, 10);
    p.at(kPsiPlus, 4) = 1.0;
    CHECK(expect_sz(p) == 0.0);
    JointState g(1, 10);
    g.at(kGG, 3) = 1.0;
    CHECK(expect_sz(g) == -1.0);

    const auto bs = IntensityModel::buck_sukumar();
    const auto spec = linearize(bs, 85);
    const double at_tc = expect_sz(evolve_exact(ee_state(85), bs, spec.t_collapse));
    CHECK(std::abs(at_tc) < std::exp(-2.0) + 0.005);
    CHECK(std::abs(at_tc - approx_sz(spec, spec.t_collapse)) < 0.02);
    CHECK(std::abs(expect_sz(evolve_exact(ee_state(85), bs, 3.0 * spec.t_collapse))) < 0.05);
}

TEST_CASE("excitation number and total spin") {
    JointState s(1, 10);
    s.at(kEE, 3) = 1.0;
    CHECK(expect_excitations(s) == doctest::Approx(4.0));
    CHECK(expect_spin_squared(s) == doctest::Approx(2.0));
    JointState singlet(1, 10);
    singlet.at(kPsiMinus, 2) = 1.0;
    CHECK(expect_spin_squared(singlet) == 0.0);
    CHECK(expect_excitations(singlet) == doctest::Approx(2.0));
}

TEST_CASE("closed-form S_z") {
    const auto spec = linearize(IntensityModel::buck_sukumar(), 85);
    CHECK(approx_sz(spec, 0.0) == doctest::Approx(1.0));
    CHECK(approx_sz(spec, spec.t_revival) == doctest::Approx(std::cos(spec.delta_N * spec.t_revival)));
    const auto exact0 = ee_state(85);
    double worst = 0.0;
    double tail = 0.0;
    for (int i = 0; i <= 400; ++i) {
        const double t = i * spec.t_revival / 1600.0;
        const double ex = expect_sz(evolve_exact(exact0, IntensityModel::buck_sukumar(), t));
        worst = std::max(worst, std::abs(ex - approx_sz(spec, t)));
        if (t > 2.0 * spec.t_collapse) tail = std::max(tail, std::abs(ex - approx_sz(spec, t)));
    }
    CHECK(worst < 0.07);
    CHECK(tail < 0.01);
}

TEST_CASE("perfect Buck-Sukumar revival") {
    const auto bs = IntensityModel::buck_sukumar();
    const auto spec = linearize(bs, 85);
    const auto s0 = ee_state(85);
    double peak = 0.0;
    for (int i = 0; i <= 400; ++i) {
        const double t = spec.t_revival * (0.95 + 0.1 * i / 400.0);
        peak = std::max(peak, std::abs(expect_sz(evolve_exact(s0, bs, t))));
    }
    CHECK(peak >= 0.9);
    for (int k = 1; k <= 3; ++k) CHECK(std::abs(approx_sz(spec, k * spec.t_revival) - std::cos(spec.delta_N * k * spec.t_revival)) < 1e-12);
}

TEST_CASE("coherent overlap") {
    const auto spec = linearize(IntensityModel::buck_sukumar(), 50);
    CHECK(near(coherent_overlap(std::sqrt(50.0), spec, 0.0), 1.0, 1e-15));
    const double t = kPi / spec.omega_prime_N;
    CHECK(std::abs(coherent_overlap(std::sqrt(50.0), spec, t)) == doctest::Approx(std::exp(-100.0)).epsilon(1e-6));

    for (double n : {4.0, 50.0, 200.0}) {
        const auto sp = linearize(IntensityModel::tavis_cummings(), n);
        const int n_max = default_truncation(n);
        for (double t2 : {0.1, 3.0, 17.0}) {
            const auto a = coherent_fock({std::sqrt(n), 0.0}, n_max);
            const auto b = coherent_fock({std::sqrt(n), sp.omega_prime_N * t2}, n_max);
            CHECK(near(a.dot(b), coherent_overlap(std::sqrt(n), sp, t2), 1e-8));
        }
    }
}

TEST_CASE("Husimi of a coherent state") {
    const double alpha = 3.0;
    const int n_max = default_truncation(9);
    const auto c = coherent_fock({alpha, 0.0}, n_max);
    const Eigen::MatrixXcd rho = c * c.adjoint();
    HusimiWindow w{-6.0, 6.0, -6.0, 6.0, 121};
    const auto g = husimi(rho, w);
    const auto peaks = g.local_maxima(0.01);
    REQUIRE(peaks.size() == 1);
    CHECK(near(peaks[0].beta, alpha, 1e-9));
    CHECK(peaks[0].value == doctest::Approx(1.0 / kPi).epsilon(1e-9));
    CHECK(g.integral == doctest::Approx(1.0).epsilon(0.01));
    CHECK(g.warnings.empty());
    CHECK(g.values.minCoeff() >= 0.0);
    CHECK(g.values.maxCoeff() <= 1.0 / kPi + 1e-9);

    const auto coarse = husimi(rho, HusimiWindow{0.0, 1.0, 0.0, 1.0, 5});
    CHECK_FALSE(coarse.warnings.empty());
    CHECK_THROWS_AS(husimi(rho, HusimiWindow{0.0, 1.0, 0.0, 1.0, 1}), DomainError);
}

TEST_CASE("Husimi from a joint state matches the density-matrix path") {
    const auto bs = IntensityModel::buck_sukumar();
    const auto s = evolve_exact(build_initial(haar_random_two_qubit(4), {3.0, 0.0}, 60), bs, 0.4);
    HusimiWindow w{-5.0, 5.0, -5.0, 5.0, 41};
    const auto a = husimi(s, w);
    const auto b = husimi(partial_trace_oscillator(s), w);
    CHECK((a.values - b.values).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("Husimi peaks at fractional revivals") {
    const auto bs = IntensityModel::buck_sukumar();
    const auto spec = linearize(bs, 85);
    const double alpha = std::sqrt(85.0);
    const auto s0 = ee_state(85);
    const auto w = HusimiWindow::around(alpha, 101);

    const auto quarter = husimi(evolve_exact(s0, bs, spec.t_revival / 4.0), w);
    const auto qp = quarter.local_maxima(0.1 / kPi);
    CHECK(qp.size() == 3);
    for (Complex target : {Complex(alpha, 0.0), Complex(0.0, alpha), Complex(0.0, -alpha)}) {
        bool found = false;
        for (const auto& p : qp) found = found || std::abs(p.beta - target) < 1.0;
        CHECK(found);
    }

    const auto half = husimi(evolve_exact(s0, bs, spec.t_revival / 2.0), w);
    for (const auto& p : half.local_maxima(0.1 / kPi)) {
        CHECK((std::abs(p.beta - alpha) < 1.0 || std::abs(p.beta + alpha) < 1.0));
    }
    bool minus = false;
    for (const auto& p : half.local_maxima(0.1 / kPi)) minus = minus || std::abs(p.beta + alpha) < 1.0;
    CHECK(minus);
}

TEST_CASE("Husimi CSV") {
    const auto c = coherent_fock({1.0, 0.0}, 20);
    const auto g = husimi(Eigen::MatrixXcd(c * c.adjoint()), HusimiWindow{-1.0, 1.0, -1.0, 1.0, 3});
    std::ostringstream os;
    g.write_csv(os);
    const std::string text = os.str();
    CHECK(text.rfind("beta_re,beta_im,Q\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 10);
}

TEST_CASE("state fidelity") {
    const auto s = ee_state(20);
    CHECK(state_fidelity(s, s) == doctest::Approx(1.0));
    auto scaled = s;
    scaled.data() *= 2.0;
    CHECK(state_fidelity(s, scaled, 4.0) == doctest::Approx(1.0));
    const auto other = evolve_exact(s, IntensityModel::tavis_cummings(), 0.3);
    CHECK(state_fidelity(s, other) == doctest::Approx(state_fidelity(other, s)));
    CHECK_THROWS(state_fidelity(s, JointState(1, 5), 1.0));
}

TEST_CASE("state fidelity reference behaviour") {
    const auto bs = IntensityModel::buck_sukumar();
    const auto spec = linearize(bs, 2000);
    const auto atoms = haar_random_two_qubit(31);
    const int n_max = default_truncation(2000);
    const auto ex = evolve_exact(build_initial(atoms, {std::sqrt(2000.0), 0.0}, n_max), bs, spec.t_revival);
    const auto ap = approx_state(atoms, std::sqrt(2000.0), spec, spec.t_revival);
    CHECK(state_fidelity(ex, ap.materialize(n_max), ap.normalization) > 0.99);

    const auto tc = IntensityModel::tavis_cummings();
    const auto ts = linearize(tc, 85);
    const auto ee = BellAmplitudes::preset("ee");
    const auto ex2 = evolve_exact(ee_state(85), tc, ts.t_revival);
    const auto ap2 = approx_state(ee, std::sqrt(85.0), ts, ts.t_revival);
    CHECK(state_fidelity(ex2, ap2.materialize(default_truncation(85)), ap2.normalization) < 0.8);
}

TEST_CASE("atomic fidelity") {
    const auto a = AtomicDensityMatrix::from_pure(haar_random_two_qubit(1));
    const auto b = AtomicDensityMatrix::from_pure(haar_random_two_qubit(2));
    CHECK(atomic_fidelity(a, a) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(atomic_fidelity(a, b) == doctest::Approx(std::norm(haar_random_two_qubit(1).bell_vector().dot(
                                                         haar_random_two_qubit(2).bell_vector())))
                                       .epsilon(1e-9));
    Mat4 d0 = Mat4::Zero(), d1 = Mat4::Zero();
    d0(0, 0) = 1.0;
    d1(1, 1) = 1.0;
    CHECK(atomic_fidelity(AtomicDensityMatrix::from_bell(d0), AtomicDensityMatrix::from_bell(d1)) < 1e-12);

    Mat4 mixed = Mat4::Zero();
    mixed.diagonal() << 0.5, 0.3, 0.2, 0.0;
    const auto m = AtomicDensityMatrix::from_bell(mixed);
    CHECK(std::abs(atomic_fidelity(m, a) - atomic_fidelity(a, m)) < 1e-9);
    Mat4 bad = Mat4::Zero();
    bad.diagonal() << 1.5, -0.5, 0.0, 0.0;
    CHECK_THROWS_AS(atomic_fidelity(AtomicDensityMatrix::from_bell(bad), a), InvalidStateError);
}
