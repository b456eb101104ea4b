#include "nltc/model.hpp"

#include "nltc/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace nltc {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kLaguerreRecurrenceLimit = 10000;

double sign_of(double v) { return v < 0.0 ? -1.0 : 1.0; }

bool is_integer(double n) { return std::floor(n) == n; }

double bessel_j(int order, double x) { return std::cyl_bessel_j(static_cast<double>(order), x); }

// Derivatives of g(x) = J1(sqrt(x)) with respect to x.
double j1_sqrt_d1(double x) {
    const double u = std::sqrt(x);
    const double dj1 = 0.5 * (bessel_j(0, u) - bessel_j(2, u));
    return dj1 / (2.0 * u);
}

double j1_sqrt_d2(double x) {
    const double u = std::sqrt(x);
    const double j1 = bessel_j(1, u);
    const double dj1 = 0.5 * (bessel_j(0, u) - bessel_j(2, u));
    // u J1'' - J1' = -2 J1' - (u² - 1) J1 / u   (Bessel equation)
    return (-2.0 * dj1 - (u * u - 1.0) * j1 / u) / (4.0 * u * u * u);
}

double j1_sqrt_d3(double x) {
    // five-point stencil on the analytic second derivative
    const double h = 1e-3 * std::max(1.0, x);
    return (-j1_sqrt_d2(x + 2 * h) + 8 * j1_sqrt_d2(x + h) - 8 * j1_sqrt_d2(x - h) +
            j1_sqrt_d2(x - 2 * h)) /
           (12.0 * h);
}

double ion_trap_bessel_omega(const IntensityModel& m, double n) {
    return std::sqrt(2.0) * m.omega_coupling *
           bessel_j(1, 2.0 * m.lamb_dicke * std::sqrt(n + 1.0));
}

double ion_trap_laguerre_omega(const IntensityModel& m, int n) {
    const double eta = m.lamb_dicke;
    const double x = eta * eta;
    return m.omega_coupling * eta * std::sqrt(2.0 / (n + 1.0)) * std::exp(-0.5 * x) *
           detail::laguerre1(n, x);
}

}  // namespace

std::string to_string(CouplingKind kind) {
    switch (kind) {
        case CouplingKind::TavisCummings: return "tc";
        case CouplingKind::BuckSukumar: return "bs";
        case CouplingKind::IonTrap: return "ion";
    }
    return "unknown";
}

IntensityModel IntensityModel::tavis_cummings(double omega) {
    IntensityModel m{CouplingKind::TavisCummings, omega, 0.0};
    m.validate();
    return m;
}

IntensityModel IntensityModel::buck_sukumar(double omega) {
    IntensityModel m{CouplingKind::BuckSukumar, omega, 0.0};
    m.validate();
    return m;
}

IntensityModel IntensityModel::ion_trap(double eta, double omega) {
    IntensityModel m{CouplingKind::IonTrap, omega, eta};
    m.validate();
    return m;
}

void IntensityModel::validate() const {
    if (!(omega_coupling > 0.0) || !std::isfinite(omega_coupling)) {
        throw DomainError("coupling Ω must be positive and finite");
    }
    if (kind == CouplingKind::IonTrap && !(lamb_dicke > 0.0)) {
        throw DomainError("Lamb-Dicke parameter η must be positive for the ion-trap model");
    }
}

namespace detail {

double laguerre1(int n, double x) {
    if (n < 0) throw DomainError("Laguerre degree must be non-negative");
    double prev = 1.0;  // L_0
    if (n == 0) return prev;
    double cur = 2.0 - x;  // L_1^{(1)}
    for (int k = 1; k < n; ++k) {
        const double next = ((2.0 * k + 2.0 - x) * cur - (k + 1.0) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

}  // namespace detail

double capital_omega(const IntensityModel& model, double n) {
    model.validate();
    if (!(n >= -0.5)) {
        throw DomainError("Ω_n requires n >= -1/2");
    }
    const double w = model.omega_coupling;
    switch (model.kind) {
        case CouplingKind::TavisCummings: return w * std::sqrt(2.0 * n + 2.0);
        case CouplingKind::BuckSukumar: return w * std::sqrt(2.0) * (n + 1.0);
        case CouplingKind::IonTrap:
            if (is_integer(n) && n <= kLaguerreRecurrenceLimit) {
                return ion_trap_laguerre_omega(model, static_cast<int>(n));
            }
            return ion_trap_bessel_omega(model, n);
    }
    return 0.0;
}

double eigenfrequency_continuous(const IntensityModel& model, double n) {
    if (!(n >= 0.0)) throw DomainError("ω_n requires n >= 0");
    return std::sqrt(2.0) * std::abs(capital_omega(model, n - 0.5));
}

double eigenfrequency(const IntensityModel& model, int n) {
    if (n < 0) throw DomainError("ω_n requires n >= 0");
    return eigenfrequency_continuous(model, static_cast<double>(n));
}

double frequency_derivative(const IntensityModel& model, double n, int order) {
    model.validate();
    if (order < 1 || order > 3) throw DomainError("derivative order must be 1, 2 or 3");
    const double w = model.omega_coupling;
    switch (model.kind) {
        case CouplingKind::TavisCummings: {
            // ω = Ω sqrt(4n+2)
            const double q = 4.0 * n + 2.0;
            if (order == 1) return 2.0 * w / std::sqrt(q);
            if (order == 2) return -4.0 * w / std::pow(q, 1.5);
            return 24.0 * w / std::pow(q, 2.5);
        }
        case CouplingKind::BuckSukumar: {
            // exact ν = Ω sqrt(4n²+4n+2)
            const double q = 4.0 * n * n + 4.0 * n + 2.0;
            const double dq = 8.0 * n + 4.0;
            if (order == 1) return w * dq / (2.0 * std::sqrt(q));
            if (order == 2) return 4.0 * w / std::pow(q, 1.5);
            return -6.0 * w * dq / std::pow(q, 2.5);
        }
        case CouplingKind::IonTrap: {
            // ω = 2Ω|J1(sqrt(x))|, x = 4η²(n+1/2)
            const double scale = 4.0 * model.lamb_dicke * model.lamb_dicke;
            const double x = scale * (n + 0.5);
            const double s = 2.0 * w * sign_of(bessel_j(1, std::sqrt(x)));
            if (order == 1) return s * scale * j1_sqrt_d1(x);
            if (order == 2) return s * scale * scale * j1_sqrt_d2(x);
            return s * scale * scale * scale * j1_sqrt_d3(x);
        }
    }
    return 0.0;
}

double ion_trap_x0() {
    static const double x0 = [] {
        double lo = 7.0;
        double hi = 13.0;
        double flo = j1_sqrt_d2(lo);
        for (int i = 0; i < 60; ++i) {
            const double mid = 0.5 * (lo + hi);
            const double fmid = j1_sqrt_d2(mid);
            if ((fmid < 0) == (flo < 0)) {
                lo = mid;
                flo = fmid;
            } else {
                hi = mid;
            }
            if (hi - lo < 1e-6) break;
        }
        double x = 0.5 * (lo + hi);
        for (int i = 0; i < 20; ++i) {
            const double step = j1_sqrt_d2(x) / j1_sqrt_d3(x);
            x -= step;
            if (std::abs(step) < 1e-15 * x) break;
        }
        return x;
    }();
    return x0;
}

double ion_trap_optimum(double eta) {
    if (!(eta > 0.0)) throw DomainError("η must be positive");
    return ion_trap_x0() / (4.0 * eta * eta) - 0.5;
}

double ion_trap_eta_for(double n_mean) {
    if (!(n_mean > 0.0)) throw DomainError("mean quantum number must be positive");
    return std::sqrt(ion_trap_x0() / (4.0 * (n_mean + 0.5)));
}

LinearizedSpectrum linearize(const IntensityModel& model, double n_mean) {
    model.validate();
    if (!(n_mean > 0.0) || !std::isfinite(n_mean)) {
        throw DomainError("mean quantum number N must be positive");
    }
    LinearizedSpectrum s;
    s.n_mean = n_mean;
    s.omega_N = eigenfrequency_continuous(model, n_mean);
    s.omega_prime_N = frequency_derivative(model, n_mean, 1);
    if (model.kind == CouplingKind::BuckSukumar) {
        // the approximate ω_n = (2n+1)Ω is exactly linear
        s.omega_prime_N = 2.0 * model.omega_coupling;
    }
    s.delta_N = s.omega_N - s.omega_prime_N * n_mean;

    const double abs_slope = std::abs(s.omega_prime_N);
    if (!(abs_slope > 0.0)) {
        throw DomainError("ω'_N vanishes; no revival time exists at this N");
    }
    s.t_rabi = 2.0 * kPi / s.omega_N;
    s.t_collapse = 2.0 / (std::sqrt(n_mean) * abs_slope);
    s.t_revival = 2.0 * kPi / abs_slope;

    // t_b = j!/((8N)^{j/2} |ω^{(j)}|), the shortest over the leading nonlinear orders.
    s.t_breakdown = std::numeric_limits<double>::infinity();
    const double spread = 8.0 * n_mean;
    const double factorial[] = {1.0, 1.0, 2.0, 6.0};
    for (int j = 2; j <= 3; ++j) {
        const double d = std::abs(frequency_derivative(model, n_mean, j));
        if (d == 0.0) continue;
        const double tb = factorial[j] / (std::pow(spread, 0.5 * j) * d);
        if (tb < s.t_breakdown) {
            s.t_breakdown = tb;
            s.breakdown_order = j;
        }
    }

    if (n_mean < 20.0) {
        s.warnings.emplace_back("N < 20: coherent-state approximation is unreliable");
    }
    if (model.kind == CouplingKind::IonTrap) {
        const double eta2 = model.lamb_dicke * model.lamb_dicke;
        const double width = std::sqrt(8.0 * n_mean);
        const double x_lo = 4.0 * eta2 * (std::max(0.0, n_mean - width) + 0.5);
        const double x_hi = 4.0 * eta2 * (n_mean + width + 0.5);
        if (x_lo < 7.25 || x_hi > 12.65) {
            std::ostringstream os;
            os << "ion trap: Poisson window maps to x in (" << x_lo << ", " << x_hi
               << "), outside the near-linear Bessel interval (7.25, 12.65)";
            s.warnings.push_back(os.str());
        }
    }
    return s;
}

SpectralData tabulate_spectrum(const IntensityModel& model, int n_max) {
    model.validate();
    if (n_max < 0) throw DomainError("n_max must be non-negative");
    SpectralData d;
    d.model = model;
    d.n_max = n_max;
    d.omega_n.resize(n_max + 1);
    d.capital_omega_n.resize(n_max + 1);
    d.nu_n.resize(n_max + 1);
    for (int n = 0; n <= n_max; ++n) {
        d.omega_n[n] = eigenfrequency(model, n);
        d.capital_omega_n[n] = capital_omega(model, n);
    }
    d.nu_n[0] = std::numeric_limits<double>::quiet_NaN();
    for (int n = 1; n <= n_max; ++n) {
        d.nu_n[n] = std::hypot(d.capital_omega_n[n], d.capital_omega_n[n - 1]);
    }
    return d;
}

}  // namespace nltc
