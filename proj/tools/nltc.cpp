#include "nltc/csv.hpp"
#include "nltc/entanglement.hpp"
#include "nltc/errors.hpp"
#include "nltc/evolution.hpp"
#include "nltc/observables.hpp"
#include "nltc/protocols.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

using namespace nltc;

namespace {

constexpr double kPi = std::numbers::pi;

struct Options {
    std::string model = "bs";
    double omega = 1.0;
    double eta = 0.0;
    double nbar = 0.0;
    bool nbar_set = false;
    double phi = 0.0;
    std::string atoms = "ee";
    double tmin = 0.0;
    double tmax = -1.0;
    double at = 0.25;
    int steps = 200;
    int trunc = 0;
    int samples = 100;
    std::uint64_t seed = 20240611;
    std::string out;
    int threads = 1;
    int grid = 201;
    bool haar_product = false;
    bool pointer_basis = false;
};

class ToleranceFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string error_kind(const std::exception& e) {
    if (dynamic_cast<const DomainError*>(&e)) return "DomainError";
    if (dynamic_cast<const TruncationError*>(&e)) return "TruncationError";
    if (dynamic_cast<const ParityError*>(&e)) return "ParityError";
    if (dynamic_cast<const SizeGuardError*>(&e)) return "SizeGuardError";
    if (dynamic_cast<const ThetaMismatchError*>(&e)) return "ThetaMismatchError";
    if (dynamic_cast<const InvalidStateError*>(&e)) return "InvalidStateError";
    if (dynamic_cast<const ToleranceFailure*>(&e)) return "ToleranceCheck";
    return "Error";
}

void report_error(const std::string& kind, const std::string& message) {
    std::string m = message;
    std::replace(m.begin(), m.end(), '"', '\'');
    std::cerr << "error: kind=" << kind << " message=\"" << m << "\"\n";
}

IntensityModel make_model(const Options& o) {
    IntensityModel m;
    if (o.model == "tc") {
        m = IntensityModel::tavis_cummings(o.omega);
    } else if (o.model == "bs") {
        m = IntensityModel::buck_sukumar(o.omega);
    } else {
        double eta = o.eta;
        if (eta <= 0.0 && o.nbar_set) eta = ion_trap_eta_for(o.nbar);
        if (eta <= 0.0) throw DomainError("ion-trap model needs --eta > 0 or --nbar");
        m = IntensityModel::ion_trap(eta, o.omega);
    }
    m.validate();
    return m;
}

double mean_number(const Options& o, const IntensityModel& m) {
    if (o.nbar_set) return o.nbar;
    if (m.kind == CouplingKind::IonTrap) return ion_trap_optimum(m.lamb_dicke);
    return 85.0;
}

BellAmplitudes parse_atoms(const std::string& text) {
    if (text.find(',') == std::string::npos) return BellAmplitudes::preset(text);
    std::vector<double> v;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) v.push_back(std::stod(item));
    if (v.size() != 8) throw DomainError("--atoms needs a preset or 8 reals (re, im of c-, c+, d-, d+)");
    BellAmplitudes a{{v[0], v[1]}, {v[2], v[3]}, {v[4], v[5]}, {v[6], v[7]}};
    if (std::abs(a.norm_sq() - 1.0) > 1e-8) throw InvalidStateError("--atoms amplitudes are not normalized");
    return a;
}

BellAmplitudes sample_atoms(const Options& o, int k) {
    const std::uint64_t s = sample_seed(o.seed, static_cast<std::uint64_t>(k));
    return o.haar_product ? haar_random_product(s) : haar_random_two_qubit(s);
}

template <class F>
void for_each_sample(int n, int threads, F&& body) {
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex guard;
    auto work = [&] {
        for (int k = next++; k < n; k = next++) {
            try {
                body(k);
            } catch (...) {
                std::lock_guard<std::mutex> lock(guard);
                if (!failure) failure = std::current_exception();
                next = n;
            }
        }
    };
    const int count = std::clamp(threads, 1, std::max(n, 1));
    std::vector<std::thread> pool;
    for (int i = 1; i < count; ++i) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

std::vector<double> time_grid(const Options& o, double t_revival, double default_tmax) {
    const double hi = o.tmax < 0.0 ? default_tmax : o.tmax;
    if (hi < o.tmin || o.tmin < 0.0) throw DomainError("time window needs 0 <= --tmin <= --tmax");
    if (o.steps < 0) throw DomainError("--steps must be non-negative");
    std::vector<double> t;
    for (int j = 0; j <= o.steps; ++j) {
        const double f = o.steps == 0 ? o.tmin : o.tmin + (hi - o.tmin) * j / o.steps;
        t.push_back(f * t_revival);
    }
    return t;
}

struct Run {
    std::string command;
    std::string argv;
    Options opt;
    IntensityModel model;
    LinearizedSpectrum spectrum;
    int trunc{0};

    Run(std::string cmd, std::string args, const Options& o) : command(std::move(cmd)), argv(std::move(args)), opt(o) {
        model = make_model(o);
        spectrum = linearize(model, mean_number(o, model));
        trunc = o.trunc > 0 ? o.trunc : default_truncation(spectrum.n_mean);
    }

    double alpha() const { return std::sqrt(spectrum.n_mean); }

    void header(CsvWriter& w) const {
        w.meta("command", command);
        w.meta("version", NLTC_VERSION);
        w.meta("argv", argv);
        w.meta("model", to_string(model.kind));
        w.meta("omega", model.omega_coupling);
        if (model.kind == CouplingKind::IonTrap) w.meta("eta", model.lamb_dicke);
        w.meta("nbar", spectrum.n_mean);
        w.meta("phi", opt.phi);
        w.meta("seed", std::to_string(opt.seed));
        w.meta("truncation", trunc);
        w.meta("omega_N", spectrum.omega_N);
        w.meta("omega_prime_N", spectrum.omega_prime_N);
        w.meta("delta_N", spectrum.delta_N);
        w.meta("t_rabi", spectrum.t_rabi);
        w.meta("t_collapse", spectrum.t_collapse);
        w.meta("t_revival", spectrum.t_revival);
        w.meta("t_breakdown", spectrum.t_breakdown);
        w.meta("breakdown_order", spectrum.breakdown_order);
        for (const auto& s : spectrum.warnings) w.meta("warning", s);
    }

    JointState initial(const BellAmplitudes& atoms) const {
        return build_initial(atoms, CoherentSpec{alpha(), opt.phi}, trunc);
    }
};

struct Output {
    std::ofstream file;
    std::ostream* os{&std::cout};

    Output(const Options& o, const std::string& command) {
        std::string path = o.out;
        if (path.empty()) {
            if (const char* dir = std::getenv("NLTC_OUTPUT_DIR"); dir && *dir) {
                path = (std::filesystem::path(dir) / (command + ".csv")).string();
            }
        }
        if (path.empty()) return;
        file.open(path);
        if (!file) throw std::runtime_error("cannot open output file " + path);
        os = &file;
    }
};

void require_real_alpha(const Options& o) {
    if (o.phi != 0.0) throw DomainError("this command compares against the approximate state and needs --phi 0");
}

int cmd_spectrum(const Run& r, std::ostream& os) {
    CsvWriter w(os);
    r.header(w);
    w.meta("t_collapse_over_t_revival", r.spectrum.t_collapse / r.spectrum.t_revival);
    w.meta("t_breakdown_over_t_revival", r.spectrum.t_breakdown / r.spectrum.t_revival);
    w.meta("t_rabi_over_t_revival", r.spectrum.t_rabi / r.spectrum.t_revival);
    w.header({"n", "omega_n", "p_n"});
    const double n = r.spectrum.n_mean;
    for (int k = 0; k <= r.trunc; ++k) {
        const double p = std::exp(k * std::log(n) - n - std::lgamma(k + 1.0));
        w.row({double(k), eigenfrequency(r.model, k), p});
    }
    return 0;
}

int cmd_rabi(const Run& r, std::ostream& os) {
    const BellAmplitudes atoms = parse_atoms(r.opt.atoms);
    const bool closed_form = r.opt.atoms == "ee";
    if (!closed_form) require_real_alpha(r.opt);
    const auto s0 = r.initial(atoms);
    const auto data = tabulate_spectrum(r.model, r.trunc);
    CsvWriter w(os);
    r.header(w);
    w.meta("atoms", r.opt.atoms);
    w.meta("sz_approx", closed_form ? "closed form for |ee>" : "approximate state, normalized");
    w.header({"t", "t_over_tr", "sz_exact", "sz_approx"});
    double peak = 0.0, worst = 0.0;
    for (double t : time_grid(r.opt, r.spectrum.t_revival, 2.0)) {
        const double ex = expect_sz(evolve_exact(s0, data, t));
        double ap;
        if (closed_form) {
            ap = approx_sz(r.spectrum, t);
        } else {
            const auto a = approx_state(atoms, r.alpha(), r.spectrum, t);
            ap = expect_sz(a.materialize(r.trunc)) / normalization(a);
        }
        peak = std::max(peak, std::abs(ex));
        worst = std::max(worst, std::abs(ex - ap));
        w.row({t, t / r.spectrum.t_revival, ex, ap});
    }
    w.meta("max_abs_sz_exact", peak);
    w.meta("max_abs_deviation", worst);
    return 0;
}

int cmd_fidelity(const Run& r, std::ostream& os) {
    require_real_alpha(r.opt);
    if (r.opt.samples < 1) throw DomainError("--samples must be positive");
    const auto data = tabulate_spectrum(r.model, r.trunc);
    const auto times = time_grid(r.opt, r.spectrum.t_revival, 1.0);
    const int n = r.opt.samples;
    std::vector<std::vector<double>> f(n), fat(n);
    for_each_sample(n, r.opt.threads, [&](int k) {
        const auto atoms = sample_atoms(r.opt, k);
        const auto s0 = build_initial(atoms, {r.alpha(), 0.0}, r.trunc);
        for (double t : times) {
            const auto ex = evolve_exact(s0, data, t);
            const auto ap = approx_state(atoms, r.alpha(), r.spectrum, t);
            auto am = ap.materialize(r.trunc);
            f[k].push_back(state_fidelity(ex, am, normalization(ap)));
            am.data() /= std::sqrt(am.norm_sq());
            fat[k].push_back(atomic_fidelity(partial_trace_atoms(ex), partial_trace_atoms(am)));
        }
    });
    CsvWriter w(os);
    r.header(w);
    w.meta("samples", n);
    w.meta("ensemble", r.opt.haar_product ? "haar product" : "haar");
    w.header({"t", "t_over_tr", "mean_F", "mean_F_at"});
    double lowest = 1.0;
    for (std::size_t j = 0; j < times.size(); ++j) {
        double a = 0.0, b = 0.0;
        for (int k = 0; k < n; ++k) {
            a += f[k][j];
            b += fat[k][j];
        }
        lowest = std::min(lowest, a / n);
        w.row({times[j], times[j] / r.spectrum.t_revival, a / n, b / n});
    }
    w.meta("min_mean_F", lowest);
    return 0;
}

int cmd_husimi(const Run& r, std::ostream& os) {
    const BellAmplitudes atoms = parse_atoms(r.opt.atoms);
    if (r.opt.at < 0.0) throw DomainError("--at must be non-negative");
    const double t = r.opt.at * r.spectrum.t_revival;
    const auto state = evolve_exact(r.initial(atoms), r.model, t);
    const auto window = HusimiWindow::around(r.alpha(), r.opt.grid);
    const auto g = husimi(state, window);
    CsvWriter w(os);
    r.header(w);
    w.meta("atoms", r.opt.atoms);
    w.meta("t", t);
    w.meta("t_over_tr", r.opt.at);
    w.meta("resolution", r.opt.grid);
    w.meta("integral", g.integral);
    for (const auto& p : g.local_maxima(0.1 / kPi)) {
        std::ostringstream s;
        s.precision(6);
        s << p.beta.real() << ' ' << p.beta.imag() << ' ' << p.value;
        w.meta("peak", s.str());
    }
    for (const auto& s : g.warnings) w.meta("warning", s);
    g.write_csv(os);
    if (!g.warnings.empty()) throw ToleranceFailure(g.warnings.front());
    return 0;
}

int cmd_entanglement(const Run& r, std::ostream& os) {
    require_real_alpha(r.opt);
    if (r.opt.samples < 1) throw DomainError("--samples must be positive");
    const auto data = tabulate_spectrum(r.model, r.trunc);
    auto times = time_grid(r.opt, r.spectrum.t_revival, 2.0);
    const double t_end = times.back();
    std::vector<int> marks;
    for (int k = 1; k * r.spectrum.t_revival / 4.0 <= t_end * (1.0 + 1e-12); ++k) {
        if (k % 4 != 0) {
            marks.push_back(k);
            times.push_back(k * r.spectrum.t_revival / 4.0);
        }
    }
    std::sort(times.begin(), times.end());
    const double tol = 1e-12 * r.spectrum.t_revival;
    times.erase(std::unique(times.begin(), times.end(), [tol](double a, double b) { return b - a < tol; }),
                times.end());
    const int n = r.opt.samples;
    struct Sample {
        std::vector<double> c, p;
        BellAmplitudes atoms;
    };
    std::vector<Sample> out(n);
    for_each_sample(n, r.opt.threads, [&](int k) {
        out[k].atoms = sample_atoms(r.opt, k);
        const auto s0 = build_initial(out[k].atoms, {r.alpha(), 0.0}, r.trunc);
        for (double t : times) {
            const auto rho = partial_trace_atoms(evolve_exact(s0, data, t));
            out[k].c.push_back(concurrence(rho));
            out[k].p.push_back(purity(rho));
        }
    });
    CsvWriter w(os);
    r.header(w);
    w.meta("samples", n);
    w.meta("ensemble", r.opt.haar_product ? "haar product" : "haar");
    w.header({"t", "t_over_tr", "mean_C", "mean_P", "pred_C", "pred_P"});
    double worst = 0.0;
    for (std::size_t j = 0; j < times.size(); ++j) {
        double c = 0.0, p = 0.0;
        for (int k = 0; k < n; ++k) {
            c += out[k].c[j] / n;
            p += out[k].p[j] / n;
        }
        const double q = 4.0 * times[j] / r.spectrum.t_revival;
        const int kq = static_cast<int>(std::lround(q));
        double pc = std::nan(""), pp = std::nan("");
        if (std::find(marks.begin(), marks.end(), kq) != marks.end() && std::abs(q - kq) < 1e-9) {
            const auto which = kq % 2 ? RevivalFraction::Quarter : RevivalFraction::Half;
            pc = pp = 0.0;
            for (int k = 0; k < n; ++k) {
                pc += (which == RevivalFraction::Quarter ? predicted_concurrence_quarter(out[k].atoms)
                                                         : predicted_concurrence_half(out[k].atoms)) /
                      n;
                pp += predicted_purity(out[k].atoms, which) / n;
            }
            worst = std::max({worst, std::abs(pc - c), std::abs(pp - p)});
        }
        w.row({times[j], times[j] / r.spectrum.t_revival, c, p, pc, pp});
    }
    w.meta("max_mean_prediction_deviation", worst);
    return 0;
}

void key_value(std::ostream& os, const std::string& key, double value) { os << key << ',' << value << '\n'; }

int cmd_ghz(const Run& r, std::ostream& os) {
    require_real_alpha(r.opt);
    if (r.spectrum.n_mean < 20.0) std::cerr << "warning: N < 20, cat states overlap\n";
    const auto g = generate_ghz(r.alpha(), r.model, r.spectrum, r.trunc);
    CsvWriter w(os);
    r.header(w);
    w.header({"quantity", "value"});
    key_value(os, "fidelity", g.fidelity);
    key_value(os, "theta", g.theta);
    key_value(os, "t", 0.5 * r.spectrum.t_revival);
    key_value(os, "t_over_tr", 0.5);
    const Mat4 internal = basis::internal_from_bell() * g.atoms.bell * basis::internal_from_bell().adjoint();
    const char* names[] = {"rho_psi_minus", "rho_psi_plus", "rho_gg", "rho_ee"};
    for (int k = 0; k < 4; ++k) key_value(os, names[k], internal(k, k).real());
    key_value(os, "atomic_concurrence", concurrence(g.atoms));
    return 0;
}

int cmd_wstate(const Run& r, std::ostream& os) {
    const auto res = generate_w(r.model, true);
    CsvWriter w(os);
    r.header(w);
    w.meta("scan_window", std::to_string(res.scan.window_lo) + ".." + std::to_string(res.scan.window_hi));
    w.header({"quantity", "value"});
    key_value(os, "n_mean", res.scan.n_mean);
    key_value(os, "eta", res.scan.eta);
    key_value(os, "theta", res.scan.theta);
    key_value(os, "theta_residual", res.scan.residual);
    key_value(os, "psi2_concurrence", res.psi2_concurrence);
    key_value(os, "ideal_fidelity", res.ideal_fidelity);
    key_value(os, "fidelity", res.fidelity);
    return 0;
}

int cmd_bellmeasure(const Run& r, std::ostream& os) {
    require_real_alpha(r.opt);
    const bool ensemble = r.opt.atoms == "haar";
    const int n = ensemble ? r.opt.samples : 1;
    if (n < 1) throw DomainError("--samples must be positive");
    const BellPath path = r.opt.pointer_basis ? BellPath::PointerBasis : BellPath::FullFock;
    std::vector<BellMeasurementResult> res(n);
    std::vector<BellAmplitudes> atoms(n);
    for_each_sample(n, r.opt.threads, [&](int k) {
        atoms[k] = ensemble ? sample_atoms(r.opt, k) : parse_atoms(r.opt.atoms);
        res[k] = bell_measurement(atoms[k], r.alpha(), r.alpha(), r.model, path, r.opt.trunc > 0 ? r.trunc : 0);
    });
    CsvWriter w(os);
    r.header(w);
    w.meta("atoms", r.opt.atoms);
    w.meta("path", r.opt.pointer_basis ? "pointer basis" : "full Fock");
    w.meta("two_mode_truncation", res[0].n_max);
    w.meta("t", r.spectrum.t_revival);
    w.meta("t_over_tr", 1.0);
    os << "sample,outcome,probability,expected_probability,valid,fidelity,concurrence\n";
    double leak = 0.0;
    for (int k = 0; k < n; ++k) {
        for (const auto& o : res[k].outcomes) {
            os << k << ',' << o.label << ',' << o.probability << ',' << o.expected_probability << ','
               << (o.valid ? 1 : 0) << ',' << o.fidelity << ',' << (o.valid ? concurrence(o.postselected) : 0.0)
               << '\n';
        }
        leak = std::max(leak, std::abs(res[k].total_probability - 1.0));
    }
    w.meta("max_probability_leak", leak);
    if (leak > 0.01) throw ToleranceFailure("outcome probabilities miss 1 by more than 0.01");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-atom Tavis-Cummings simulations with intensity-dependent coupling"};
    app.set_version_flag("--version", NLTC_VERSION);
    app.set_config("--config", "", "key=value run configuration mirroring the flags");
    app.require_subcommand(1);
    app.fallthrough();

    Options o;
    app.add_option("--model", o.model, "coupling model")->check(CLI::IsMember({"tc", "bs", "ion"}));
    app.add_option("--omega", o.omega, "coupling Ω; times are in units of 1/Ω");
    app.add_option("--eta", o.eta, "Lamb-Dicke parameter (ion trap)");
    auto* nbar = app.add_option("--nbar", o.nbar, "mean quantum number N");
    app.add_option("--phi", o.phi, "phase of the coherent amplitude");
    app.add_option("--atoms", o.atoms, "preset (gg ee ge eg psi+ psi- phi+ phi-), 8 reals, or haar");
    app.add_option("--tmin", o.tmin, "start of the time window in units of t_r");
    app.add_option("--tmax", o.tmax, "end of the time window in units of t_r");
    app.add_option("--at", o.at, "evaluation time in units of t_r (husimi)");
    app.add_option("--steps", o.steps, "time-grid intervals");
    app.add_option("--trunc", o.trunc, "Fock truncation n_max, 0 picks a default");
    app.add_option("--samples", o.samples, "Haar samples");
    app.add_option("--seed", o.seed, "master seed");
    app.add_option("--out", o.out, "output CSV (default: stdout or $NLTC_OUTPUT_DIR/<command>.csv)");
    app.add_option("--threads", o.threads, "worker threads for sample loops")->check(CLI::PositiveNumber);
    app.add_option("--grid", o.grid, "Husimi grid resolution per axis");
    app.add_flag("--haar-product", o.haar_product, "sample product states instead of the full Haar ensemble");
    app.add_flag("--pointer-basis", o.pointer_basis, "Bell measurement in the idealized pointer basis");

    using Command = int (*)(const Run&, std::ostream&);
    const std::vector<std::tuple<std::string, std::string, Command>> commands = {
        {"spectrum", "eigenfrequencies and linearized time scales", cmd_spectrum},
        {"rabi", "exact and approximate <S_z>(t)", cmd_rabi},
        {"fidelity", "Haar-averaged state and atomic fidelity of the approximate state", cmd_fidelity},
        {"husimi", "Husimi function of the oscillator", cmd_husimi},
        {"entanglement", "Haar-averaged concurrence and purity with revival predictions", cmd_entanglement},
        {"ghz", "GHZ-type state from |gg>|α>", cmd_ghz},
        {"wstate", "W-state generation on the ion trap", cmd_wstate},
        {"bellmeasure", "two-mode Bell measurement", cmd_bellmeasure},
    };
    for (const auto& [name, help, fn] : commands) app.add_subcommand(name, help);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        report_error("Usage", e.what());
        return 2;
    }
    o.nbar_set = nbar->count() > 0;

    std::string args;
    for (int i = 1; i < argc; ++i) args += (i > 1 ? " " : "") + std::string(argv[i]);

    try {
        for (const auto& [name, help, fn] : commands) {
            if (!app.got_subcommand(name)) continue;
            const Run run(name, args, o);
            Output out(o, name);
            out.os->precision(12);
            return fn(run, *out.os);
        }
    } catch (const ToleranceFailure& e) {
        report_error("ToleranceCheck", e.what());
        return 3;
    } catch (const std::exception& e) {
        report_error(error_kind(e), e.what());
        return 1;
    }
    return 0;
}
