// command-line surface: every subcommand resolves one config (TOML file via
// --config, flags override), runs the pipeline, and writes its artifacts plus
// a manifest.json into --out. Exit codes: 0 ok, 2 config error, 3 numerical
// failure, 4 failed --check.
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "incnls/approx.hpp"
#include "incnls/evolution.hpp"
#include "incnls/io.hpp"
#include "incnls/lorentz.hpp"
#include "incnls/modulation.hpp"
#include "incnls/spectral.hpp"
#include "incnls/virial.hpp"

using json = nlohmann::ordered_json;
using namespace incnls;
namespace fs = std::filesystem;

namespace {

struct CheckFailure : std::exception {
    std::string msg;
    explicit CheckFailure(std::string m) : msg(std::move(m)) {}
    const char* what() const noexcept override { return msg.c_str(); }
};

struct Options {
    int d = 3;
    double b = 0.3;
    int n_cells = 2048;
    double r_max = 100.0;
    double dt = 1e-4;
    int stride = 100;
    std::string data = "wminus";  // w | wminus | wplus | gaussian
    std::string field_path;       // overrides --data with a stored field
    std::string t_span = "0:3";
    double q0 = 0.05;
    double R = 10.0;
    int k = 4;
    double a = -1.0;
    unsigned seed = 20240817;
    bool check = false;
    bool save_fields = false;
    std::string eigen_cache;
    std::string out = "runs";
};

void add_options(CLI::App* cmd, Options& o) {
    cmd->add_option("--d", o.d, "dimension (3..5)");
    cmd->add_option("--b", o.b, "inhomogeneity exponent");
    cmd->add_option("--n-cells", o.n_cells, "radial cells");
    cmd->add_option("--r-max", o.r_max, "domain radius");
    cmd->add_option("--dt", o.dt, "time step");
    cmd->add_option("--stride", o.stride, "steps between diagnostics");
    cmd->add_option("--data", o.data, "datum: w|wminus|wplus|gaussian");
    cmd->add_option("--field", o.field_path, "stored field container");
    cmd->add_option("--t-span", o.t_span, "time window a:b (relative)");
    cmd->add_option("--q0", o.q0, "threshold-datum size e^{-e0 t0}");
    cmd->add_option("--R", o.R, "virial cutoff radius");
    cmd->add_option("--k", o.k, "perturbation-family order");
    cmd->add_option("--a", o.a, "family leading coefficient");
    cmd->add_option("--seed", o.seed, "rng seed for synthetic data");
    cmd->add_flag("--check", o.check, "validate against frozen tolerances");
    cmd->add_flag("--save-fields", o.save_fields, "store the final field");
    cmd->add_option("--eigen-cache", o.eigen_cache, "eigen container path");
    cmd->add_option("--out", o.out, "output directory");
    cmd->set_config("--config", "", "TOML config (flags take precedence)");
}

std::pair<double, double> parse_span(const std::string& s) {
    double t0 = 0, t1 = 0;
    char c = 0;
    if (sscanf(s.c_str(), "%lg%c%lg", &t0, &c, &t1) != 3 || c != ':')
        throw std::invalid_argument("config error at --t-span: want a:b, got " +
                                    s);
    return {t0, t1};
}

json resolved_config(const char* sub, const Options& o) {
    json c;
    c["subcommand"] = sub;
    c["d"] = o.d;
    c["b"] = o.b;
    c["n_cells"] = o.n_cells;
    c["r_max"] = o.r_max;
    c["dt"] = o.dt;
    c["stride"] = o.stride;
    c["data"] = o.data;
    c["field"] = o.field_path;
    c["t_span"] = o.t_span;
    c["q0"] = o.q0;
    c["R"] = o.R;
    c["k"] = o.k;
    c["a"] = o.a;
    c["seed"] = o.seed;
    return c;
}

void write_json(const std::string& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

// deterministic manifest: config fingerprint, grid key, artifact list
void write_manifest(const std::string& dir, const json& cfg,
                    const std::string& grid_key,
                    const std::vector<std::string>& outputs) {
    json m;
    m["tool"] = "incnls_cli";
    m["format_version"] = 1;
    m["config"] = cfg;
    m["config_hash"] = fnv1a_hex(cfg.dump());
    m["grid_key"] = grid_key;
    m["seeds"] = {cfg.value("seed", 0u)};
    m["outputs"] = outputs;
    write_json(dir + "/manifest.json", m);
}

struct Stage {
    Params p;
    GridPtr grid;
    GroundStateBundle bundle;
};

Stage make_stage(const Options& o) {
    Stage s;
    s.p = make_params(o.d, o.b);  // throws invalid_argument -> exit 2
    if (o.n_cells < 16 || !(o.r_max > 1.0))
        throw std::invalid_argument(
            "config error at --n-cells/--r-max: out of range");
    s.grid = make_grid(s.p, o.n_cells, o.r_max);
    s.bundle = make_bundle(s.p, s.grid);
    return s;
}

EigenBundle get_eigen(const Stage& s, const Options& o) {
    if (!o.eigen_cache.empty() && fs::exists(o.eigen_cache)) {
        return load_eigen(o.eigen_cache, s.grid, s.p);
    }
    EigenBundle eig = compute_eigen(s.bundle, s.p, s.grid);
    if (!o.eigen_cache.empty()) save_eigen(o.eigen_cache, eig, s.grid, s.p);
    return eig;
}

// datum + absolute start time for the requested window
std::pair<RadialField, double> make_datum(const Stage& s, const Options& o) {
    auto [ta, tb] = parse_span(o.t_span);
    (void)tb;
    if (!o.field_path.empty()) {
        auto lf = load_field(o.field_path);
        require_same_grid(lf.field.grid, s.grid);
        return {lf.field, ta};
    }
    if (o.data == "w") return {s.bundle.W, ta};
    if (o.data == "gaussian") {
        std::mt19937 rng(o.seed);
        std::uniform_real_distribution<double> U(0.5, 2.0);
        double width = U(rng), amp = U(rng);
        RadialField u(s.grid);
        for (int j = 0; j < u.n(); ++j)
            u.v[j] = amp * std::exp(-s.grid->r[j] * s.grid->r[j] / width);
        return {u, ta};
    }
    if (o.data == "wminus" || o.data == "wplus") {
        int sign = o.data == "wminus" ? -1 : +1;
        EigenBundle eig = get_eigen(s, o);
        auto fam = build_family(sign, o.k, eig, s.bundle, s.p, s.grid);
        double t0 = -std::log(o.q0) / eig.e0;
        return {initial_data_Wpm(sign, t0, fam, s.bundle), t0 + ta};
    }
    throw std::invalid_argument("config error at --data: unknown source '" +
                                o.data + "'");
}

Trajectory run_trajectory(const Stage& s, const Options& o) {
    auto [u0, t0] = make_datum(s, o);
    auto [ta, tb] = parse_span(o.t_span);
    EvolveOptions eo;
    eo.dt = o.dt;
    eo.stride = o.stride;
    eo.bundle = &s.bundle;
    return integrate(u0, t0, t0 + (tb - ta), s.p, eo);
}

double fit_log_slope(const std::vector<double>& t, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (size_t i = 0; i < t.size(); ++i) {
        if (!(y[i] > 0)) continue;
        double ly = std::log(y[i]);
        sx += t[i];
        sy += ly;
        sxx += t[i] * t[i];
        sxy += t[i] * ly;
        ++n;
    }
    if (n < 2) return 0.0;
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// ---- subcommands ---------------------------------------------------------

void cmd_ground_state(const Options& o) {
    Stage s = make_stage(o);
    fs::create_directories(o.out);
    double poho = std::abs(s.bundle.grad_norm_sq - s.bundle.pot_integral) /
                  s.bundle.grad_norm_sq;
    double sharp = sharp_inequality_check(s.bundle.W, s.bundle);
    json rep;
    rep["grad_norm_sq"] = s.bundle.grad_norm_sq;
    rep["pot_integral"] = s.bundle.pot_integral;
    rep["energy_W"] = s.bundle.energy_W;
    rep["pohozhaev_residual"] = poho;
    rep["sharp_ratio_W"] = sharp;
    write_json(o.out + "/report.json", rep);
    write_manifest(o.out, resolved_config("ground-state", o), s.grid->key(),
                   {"report.json"});
    printf("pohozhaev_residual %.3e  sharp_ratio %.9f  E(W) %.9g\n", poho,
           sharp, s.bundle.energy_W);
    if (o.check && !(poho <= 1e-5 && std::abs(sharp - 1.0) <= 1e-6))
        throw CheckFailure("ground-state identities out of tolerance");
}

void cmd_spectrum(const Options& o) {
    Stage s = make_stage(o);
    fs::create_directories(o.out);
    EigenBundle eig = get_eigen(s, o);
    save_eigen(o.out + "/eigen.csv", eig, s.grid, s.p);
    json rep;
    rep["e0"] = eig.e0;
    rep["residual_plus"] = eig.residual_plus;
    rep["sign_convention_ok"] = eig.sign_convention_ok;
    rep["p_min_eig"] = eig.p_min_eig;
    rep["p_second_eig"] = eig.p_second_eig;
    write_json(o.out + "/report.json", rep);
    write_manifest(o.out, resolved_config("spectrum", o), s.grid->key(),
                   {"eigen.csv", "report.json"});
    printf("e0 %.9f  residual %.3e  sign_ok %d\n", eig.e0, eig.residual_plus,
           (int)eig.sign_convention_ok);
    if (o.check && !(eig.residual_plus <= 1e-6 && eig.sign_convention_ok))
        throw CheckFailure("eigenpair residual/sign out of tolerance");
}

void cmd_build_wa(const Options& o) {
    Stage s = make_stage(o);
    fs::create_directories(o.out);
    EigenBundle eig = get_eigen(s, o);
    auto fam = build_family(o.a, o.k, eig, s.bundle, s.p, s.grid);
    save_family(o.out + "/family.csv", fam, s.grid, s.p);
    // residual-slope table: ||eps_k(t)|| for each truncation order over a
    // window spanning 3/e0 inside the validity radius
    double t_lo = -std::log(0.3 * fam.q_radius) / fam.e0;
    std::vector<double> ts;
    for (int i = 0; i < 9; ++i) ts.push_back(t_lo + 3.0 / fam.e0 * i / 8.0);
    json rep;
    std::vector<std::vector<double>> table(fam.k);
    for (int kk = 1; kk <= fam.k; ++kk) {
        auto sub = truncate_family(fam, kk, s.bundle);
        for (double t : ts) {
            auto rr = residual(sub, s.bundle, s.p, t);
            table[kk - 1].push_back(std::sqrt(rr.h1 * rr.h1 + rr.l2 * rr.l2));
        }
        rep["slope_eps" + std::to_string(kk)] = fit_log_slope(ts, table[kk - 1]);
        rep["expected_eps" + std::to_string(kk)] = -(kk + 1) * fam.e0;
    }
    FILE* f = fopen((o.out + "/slopes.csv").c_str(), "w");
    if (!f) throw std::runtime_error("cannot write slopes.csv");
    fprintf(f, "t");
    for (int kk = 1; kk <= fam.k; ++kk) fprintf(f, ",eps%d_h1l2", kk);
    fprintf(f, "\n");
    for (size_t i = 0; i < ts.size(); ++i) {
        fprintf(f, "%.17g", ts[i]);
        for (int kk = 0; kk < fam.k; ++kk) fprintf(f, ",%.17g", table[kk][i]);
        fprintf(f, "\n");
    }
    fclose(f);
    rep["q_radius"] = fam.q_radius;
    write_json(o.out + "/report.json", rep);
    write_manifest(o.out, resolved_config("build-wa", o), s.grid->key(),
                   {"family.csv", "slopes.csv", "report.json"});
    for (int kk = 1; kk <= fam.k; ++kk)
        printf("eps%d slope %.4f (expected %.4f)\n", kk,
               rep["slope_eps" + std::to_string(kk)].get<double>(),
               -(kk + 1) * fam.e0);
    if (o.check)
        for (int kk = 1; kk <= fam.k; ++kk) {
            double got = rep["slope_eps" + std::to_string(kk)].get<double>();
            if (std::abs(got + (kk + 1) * fam.e0) > 0.07 * (kk + 1) * fam.e0)
                throw CheckFailure("residual slope off at order " +
                                   std::to_string(kk));
        }
}

void cmd_evolve(const Options& o) {
    Stage s = make_stage(o);
    fs::create_directories(o.out);
    auto traj = run_trajectory(s, o);
    auto seq = track(traj, s.bundle, s.p, default_delta0(s.bundle));
    VirialConfig vc{o.R};
    bool virial_ok = 2.0 * o.R <= o.r_max;
    FILE* f = fopen((o.out + "/evolve.csv").c_str(), "w");
    if (!f) throw std::runtime_error("cannot write evolve.csv");
    fprintf(f, "t,energy,mass,grad_norm_sq,d_u,theta,mu,beta,V_R,dV_R\n");
    for (size_t i = 0; i < traj.times.size(); ++i) {
        const auto& dg = traj.diag[i];
        double V = virial_ok ? virial_V(traj.snapshots[i], vc) : 0.0;
        double dV =
            virial_ok ? virial_first_derivative(traj.snapshots[i], vc) : 0.0;
        fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                dg.t, dg.energy, dg.mass, dg.grad_norm_sq, dg.d_u,
                seq[i].ok ? seq[i].state.theta : 0.0,
                seq[i].ok ? seq[i].state.mu : 0.0,
                seq[i].ok ? seq[i].state.beta : 0.0, V, dV);
    }
    fclose(f);
    std::vector<double> du;
    for (const auto& dg : traj.diag) du.push_back(dg.d_u);
    json sum;
    static const char* names[] = {"time_limit", "blowup_indicator",
                                  "resolution_loss"};
    sum["stop_reason"] = names[(int)traj.stop_reason];
    sum["d_u_log_slope"] = fit_log_slope(traj.times, du);
    sum["d_u_final"] = du.back();
    bool mono = true;
    for (size_t i = 1; i < du.size(); ++i) mono = mono && du[i] <= du[i - 1] + 1e-12;
    sum["d_u_monotone_decreasing"] = mono;
    write_json(o.out + "/summary.json", sum);
    std::vector<std::string> outs = {"evolve.csv", "summary.json"};
    if (o.save_fields) {
        save_field(o.out + "/field_final.csv", traj.snapshots.back(), s.p);
        outs.push_back("field_final.csv");
    }
    write_manifest(o.out, resolved_config("evolve", o), s.grid->key(), outs);
    printf("stop %s  d_u %.3e -> %.3e  slope %.4f\n", names[(int)traj.stop_reason],
           du.front(), du.back(), sum["d_u_log_slope"].get<double>());
    if (o.check && o.data == "wminus" && !mono)
        throw CheckFailure("d_u not monotone on the wminus run");
}

void cmd_modulate(const Options& o) {
    Stage s = make_stage(o);
    fs::create_directories(o.out);
    if (!o.field_path.empty()) {
        auto lf = load_field(o.field_path);
        require_same_grid(lf.field.grid, s.grid);
        auto st = decompose(lf.field, s.bundle, s.p, default_delta0(s.bundle));
        json rep;
        rep["theta"] = st.theta;
        rep["mu"] = st.mu;
        rep["beta"] = st.beta;
        rep["d_u"] = st.d_u;
        rep["valid"] = st.valid;
        rep["newton_iters"] = st.newton_iters;
        write_json(o.out + "/report.json", rep);
        write_manifest(o.out, resolved_config("modulate", o), s.grid->key(),
                       {"report.json"});
        printf("theta %.6f  mu %.6f  beta %.3e  d %.3e  valid %d\n", st.theta,
               st.mu, st.beta, st.d_u, (int)st.valid);
        return;
    }
    auto traj = run_trajectory(s, o);
    auto seq = track(traj, s.bundle, s.p, default_delta0(s.bundle));
    write_tracker_csv(o.out + "/tracker.csv", seq);
    write_manifest(o.out, resolved_config("modulate", o), s.grid->key(),
                   {"tracker.csv"});
    double worst = 0;
    for (const auto& r : seq)
        if (r.ok) worst = std::max(worst, r.drift_ratio);
    printf("tracked %zu snapshots  max drift ratio %.4f\n", seq.size(), worst);
    if (o.check && !(worst <= 1.0))
        throw CheckFailure("parameter drift ratio above frozen bound");
}

void cmd_virial(const Options& o) {
    Stage s = make_stage(o);
    fs::create_directories(o.out);
    auto traj = run_trajectory(s, o);
    size_t n = traj.times.size();
    VirialConfig vc{o.R};
    static const char* sides[] = {"subcritical", "supercritical", "boundary"};
    std::vector<double> V(n), lhs(n);
    FILE* f = fopen((o.out + "/virial.csv").c_str(), "w");
    if (!f) throw std::runtime_error("cannot write virial.csv");
    fprintf(f, "t,V_R,dV_R,lhs_proxy,A_R,d_u,side\n");
    for (size_t i = 0; i < n; ++i) {
        auto id = virial_second_identity(traj.snapshots[i], vc, s.bundle, s.p);
        V[i] = virial_V(traj.snapshots[i], vc);
        lhs[i] = id.lhs_proxy;
        fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%s\n", traj.times[i],
                V[i], virial_first_derivative(traj.snapshots[i], vc),
                id.lhs_proxy, id.A_R, id.d_u, sides[(int)id.side]);
    }
    fclose(f);
    double emax = 0, D = n > 1 ? traj.times[1] - traj.times[0] : 0;
    for (size_t i = 1; i + 1 < n; ++i) {
        double D2 = (V[i + 1] - 2 * V[i] + V[i - 1]) / (D * D);
        emax = std::max(emax, std::abs(D2 - lhs[i]));
    }
    json rep;
    rep["R"] = o.R;
    rep["second_difference_error_max"] = emax;
    rep["tolerance"] = 0.5 * D * D + 1e-4 * o.R * o.R;
    write_json(o.out + "/report.json", rep);
    write_manifest(o.out, resolved_config("virial", o), s.grid->key(),
                   {"virial.csv", "report.json"});
    printf("samples %zu  max |D2 V - (4 alpha d + A_R)| %.3e (tol %.3e)\n", n,
           emax, rep["tolerance"].get<double>());
    if (o.check && !(emax <= rep["tolerance"].get<double>()))
        throw CheckFailure("virial identity residual above tolerance");
}

void cmd_lorentz(const Options& o) {
    Stage s = make_stage(o);
    fs::create_directories(o.out);
    RadialField u = s.bundle.W;
    if (!o.field_path.empty()) {
        auto lf = load_field(o.field_path);
        require_same_grid(lf.field.grid, s.grid);
        u = lf.field;
    }
    double crit = 2.0 * s.p.d / (s.p.d - 2.0);
    FILE* f = fopen((o.out + "/norms.csv").c_str(), "w");
    if (!f) throw std::runtime_error("cannot write norms.csv");
    fprintf(f, "label,r_exp,rho_exp,value\n");
    auto row = [&](const char* lab, double r, double rho, double val) {
        fprintf(f, "%s,%.17g,%.17g,%.17g\n", lab, r, rho, val);
    };
    double lcrit = lorentz_norm(u, {crit, crit});
    double ldirect = norm_l2_weighted(u, 0.0, crit);
    row("L_crit_lorentz", crit, crit, lcrit);
    row("L_crit_direct", crit, crit, ldirect);
    row("L_2_2", 2.0, 2.0, lorentz_norm(u, {2.0, 2.0}));
    row("weak_crit", crit, LorentzSpec::infinity(),
        lorentz_norm(u, {crit, LorentzSpec::infinity()}));
    row("weight_weak_analytic", s.p.d / s.p.b, LorentzSpec::infinity(),
        weak_norm_power_weight(s.p));
    fclose(f);
    write_manifest(o.out, resolved_config("lorentz", o), s.grid->key(),
                   {"norms.csv"});
    printf("L^{r,r} %.9g  direct L^r %.9g  weak weight %.9g\n", lcrit, ldirect,
           weak_norm_power_weight(s.p));
    if (o.check && !(std::abs(lcrit - ldirect) <= 1e-4 * ldirect))
        throw CheckFailure("Lorentz diagonal disagrees with the direct norm");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"radial toolkit for the energy-critical inhomogeneous NLS"};
    app.require_subcommand(1);
    Options o;
    std::function<void(const Options&)> action;
    struct Sub {
        const char* name;
        const char* help;
        void (*fn)(const Options&);
    };
    const Sub subs[] = {
        {"ground-state", "stationary-state identities report", cmd_ground_state},
        {"spectrum", "linearized eigenpair and scan report", cmd_spectrum},
        {"build-wa", "perturbation family and residual slopes", cmd_build_wa},
        {"evolve", "time integration with diagnostics", cmd_evolve},
        {"modulate", "orbit decomposition of a field or run", cmd_modulate},
        {"virial", "truncated-virial identity table", cmd_virial},
        {"lorentz", "Lorentz-norm table for a field", cmd_lorentz},
    };
    for (const auto& sub : subs) {
        CLI::App* c = app.add_subcommand(sub.name, sub.help);
        add_options(c, o);
        c->callback([&action, fn = sub.fn] { action = fn; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    try {
        action(o);
    } catch (const CheckFailure& e) {
        fprintf(stderr, "check failed: %s\n", e.what());
        return 4;
    } catch (const std::invalid_argument& e) {
        fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    }
    return 0;
}
