// vortexstab: N-vortex periodic orbits, Floquet multipliers, and the
// stability of the families bifurcating from Robin-function critical points.

#include "vortexstab/bifurcation.hpp"
#include "vortexstab/continuation.hpp"
#include "vortexstab/io.hpp"
#include "vortexstab/robin.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

using namespace vortexstab;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct GlobalOptions {
    std::string out_dir = ".";
    int jobs = 1;
    double atol = 1e-11;
    double rtol = 1e-11;
    double cluster_tol = 1e-5;
    bool emit_plot = false;
};

std::string out_path(const GlobalOptions& g, const std::string& name) {
    return (std::filesystem::path(g.out_dir) / name).string();
}

// ---------------------------------------------------------------------------
// domain and equilibrium option groups
// ---------------------------------------------------------------------------

struct DomainArgs {
    std::string kind = "unit-disc";
    std::string file;
    double s11 = 1.0, s12 = 0.0, s22 = -1.0;
    std::vector<double> coeff_re, coeff_im;
    double center_x = 0.0, center_y = 0.0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--domain", kind,
                        "domain model: whole-plane | unit-disc | synthetic-quadratic | "
                        "conformal-image")
            ->default_val(kind);
        cmd->add_option("--domain-file", file, "load the domain from a config file instead");
        cmd->add_option("--s11", s11, "quadratic model S entry (1,1)");
        cmd->add_option("--s12", s12, "quadratic model S entry (1,2)");
        cmd->add_option("--s22", s22, "quadratic model S entry (2,2)");
        cmd->add_option("--coeff-re", coeff_re, "conformal map coefficients c_1.. (real parts)");
        cmd->add_option("--coeff-im", coeff_im, "conformal map coefficients (imaginary parts)");
        cmd->add_option("--center-x", center_x, "recentre the domain at this point");
        cmd->add_option("--center-y", center_y, "recentre the domain at this point");
    }

    std::shared_ptr<const DomainModel> build() const {
        if (!file.empty()) return domain_from_config(Config::load_file(file));
        Config cfg;
        cfg.set("domain", kind);
        if (kind == "synthetic-quadratic") {
            cfg.set("s11", s11);
            cfg.set("s12", s12);
            cfg.set("s22", s22);
        } else if (kind == "conformal-image") {
            cfg.set("coeff_re", coeff_re.empty() ? std::vector<double>{1.0} : coeff_re);
            if (!coeff_im.empty()) cfg.set("coeff_im", coeff_im);
        }
        if (center_x != 0.0 || center_y != 0.0) {
            cfg.set("center_x", center_x);
            cfg.set("center_y", center_y);
        }
        return domain_from_config(cfg);
    }
};

struct EquilibriumArgs {
    std::vector<double> pair;      // G1 G2 [D]
    std::vector<double> triangle;  // G1 G2 G3
    double rhombus_y = 0.0;
    double rotor_rho = 0.0;
    std::string file;

    void attach(CLI::App* cmd) {
        cmd->add_option("--pair", pair, "vortex pair strengths G1 G2 [separation]")
            ->expected(2, 3);
        cmd->add_option("--triangle", triangle, "equilateral triangle strengths G1 G2 G3")
            ->expected(3);
        cmd->add_option("--rhombus", rhombus_y, "rhombus shape parameter y > 1/sqrt(3)");
        cmd->add_option("--rotor", rotor_rho, "collinear Gamma = 0 rotor with arm length rho");
        cmd->add_option("--equilibrium-file", file, "load the equilibrium from a config file");
    }

    RelativeEquilibrium build() const {
        int given = static_cast<int>(!pair.empty()) + static_cast<int>(!triangle.empty()) +
                    static_cast<int>(rhombus_y != 0.0) + static_cast<int>(rotor_rho != 0.0) +
                    static_cast<int>(!file.empty());
        if (given != 1)
            throw ConfigError(
                "choose exactly one of --pair / --triangle / --rhombus / --rotor / "
                "--equilibrium-file");
        if (!file.empty()) return equilibrium_from_config(Config::load_file(file));
        if (!pair.empty())
            return make_vortex_pair(pair[0], pair[1], pair.size() > 2 ? pair[2] : 1.0);
        if (!triangle.empty())
            return make_equilateral_triangle(triangle[0], triangle[1], triangle[2]);
        if (rhombus_y != 0.0) return make_rhombus(rhombus_y);
        return make_collinear_rotor(rotor_rho);
    }
};

std::vector<double> parse_grid(const std::string& text) {
    // "a:b:step" or a comma-separated list
    std::vector<double> grid;
    if (text.find(':') != std::string::npos) {
        double a, b, step;
        if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &a, &b, &step) != 3 || step <= 0.0)
            throw ConfigError("grid: expected start:end:step with step > 0");
        for (double r = a; r <= b + 1e-12; r += step) grid.push_back(r);
    } else {
        Config cfg;
        cfg.set("grid", text);
        grid = cfg.get_double_list("grid");
    }
    if (grid.empty())
        throw ConfigError("grid: no points");
    return grid;
}

Config echo_config(const GlobalOptions& g, const DomainArgs* dom, const RelativeEquilibrium* eq,
                   const std::string& grid = "") {
    Config cfg;
    if (dom) dom->build()->write_config(cfg);
    if (eq) {
        Config e = equilibrium_to_config(*eq);
        for (const std::string& k : e.keys()) cfg.set(k, e.get_string(k));
    }
    if (!grid.empty()) cfg.set("r_grid", grid);
    cfg.set("jobs", g.jobs);
    cfg.set("atol", g.atol);
    cfg.set("rtol", g.rtol);
    cfg.set("cluster_tol", g.cluster_tol);
    return cfg;
}

// ---------------------------------------------------------------------------
// subcommand bodies
// ---------------------------------------------------------------------------

int run_equilibria(const GlobalOptions& g, const EquilibriumArgs& eq_args) {
    RelativeEquilibrium eq = eq_args.build();
    EquilibriumFlags flags = screen_equilibrium(eq);
    auto predicted = predicted_multipliers(eq);
    int unit_mult = 0;
    try {
        unit_mult = equilibrium_unit_multiplicity(eq);
    } catch (const NumericalError&) {
        unit_mult = -1;  // not an equilibrium at all
    }

    std::vector<std::string> cols = {"kind",       "shape_parameter", "gamma_total",
                                     "momentum",   "nu",              "residual",
                                     "degenerate", "lre_screen",      "unit_multiplicity"};
    for (int k = 1; k <= 4; ++k) {
        cols.push_back("mult" + std::to_string(k) + "_re");
        cols.push_back("mult" + std::to_string(k) + "_im");
    }
    CsvWriter csv(cols);
    std::vector<std::string> row = {to_string(eq.kind),
                                    format_double(eq.shape_parameter),
                                    format_double(eq.vorticities.total()),
                                    format_double(eq.vorticities.momentum()),
                                    format_double(eq.nu),
                                    format_double(equilibrium_residual(eq)),
                                    flags.algebraic_degenerate ? "1" : "0",
                                    flags.lre_stable_screen ? "1" : "0",
                                    std::to_string(unit_mult)};
    for (int k = 0; k < 4; ++k) {
        if (predicted && k < static_cast<int>(predicted->size())) {
            row.push_back(format_double(std::real((*predicted)[k])));
            row.push_back(format_double(std::imag((*predicted)[k])));
        } else {
            row.push_back("nan");
            row.push_back("nan");
        }
    }
    csv.add_row_mixed(row);
    std::string path = out_path(g, "equilibria.csv");
    csv.save(path);
    std::cout << csv.serialize();
    if (!flags.note.empty()) std::cout << "# note: " << flags.note << "\n";

    Manifest m("equilibria");
    m.set_config(echo_config(g, nullptr, &eq));
    m.results()["residual"] = equilibrium_residual(eq);
    m.results()["unit_multiplicity"] = unit_mult;
    m.results()["note"] = flags.note;
    m.add_output(path);
    m.save(out_path(g, "equilibria_manifest.json"));
    return 0;
}

int run_simulate(const GlobalOptions& g, const std::string& initial_file, double tmax,
                 int samples, const std::string& out_name) {
    Config cfg = Config::load_file(initial_file);
    Vorticities vort(cfg.get_double_list("gamma"));
    std::vector<double> pos = cfg.get_double_list("positions");
    if (pos.size() != static_cast<std::size_t>(2 * vort.count()))
        throw ConfigError("simulate: positions must hold 2N numbers");
    VecX u0(static_cast<Eigen::Index>(pos.size()));
    for (std::size_t i = 0; i < pos.size(); ++i) u0[static_cast<Eigen::Index>(i)] = pos[i];
    std::shared_ptr<const DomainModel> domain =
        cfg.has("domain") ? domain_from_config(cfg) : std::make_shared<WholePlane>();
    double r = cfg.get_double_or("r", 0.0);

    ScaledHamiltonian sh(domain, vort, r);
    FlowOptions fopts;
    fopts.integrator.atol = g.atol;
    fopts.integrator.rtol = g.rtol;
    fopts.samples = samples;
    Trajectory traj = flow(sh, u0, tmax, fopts);

    std::vector<std::string> cols = {"t"};
    for (int j = 1; j <= vort.count(); ++j) {
        cols.push_back("x" + std::to_string(j));
        cols.push_back("y" + std::to_string(j));
    }
    cols.push_back("H");
    CsvWriter csv(cols);
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        std::vector<double> row = {traj.times[i]};
        for (Eigen::Index k = 0; k < traj.states[i].size(); ++k)
            row.push_back(traj.states[i][k]);
        row.push_back(sh.value(traj.states[i]));
        csv.add_row(row);
    }
    std::string path = out_path(g, out_name);
    csv.save(path);

    Manifest m("simulate");
    Config echo = cfg;
    echo.set("tmax", tmax);
    echo.set("samples", samples);
    m.set_config(echo);
    m.results()["energy_drift"] = traj.energy_drift;
    m.results()["min_separation"] = traj.min_separation;
    m.results()["ok"] = traj.ok;
    m.add_output(path);
    m.save(out_path(g, "simulate_manifest.json"));
    std::cout << "wrote " << path << "  energy drift " << format_double(traj.energy_drift)
              << (traj.ok ? "" : "  [FAILED: drift above tolerance]") << "\n";
    return traj.ok ? 0 : 3;
}

void print_spectrum_csv(const GlobalOptions& g, const FloquetSpectrum& spec,
                        const std::string& csv_name, Manifest& m) {
    CsvWriter csv({"re", "im", "abs", "cluster"});
    std::vector<int> cluster_of(static_cast<std::size_t>(spec.eigenvalues.size()), -1);
    for (std::size_t c = 0; c < spec.clusters.size(); ++c)
        for (int idx : spec.clusters[c]) cluster_of[static_cast<std::size_t>(idx)] = static_cast<int>(c);
    for (Eigen::Index i = 0; i < spec.eigenvalues.size(); ++i)
        csv.add_row_mixed({format_double(std::real(spec.eigenvalues[i])),
                           format_double(std::imag(spec.eigenvalues[i])),
                           format_double(std::abs(spec.eigenvalues[i])),
                           std::to_string(cluster_of[static_cast<std::size_t>(i)])});
    std::string path = out_path(g, csv_name);
    csv.save(path);
    std::cout << csv.serialize();
    std::cout << "# labels: "
              << (spec.labels.spectrally_stable ? "spectrally_stable" : "spectrally_unstable")
              << (spec.labels.l_stable ? " L_stable" : "")
              << (spec.labels.algebraic_nondegenerate ? " algebraic_nondegenerate" : "")
              << "  unit_multiplicity=" << spec.unit_multiplier_multiplicity
              << "  det=" << format_double(spec.determinant) << "\n";
    m.results()["spectrally_stable"] = spec.labels.spectrally_stable;
    m.results()["l_stable"] = spec.labels.l_stable;
    m.results()["algebraic_nondegenerate"] = spec.labels.algebraic_nondegenerate;
    m.results()["unit_multiplicity"] = spec.unit_multiplier_multiplicity;
    m.results()["estimated_geometric_multiplicity"] = spec.estimated_geometric_multiplicity;
    m.results()["determinant"] = spec.determinant;
    m.results()["pairing_defect"] = spec.pairing_defect;
    m.add_output(path);
}

int run_floquet(const GlobalOptions& g, const EquilibriumArgs& eq_args,
                const std::string& point_file, double degeneracy_tol) {
    SpectrumOptions sopts;
    sopts.cluster_tol = g.cluster_tol;
    Manifest m("floquet");

    if (!point_file.empty()) {
        // family point: domain + r + gamma + positions, monodromy by integration
        Config cfg = Config::load_file(point_file);
        Vorticities vort(cfg.get_double_list("gamma"));
        std::vector<double> pos = cfg.get_double_list("positions");
        VecX u0(static_cast<Eigen::Index>(pos.size()));
        for (std::size_t i = 0; i < pos.size(); ++i) u0[static_cast<Eigen::Index>(i)] = pos[i];
        std::shared_ptr<const DomainModel> domain =
            cfg.has("domain") ? domain_from_config(cfg) : std::make_shared<WholePlane>();
        ScaledHamiltonian sh(domain, vort, cfg.get_double_or("r", 0.0));
        IntegratorOptions iopts;
        iopts.atol = g.atol;
        iopts.rtol = g.rtol;
        MatX x = monodromy(sh, u0, 1e-8, iopts);
        FloquetSpectrum spec = spectrum(x, sopts);
        m.set_config(cfg);
        print_spectrum_csv(g, spec, "floquet.csv", m);
        m.save(out_path(g, "floquet_manifest.json"));
        return 0;
    }

    RelativeEquilibrium eq = eq_args.build();
    // the closed-form extended-precision lane keeps defective clusters intact
    FloquetSpectrum spec = equilibrium_spectrum(eq, sopts);
    m.set_config(echo_config(g, nullptr, &eq));
    print_spectrum_csv(g, spec, "floquet.csv", m);
    int degeneracy_mult = equilibrium_unit_multiplicity(eq, degeneracy_tol);
    std::cout << "# unit multiplicity at detection tolerance " << format_double(degeneracy_tol)
              << ": " << degeneracy_mult << "\n";
    m.results()["unit_multiplicity_detection"] = degeneracy_mult;

    // cross-check: integrated monodromy agrees with the closed form
    MatX integrated = equilibrium_monodromy(eq);
    double cross = (integrated - spec.monodromy).cwiseAbs().maxCoeff();
    m.results()["integration_cross_check"] = cross;
    m.save(out_path(g, "floquet_manifest.json"));
    return 0;
}

void write_plot_script(const GlobalOptions& g, const std::string& csv_name,
                       const std::string& script_name, Manifest& m) {
    std::string path = out_path(g, script_name);
    std::ofstream f(path);
    f << "#!/usr/bin/env python3\n"
         "# Plots the sweep curves (multiplier pair and trace gap against r).\n"
         "import csv\n"
         "import matplotlib.pyplot as plt\n"
         "\n"
         "rows = list(csv.DictReader(open('"
      << csv_name
      << "')))\n"
         "r = [float(q['r']) for q in rows]\n"
         "off = [abs(complex(float(q['lambda_plus_re']), float(q['lambda_plus_im'])) - 1)\n"
         "       for q in rows]\n"
         "gap = [abs(4.0 - float(q['trace'])) for q in rows]\n"
         "\n"
         "fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 4))\n"
         "ax1.loglog(r, off, 'o-', label='|lambda_+ - 1|')\n"
         "ax1.loglog(r, [off[0] * (x / r[0]) ** 2 for x in r], '--', label='~r^2')\n"
         "ax1.set_xlabel('r'); ax1.legend()\n"
         "ax2.loglog(r, gap, 's-', label='|4 - tr X_r(2pi)|')\n"
         "ax2.loglog(r, [gap[0] * (x / r[0]) ** 4 for x in r], '--', label='~r^4')\n"
         "ax2.set_xlabel('r'); ax2.legend()\n"
         "fig.tight_layout()\n"
         "fig.savefig('sweep_curves.png', dpi=150)\n"
         "print('wrote sweep_curves.png')\n";
    f.close();
    m.add_output(path);
}

int run_continuation(const GlobalOptions& g, const DomainArgs& dom_args,
                     const EquilibriumArgs& eq_args, const std::string& grid_text,
                     bool full_sweep, const std::string& dump_points) {
    std::shared_ptr<const DomainModel> domain = dom_args.build();
    RelativeEquilibrium eq = eq_args.build();
    std::vector<double> grid = parse_grid(grid_text);

    ContinuationOptions copts;
    copts.integrator.atol = g.atol;
    copts.integrator.rtol = g.rtol;
    copts.jobs = g.jobs;
    FamilyResult fam = continue_family(domain, eq, grid, copts);
    if (fam.diagnostic)
        std::cout << "# continuation break: " << *fam.diagnostic << "\n";
    if (fam.points.empty())
        throw NonConvergenceError(fam.diagnostic ? *fam.diagnostic
                                                 : "continuation produced no points");

    MultiplierCurve curve = multiplier_curve(domain, fam, copts);
    Mat2 hess = robin_hessian_at_origin(*domain);
    bool trace_ok = fam.seed.n_vortices() == 2 &&
                    (domain->is_trivial() || hess.determinant() > 0.0);
    TraceCurve traces;
    if (trace_ok) traces = trace_curve(*domain, fam);

    const std::string csv_name = full_sweep ? "sweep.csv" : "continue.csv";
    CsvWriter csv({"r", "residual", "energy", "lambda_plus_re", "lambda_plus_im",
                   "lambda_minus_re", "lambda_minus_im", "trace", "l_stable",
                   "spectrally_unstable", "fit_coeff_re", "fit_coeff_im", "fit_exponent",
                   "trace_fit_coeff", "trace_fit_exponent"});
    for (std::size_t i = 0; i < fam.points.size(); ++i) {
        const FamilyPoint& p = fam.points[i];
        csv.add_row_mixed({format_double(p.r), format_double(p.residual),
                           format_double(p.energy),
                           format_double(std::real(curve.lambda_plus[i])),
                           format_double(std::imag(curve.lambda_plus[i])),
                           format_double(std::real(curve.lambda_minus[i])),
                           format_double(std::imag(curve.lambda_minus[i])),
                           format_double(p.monodromy.trace()),
                           p.spec.labels.l_stable ? "1" : "0",
                           p.spec.labels.spectrally_unstable ? "1" : "0",
                           format_double(std::real(curve.fitted_coefficient)),
                           format_double(std::imag(curve.fitted_coefficient)),
                           format_double(curve.fitted_exponent),
                           format_double(trace_ok ? traces.fitted_coefficient : 0.0),
                           format_double(trace_ok ? traces.fitted_exponent : 0.0)});
    }
    std::string path = out_path(g, csv_name);
    csv.save(path);

    Manifest m(full_sweep ? "sweep" : "continue");
    m.set_config(echo_config(g, &dom_args, &eq, grid_text));
    m.add_output(path);
    auto& res = m.results();
    res["points"] = fam.points.size();
    res["predicted_coefficient_re"] = std::real(curve.predicted_coefficient);
    res["predicted_coefficient_im"] = std::imag(curve.predicted_coefficient);
    res["fitted_coefficient_re"] = std::real(curve.fitted_coefficient);
    res["fitted_coefficient_im"] = std::imag(curve.fitted_coefficient);
    res["fitted_exponent"] = curve.fitted_exponent;
    res["max_pairing_defect"] = curve.max_pairing_defect;
    if (fam.diagnostic) res["diagnostic"] = *fam.diagnostic;
    if (trace_ok) {
        res["trace_predicted_c"] = traces.predicted_c;
        res["trace_fitted_coefficient"] = traces.fitted_coefficient;
        res["trace_fitted_exponent"] = traces.fitted_exponent;
    }

    if (full_sweep) {
        MonodromyExpansionReport rep = check_monodromy_expansion(
            hess, fam.seed.vorticities.total(), expansion_samples(fam));
        nlohmann::json e;
        e["limit_scale"] = rep.limit_scale;
        e["e1_deviations"] = rep.e1.deviation;
        e["e2_deviations"] = rep.e2.deviation;
        e["e1_order_estimate"] = rep.e1.order_estimate;
        e["e2_order_estimate"] = rep.e2.order_estimate;
        res["expansion_check"] = e;
        if (g.emit_plot) write_plot_script(g, csv_name, "plot_sweep.py", m);
    }
    if (!dump_points.empty()) {
        std::filesystem::create_directories(dump_points);
        for (std::size_t i = 0; i < fam.points.size(); ++i) {
            Config pc;
            domain->write_config(pc);
            pc.set("gamma", fam.seed.vorticities.gamma());
            pc.set("r", fam.points[i].r);
            std::vector<double> pos(fam.points[i].u0.data(),
                                    fam.points[i].u0.data() + fam.points[i].u0.size());
            pc.set("positions", pos);
            std::string pf = (std::filesystem::path(dump_points) /
                              ("point_" + std::to_string(i) + ".cfg"))
                                 .string();
            pc.save_file(pf);
            m.add_output(pf);
        }
    }
    m.save(out_path(g, full_sweep ? "sweep_manifest.json" : "continue_manifest.json"));

    std::cout << csv.serialize();
    std::cout << "# predicted coefficient: " << std::real(curve.predicted_coefficient)
              << (std::imag(curve.predicted_coefficient) >= 0 ? "+" : "")
              << std::imag(curve.predicted_coefficient) << "i"
              << "   fitted: " << std::real(curve.fitted_coefficient)
              << (std::imag(curve.fitted_coefficient) >= 0 ? "+" : "")
              << std::imag(curve.fitted_coefficient) << "i   exponent " << curve.fitted_exponent
              << "\n";
    return 0;
}

int run_robin(const GlobalOptions& g, const DomainArgs& dom_args, int per_axis,
              double gamma_total) {
    std::shared_ptr<const DomainModel> domain = dom_args.build();
    RobinSearchOptions opts;
    opts.jobs = g.jobs;
    RobinSearchResult res =
        find_critical_points(*domain, default_seed_grid(*domain, per_axis), opts);

    CsvWriter csv({"x", "y", "h", "hxx", "hxy", "hyy", "class", "nondegenerate",
                   "pred_coeff_re", "pred_coeff_im"});
    for (const CriticalPoint& p : res.points) {
        Complex c = p.prediction_coefficient(gamma_total);
        csv.add_row_mixed({format_double(p.location[0]), format_double(p.location[1]),
                           format_double(p.h_value), format_double(p.hessian(0, 0)),
                           format_double(p.hessian(0, 1)), format_double(p.hessian(1, 1)),
                           to_string(p.classification), p.nondegenerate ? "1" : "0",
                           format_double(std::real(c)), format_double(std::imag(c))});
    }
    std::string path = out_path(g, "robin.csv");
    csv.save(path);
    std::cout << csv.serialize();
    if (!res.unconverged.empty())
        std::cout << "# unconverged seeds: " << res.unconverged.size() << "\n";

    Manifest m("robin");
    m.set_config(echo_config(g, &dom_args, nullptr));
    m.results()["points"] = res.points.size();
    m.results()["unconverged"] = res.unconverged.size();
    m.add_output(path);
    m.save(out_path(g, "robin_manifest.json"));
    return 0;
}

int run_bifurcation_selftest(const GlobalOptions& g) {
    CounterexampleReport rep = counterexample_suite();
    for (const auto& item : rep.items)
        std::cout << (item.passed ? "PASS  " : "FAIL  ") << item.name
                  << (item.detail.empty() ? "" : "  [" + item.detail + "]") << "\n";
    Manifest m("bifurcation-selftest");
    m.set_config(echo_config(g, nullptr, nullptr));
    m.results()["all_passed"] = rep.all_passed;
    m.save(out_path(g, "bifurcation_manifest.json"));
    return rep.all_passed ? 0 : 3;
}

int run_bifurcation_fit(const GlobalOptions& g, const std::string& input, double l0_re,
                        double l0_im, int gauge) {
    // CSV of sampled matrices: header r,m00_re,m00_im,m01_re,... row-major k x k
    std::ifstream in(input);
    if (!in)
        throw ConfigError("bifurcation fit: cannot open '" + input + "'");
    std::string header;
    std::getline(in, header);
    std::size_t ncols = 1 + static_cast<std::size_t>(std::count(header.begin(), header.end(), ','));
    int k = static_cast<int>(std::lround(std::sqrt((ncols - 1) / 2.0)));
    if (static_cast<std::size_t>(2 * k * k + 1) != ncols)
        throw ConfigError("bifurcation fit: column count must be 1 + 2 k^2");

    std::vector<double> grid;
    std::vector<CMatX> mats;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> vals;
        std::size_t pos = 0;
        while (pos <= line.size()) {
            std::size_t comma = line.find(',', pos);
            vals.push_back(std::strtod(line.c_str() + pos, nullptr));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (vals.size() != ncols)
            throw ConfigError("bifurcation fit: ragged row");
        grid.push_back(vals[0]);
        CMatX mat(k, k);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j)
                mat(i, j) = Complex(vals[1 + 2 * (i * k + j)], vals[2 + 2 * (i * k + j)]);
        mats.push_back(mat);
    }
    if (grid.size() < 3 || grid.front() != 0.0)
        throw ConfigError("bifurcation fit: need the r = 0 matrix first plus a grid");

    CMatX m0 = mats.front();
    std::vector<double> rs(grid.begin() + 1, grid.end());
    std::vector<CMatX> ms(mats.begin() + 1, mats.end());
    MatrixFamily family{[&](double r) -> CMatX {
                            if (r == 0.0) return m0;
                            for (std::size_t i = 0; i < rs.size(); ++i)
                                if (rs[i] == r) return ms[i];
                            throw ConfigError("bifurcation fit: off-grid evaluation");
                        },
                        rs.back()};
    ExpansionFit fit = fit_expansion(family, Complex(l0_re, l0_im), gauge, rs);

    std::cout << (fit.accepted ? "accepted" : "rejected: " + fit.rejection_reason) << "\n";
    Manifest m("bifurcation-fit");
    Config cfg;
    cfg.set("input", input);
    cfg.set("lambda0_re", l0_re);
    cfg.set("lambda0_im", l0_im);
    cfg.set("gauge", gauge);
    m.set_config(cfg);
    auto& res = m.results();
    res["accepted"] = fit.accepted;
    res["rejection_reason"] = fit.rejection_reason;
    res["remainder_ratios"] = fit.remainder_ratios;
    if (fit.b0.size() > 0) {
        std::vector<double> re, im;
        for (Eigen::Index i = 0; i < fit.b0_eigenvalues.size(); ++i) {
            re.push_back(std::real(fit.b0_eigenvalues[i]));
            im.push_back(std::imag(fit.b0_eigenvalues[i]));
        }
        res["b0_eigenvalues_re"] = re;
        res["b0_eigenvalues_im"] = im;
        std::cout << "B0 eigenvalues:";
        for (std::size_t i = 0; i < re.size(); ++i)
            std::cout << " " << re[i] << (im[i] >= 0 ? "+" : "") << im[i] << "i";
        std::cout << "\n";
    }
    if (fit.accepted) {
        auto branches = predict_and_match(fit, family, rs);
        nlohmann::json jb = nlohmann::json::array();
        for (const EigBranch& br : branches) {
            nlohmann::json b;
            b["mu0_re"] = std::real(br.mu0);
            b["mu0_im"] = std::imag(br.mu0);
            b["deviation"] = br.deviation;
            jb.push_back(b);
        }
        res["branches"] = jb;
    }
    m.save(out_path(g, "bifurcation_manifest.json"));
    return 0;
}

int run_selftest(const GlobalOptions& g) {
    int failures = 0;
    auto report = [&](const std::string& name, bool ok, const std::string& detail = "") {
        std::cout << (ok ? "PASS  " : "FAIL  ") << name
                  << (detail.empty() ? "" : "  [" + detail + "]") << "\n";
        if (!ok) ++failures;
    };

    // catalog equilibria: defining identities
    std::vector<RelativeEquilibrium> catalog = {
        make_vortex_pair(1.0, 1.0, 1.0), make_vortex_pair(1.0, 3.0, 0.8),
        make_equilateral_triangle(1.0, 2.0, 3.0), make_rhombus(1.1),
        make_collinear_rotor(1.0)};
    double worst_res = 0.0, worst_cov = 0.0;
    for (const auto& eq : catalog) {
        worst_res = std::max(worst_res, equilibrium_residual(eq));
        worst_cov = std::max(worst_cov, center_of_vorticity(eq.z0, eq.vorticities).norm());
    }
    report("rigid-rotation residuals < 1e-10", worst_res < 1e-10, format_double(worst_res));
    report("centre of vorticity < 1e-10", worst_cov < 1e-10, format_double(worst_cov));

    // scaling and translation identities at random configurations
    {
        std::mt19937 gen(12345);
        auto uni = [&](double a, double b) {
            return std::uniform_real_distribution<double>(a, b)(gen);
        };
        double worst_radial = 0.0, worst_trans = 0.0;
        for (int trial = 0; trial < 25; ++trial) {
            int n = 2 + trial % 3;
            std::vector<double> gam(static_cast<std::size_t>(n));
            for (double& v : gam) v = uni(0.5, 2.0) * (uni(0, 1) < 0.3 ? -1.0 : 1.0);
            Vorticities vort(gam);
            VecX z(2 * n);
            bool ok = false;
            while (!ok) {
                for (int i = 0; i < 2 * n; ++i) z[i] = uni(-1.5, 1.5);
                ok = min_pairwise_distance(z, n) > 0.3;
            }
            double ip = whole_plane_gradient(z, vort).dot(z);
            worst_radial = std::max(worst_radial, std::abs(ip + vort.momentum() / kPi));
            Vec2 a(uni(-1, 1), uni(-1, 1));
            worst_trans = std::max(
                worst_trans, std::abs(whole_plane_gradient(z, vort).dot(diagonal_lift(a, n))));
        }
        report("<grad H_0, z> = -L/pi within 1e-10", worst_radial < 1e-10,
               format_double(worst_radial));
        report("grad H_0 orthogonal to D within 1e-10", worst_trans < 1e-10,
               format_double(worst_trans));
    }

    // conservation and symplecticity along the triangle
    {
        RelativeEquilibrium eq = make_equilateral_triangle(1.0, 2.0, 3.0).normalized();
        ScaledHamiltonian sh(std::make_shared<WholePlane>(), eq.vorticities, 0.0);
        VariationalResult vr = variational_flow(sh, eq.z0, 2.0 * kPi);
        report("energy drift < 1e-9", vr.energy_drift < 1e-9, format_double(vr.energy_drift));
        report("symplecticity defect < 1e-8", vr.symplectic_defect < 1e-8,
               format_double(vr.symplectic_defect));
    }

    // eigenvalue pairing across the catalog
    {
        double worst = 0.0;
        for (const auto& eq : catalog)
            worst = std::max(worst, spectrum(equilibrium_monodromy(eq)).pairing_defect);
        report("multiplier pairing lambda <-> 1/lambda within 1e-6", worst < 1e-6,
               format_double(worst));
    }

    // derivative consistency of the disc model
    {
        UnitDisc disc;
        Vec2 x(0.31, -0.14), y(-0.42, 0.22);
        PairEval pe = disc.pair_eval(x, y, 2);
        double step = 1e-6;
        Vec2 fd_grad;
        for (int a = 0; a < 2; ++a) {
            Vec2 xp = x, xm = x;
            xp[a] += step;
            xm[a] -= step;
            fd_grad[a] = (disc.pair_eval(xp, y, 0).g - disc.pair_eval(xm, y, 0).g) / (2 * step);
        }
        report("disc grad g vs finite differences < 1e-6", (pe.grad1 - fd_grad).norm() < 1e-6,
               format_double((pe.grad1 - fd_grad).norm()));
    }

    // degeneracy detection
    {
        bool ok = equilibrium_unit_multiplicity(make_equilateral_triangle(1.0, 1.0, -0.5)) >= 6 &&
                  equilibrium_unit_multiplicity(make_collinear_rotor(1.0)) >= 6 &&
                  equilibrium_unit_multiplicity(make_vortex_pair(1.0, 1.0, 1.0)) == 4;
        report("unit-multiplier degeneracy detection (L=0, Gamma=0, pair)", ok);
    }

    // bifurcation counterexamples
    {
        CounterexampleReport rep = counterexample_suite();
        report("bifurcation counterexample suite", rep.all_passed);
    }

    // a quick disc continuation
    {
        ContinuationOptions copts;
        copts.jobs = g.jobs;
        FamilyResult fam = continue_family(std::make_shared<UnitDisc>(),
                                           make_vortex_pair(1.0, 1.0, 1.0), {0.1, 0.2}, copts);
        bool ok = fam.points.size() == 2;
        for (const FamilyPoint& p : fam.points) ok = ok && p.spec.labels.l_stable;
        report("disc pair mini-family L-stable", ok);
    }

    std::cout << (failures == 0 ? "selftest: all checks passed\n"
                                : "selftest: " + std::to_string(failures) + " failures\n");
    return failures == 0 ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"N-vortex periodic orbits, Floquet multipliers, and domain-induced stability"};
    app.require_subcommand(1);

    GlobalOptions g;
    if (const char* env = std::getenv("VORTEXSTAB_OUT")) g.out_dir = env;
    app.add_option("--out-dir", g.out_dir, "output directory (env VORTEXSTAB_OUT)")
        ->capture_default_str();
    app.add_option("--jobs", g.jobs, "worker threads for sweeps and scans (1 = serial)")
        ->capture_default_str();
    app.add_option("--atol", g.atol, "integrator absolute tolerance")->capture_default_str();
    app.add_option("--rtol", g.rtol, "integrator relative tolerance")->capture_default_str();
    app.add_option("--cluster-tol", g.cluster_tol, "eigenvalue cluster tolerance")
        ->capture_default_str();

    auto* c_eq = app.add_subcommand("equilibria", "construct an equilibrium and report it");
    EquilibriumArgs eq_eq;
    eq_eq.attach(c_eq);

    auto* c_sim = app.add_subcommand("simulate", "integrate a configuration, CSV trajectory out");
    std::string sim_initial, sim_out = "trajectory.csv";
    double sim_tmax = 2.0 * kPi;
    int sim_samples = 200;
    c_sim->add_option("--initial", sim_initial, "initial-condition config file")->required();
    c_sim->add_option("--tmax", sim_tmax, "integration time")->capture_default_str();
    c_sim->add_option("--samples", sim_samples, "number of output samples")
        ->capture_default_str();
    c_sim->add_option("--out", sim_out, "trajectory CSV name")->capture_default_str();

    auto* c_flo = app.add_subcommand("floquet", "monodromy spectrum of an equilibrium or point");
    EquilibriumArgs eq_flo;
    eq_flo.attach(c_flo);
    std::string flo_point;
    double flo_deg_tol = 1e-4;
    c_flo->add_option("--point", flo_point, "family-point config file (integrated monodromy)");
    c_flo->add_option("--degeneracy-tol", flo_deg_tol,
                      "cluster tolerance for the degeneracy report")
        ->capture_default_str();

    auto* c_cont = app.add_subcommand("continue", "continue the periodic family over an r grid");
    auto* c_sweep = app.add_subcommand(
        "sweep", "continue the family and fit the multiplier/trace expansions");
    DomainArgs dom_cont, dom_sweep;
    EquilibriumArgs eq_cont, eq_sweep;
    std::string grid_cont = "0.05:0.2:0.025", grid_sweep = "0.05:0.2:0.025";
    std::string dump_cont, dump_sweep;
    dom_cont.attach(c_cont);
    eq_cont.attach(c_cont);
    c_cont->add_option("--r", grid_cont, "r grid start:end:step or comma list")
        ->capture_default_str();
    c_cont->add_option("--dump-points", dump_cont, "directory for per-point config files");
    dom_sweep.attach(c_sweep);
    eq_sweep.attach(c_sweep);
    c_sweep->add_option("--r", grid_sweep, "r grid start:end:step or comma list")
        ->capture_default_str();
    c_sweep->add_option("--dump-points", dump_sweep, "directory for per-point config files");
    c_sweep->add_flag("--emit-plot", g.emit_plot, "write a matplotlib plot script");

    auto* c_rob =
        app.add_subcommand("robin", "locate and classify Robin-function critical points");
    DomainArgs dom_rob;
    dom_rob.attach(c_rob);
    int rob_axis = 7;
    double rob_gamma = 2.0;
    c_rob->add_option("--seeds-per-axis", rob_axis, "seed grid resolution")
        ->capture_default_str();
    c_rob->add_option("--gamma-total", rob_gamma,
                      "total vorticity for the prediction coefficient")
        ->capture_default_str();

    auto* c_bif = app.add_subcommand("bifurcation", "approximately-simple eigenvalue machinery");
    auto* c_bif_self = c_bif->add_subcommand("selftest", "run the counterexample suite");
    auto* c_bif_fit = c_bif->add_subcommand("fit", "fit an expansion from a CSV of matrices");
    std::string bif_input;
    double bif_l0_re = 1.0, bif_l0_im = 0.0;
    int bif_gauge = 2;
    c_bif_fit->add_option("--input", bif_input, "CSV: r,m00_re,m00_im,... (row r = 0 first)")
        ->required();
    c_bif_fit->add_option("--lambda0-re", bif_l0_re, "real part of lambda0")
        ->capture_default_str();
    c_bif_fit->add_option("--lambda0-im", bif_l0_im, "imaginary part of lambda0")
        ->capture_default_str();
    c_bif_fit->add_option("--gauge", bif_gauge, "gauge exponent n in f(r) = r^n")
        ->capture_default_str();
    c_bif->require_subcommand(1);

    auto* c_self = app.add_subcommand("selftest", "run the cross-module invariant suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        std::filesystem::create_directories(g.out_dir);
        if (*c_eq) return run_equilibria(g, eq_eq);
        if (*c_sim) return run_simulate(g, sim_initial, sim_tmax, sim_samples, sim_out);
        if (*c_flo) return run_floquet(g, eq_flo, flo_point, flo_deg_tol);
        if (*c_cont) return run_continuation(g, dom_cont, eq_cont, grid_cont, false, dump_cont);
        if (*c_sweep) return run_continuation(g, dom_sweep, eq_sweep, grid_sweep, true, dump_sweep);
        if (*c_rob) return run_robin(g, dom_rob, rob_axis, rob_gamma);
        if (*c_bif) {
            if (*c_bif_self) return run_bifurcation_selftest(g);
            if (*c_bif_fit)
                return run_bifurcation_fit(g, bif_input, bif_l0_re, bif_l0_im, bif_gauge);
        }
        if (*c_self) return run_selftest(g);
    } catch (const ConfigError& e) {
        std::cerr << "error (" << e.code() << "): " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "error (" << e.code() << "): " << e.what() << "\n";
        write_error_json(out_path(g, "error.json"), e.code(), e.what());
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        write_error_json(out_path(g, "error.json"), "internal", e.what());
        return 3;
    }
    return 0;
}
