#include "fracspec/commands.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include <json.hpp>

#include "fracspec/selfsim.hpp"
#include "fracspec/sggraph.hpp"
#include "fracspec/version.hpp"
#include "fracspec/walk.hpp"
#include "fracspec/zeta.hpp"

namespace fracspec {

namespace {

using json = nlohmann::ordered_json;

json cplx_json(cplx z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

struct Output {
    json result = json::object();
    std::string summary;
    std::function<void(std::ostream&)> csv;
};

std::vector<int> as_ints(const std::vector<double>& xs) {
    std::vector<int> out;
    for (double x : xs) {
        if (x != std::round(x)) throw ConfigError("expected integers, got " + std::to_string(x));
        out.push_back(static_cast<int>(x));
    }
    return out;
}

std::string fmt(double v, int prec = 12) {
    std::ostringstream os;
    os.precision(prec);
    os << v;
    return os.str();
}

Output cmd_dim(const RunConfig& cfg) {
    Output o;
    double d = hausdorff_dim(cfg.numbers("ratios"));
    o.result["hausdorff_dim"] = d;
    o.summary = "dim " + fmt(d);
    return o;
}

Output cmd_vn(const RunConfig& cfg) {
    Output o;
    int n = static_cast<int>(cfg.integer("level"));
    if (n > 12) throw CapacityError("vn: level above 12");
    auto pts = generate_Vn(sg_system(), sg_boundary(), n);
    o.result["level"] = n;
    o.result["count"] = pts.size();
    json arr = json::array();
    for (auto& p : pts) arr.push_back({p.x(), p.y()});
    o.result["points"] = arr;
    o.summary = "V_" + std::to_string(n) + ": " + std::to_string(pts.size()) + " points";
    o.csv = [pts](std::ostream& os) { write_points_csv(os, pts); };
    return o;
}

Output cmd_graph_eigs(const RunConfig& cfg) {
    Output o;
    const Boundary bc = cfg.bc();
    if (cfg.text("mode") == "oracle") {
        auto sys = sg_spectral_system(bc);
        auto rep = verify_decimation_oracle(static_cast<int>(cfg.integer("level_lo")),
                                            static_cast<int>(cfg.integer("level_hi")), bc, sys,
                                            static_cast<int>(cfg.integer("branches")));
        o.result["levels"] = rep.levels;
        o.result["counts"] = rep.counts;
        o.result["c"] = rep.c;
        o.result["conclusive"] = rep.conclusive;
        json rows = json::array();
        double worst = 0;
        for (auto& r : rep.rows) {
            rows.push_back({{"k", r.k}, {"nu", r.nu}, {"ratio", r.ratio}, {"scaled", r.scaled},
                            {"continuum", r.continuum}, {"fitted", r.fitted}, {"rel_error", r.rel_error}});
            worst = std::max(worst, r.rel_error);
        }
        o.result["rows"] = rows;
        json ex = json::array();
        for (auto& e : rep.exceptional) {
            json cl = json::array();
            for (auto& c : e.clusters) cl.push_back({{"nu", -c.value}, {"multiplicity", c.multiplicity}});
            ex.push_back({{"level", e.level}, {"clusters", cl}});
        }
        o.result["exceptional"] = ex;
        o.summary = "oracle c = " + fmt(rep.c) + ", worst relative error " + fmt(worst, 4);
        return o;
    }
    int n = static_cast<int>(cfg.integer("level"));
    auto g = build_graph(n);
    // Symmetrised form of P - I, same spectrum.
    auto spec = eigensolve_dense(symmetric_laplacian(g, bc), false);
    o.result["level"] = n;
    o.result["bc"] = to_string(bc);
    o.result["count"] = spec.values.size();
    json cl = json::array();
    for (auto& c : spec.clusters) cl.push_back({{"eigenvalue", c.value}, {"multiplicity", c.multiplicity}});
    o.result["clusters"] = cl;
    o.summary = "G_" + std::to_string(n) + " " + to_string(bc) + ": " + std::to_string(spec.values.size()) +
                " eigenvalues, " + std::to_string(spec.clusters.size()) + " distinct";
    o.csv = [spec](std::ostream& os) { write_spectrum_csv(os, spec); };
    return o;
}

Output cmd_restrict_form(const RunConfig& cfg) {
    Output o;
    auto g = build_graph(static_cast<int>(cfg.integer("level")));
    auto form = conductance_form(g, cfg.number("conductance"));
    std::vector<int> subset = cfg.values.count("subset") ? as_ints(cfg.numbers("subset")) : g.boundary;
    auto r = restrict_form(form, subset);
    json Q = json::array();
    for (int i = 0; i < r.size(); ++i) {
        json row = json::array();
        for (int j = 0; j < r.size(); ++j) row.push_back(r.Q(i, j));
        Q.push_back(row);
    }
    o.result["subset"] = subset;
    o.result["Q"] = Q;
    o.summary = "restricted form on " + std::to_string(subset.size()) + " vertices, Q(0,1) = " + fmt(r.Q(0, r.size() > 1 ? 1 : 0));
    Eigen::MatrixXd m = r.Q;
    o.csv = [m](std::ostream& os) { write_matrix_coo(os, m); };
    return o;
}

Output cmd_walk(const RunConfig& cfg) {
    Output o;
    const std::string mode = cfg.text("mode");
    const int threads = static_cast<int>(cfg.integer("threads"));
    o.result["mode"] = mode;
    if (mode == "hitting") {
        WalkConfig w;
        w.level = static_cast<int>(cfg.integer("level"));
        w.start = static_cast<int>(cfg.integer("start"));
        if (w.start < 0) w.start = build_graph(w.level).boundary.front();
        w.samples = cfg.integer("samples");
        w.step_budget = cfg.integer("step_budget");
        w.seed = cfg.seed();
        w.threads = threads;
        auto s = simulate_hitting_times(w);
        o.result["samples"] = s.samples;
        o.result["mean"] = s.mean;
        o.result["variance"] = s.variance;
        o.result["stderr_mean"] = s.stderr_mean;
        o.result["max_t"] = s.max_t;
        json atoms = json::array();
        for (std::int64_t t = 0; t <= std::min<std::int64_t>(s.max_t, 12); ++t) {
            auto a = s.atom(t);
            atoms.push_back({{"t", t}, {"p", a.p}, {"stderr", a.stderr_}});
        }
        o.result["atoms"] = atoms;
        o.summary = "hitting time mean " + fmt(s.mean, 8) + " +- " + fmt(s.stderr_mean, 3);
        o.csv = [s](std::ostream& os) { write_histogram_csv(os, s); };
    } else if (mode == "branching") {
        Pgf q{cfg.numbers("pgf_num"), cfg.numbers("pgf_den")};
        int gens = static_cast<int>(cfg.integer("generations"));
        auto b = branching_simulate(q, gens, cfg.integer("samples"), cfg.seed(), threads);
        o.result["offspring_mean"] = b.offspring_mean;
        o.result["mean_Z"] = b.mean_Z;
        o.result["mean_W"] = b.mean_W;
        o.result["stderr_W"] = b.stderr_W;
        o.summary = "branching E W_" + std::to_string(gens) + " = " + fmt(b.mean_W.back(), 6) + " +- " +
                    fmt(b.stderr_W.back(), 3);
        o.csv = [b](std::ostream& os) {
            os << "generation,mean_Z,mean_W,stderr_W\n";
            os.precision(17);
            for (int g = 0; g <= b.generations; ++g)
                os << g << ',' << b.mean_Z[g] << ',' << b.mean_W[g] << ',' << b.stderr_W[g] << '\n';
        };
    } else if (mode == "returns") {
        auto r = return_probabilities(static_cast<int>(cfg.integer("level")), static_cast<int>(cfg.integer("max_steps")));
        int lo = static_cast<int>(cfg.integer("n_lo")), hi = static_cast<int>(cfg.integer("n_hi"));
        auto band = fluctuation_band(r, lo, hi);
        o.result["d_S"] = r.d_S;
        o.result["vertex"] = r.vertex;
        o.result["max_mass_defect"] = r.max_mass_defect;
        o.result["band"] = {{"n_lo", lo}, {"n_hi", hi}, {"lo", band.lo}, {"hi", band.hi}, {"ratio", band.ratio()}};
        o.summary = "return probabilities: n^{d_S/2} p_n in [" + fmt(band.lo, 6) + ", " + fmt(band.hi, 6) + "]";
        o.csv = [r](std::ostream& os) { write_returns_csv(os, r); };
    } else {
        auto rep = pgf_conjugation_check(Pgf{cfg.numbers("pgf_num"), cfg.numbers("pgf_den")});
        o.result["psi_at_1"] = rep.psi_at_1;
        o.result["lambda"] = rep.lambda;
        o.result["polynomial"] = rep.polynomial;
        o.result["P"] = rep.P;
        o.result["conjugate"] = rep.conjugate;
        o.summary = std::string("pgf: lambda = ") + fmt(rep.lambda) + (rep.polynomial ? ", polynomial conjugate" : ", not polynomial");
    }
    return o;
}

PolynomialMap<double> coeff_map(const RunConfig& cfg) { return PolynomialMap<double>(cfg.numbers("coeffs")); }

Output cmd_phi(const RunConfig& cfg) {
    Output o;
    auto f = RealPoincare::solve(coeff_map(cfg));
    cplx z(cfg.number("z"), cfg.number("z_im"));
    o.result["order"] = f.order();
    o.result["rho"] = f.rho();
    o.result["z"] = cplx_json(z);
    auto lv = f.log_eval(z);
    o.result["log_abs"] = lv.log_abs;
    o.result["phase"] = cplx_json(lv.phase);
    try {
        o.result["value"] = cplx_json(f(z));
    } catch (const OverflowError&) {
        o.result["value"] = nullptr;
    }
    if (cfg.values.count("theta")) {
        auto prof = growth_profile(f, cfg.number("theta"), cfg.number("t0"), cfg.number("t1"));
        o.result["growth"] = {{"q_min", prof.q_min}, {"q_max", prof.q_max}, {"periodicity_defect", prof.periodicity_defect}};
    }
    o.summary = "log|Phi(z)| = " + fmt(lv.log_abs) + " (series order " + std::to_string(f.order()) + ")";
    o.csv = [f](std::ostream& os) { f.write_csv(os); };
    return o;
}

Output cmd_spiral(const RunConfig& cfg) {
    Output o;
    auto p = coeff_map(cfg);
    auto f = RealPoincare::solve(p);
    const double z0 = cfg.number("z0");
    auto r = spiral_limit(p, cplx(z0), cplx(f(z0)));
    o.result["L"] = r.L;
    o.result["iterations"] = r.iterations;
    o.result["last_difference"] = r.last_difference;
    o.result["advance"] = r.advance;
    o.result["z_used"] = cplx_json(r.z_used);
    o.result["threshold"] = r.threshold;
    o.result["bracket"] = {{"lo", r.bracket_lo}, {"hi", r.bracket_hi}, {"holds", r.bracket_holds}};
    o.result["bracket_z0"] = {{"lo", r.loose_lo_z0}, {"hi", r.loose_hi_z0}, {"holds", r.loose_bracket_holds_z0}};
    o.summary = "spiral L = " + fmt(r.L) + ", bracket " + (r.bracket_holds ? "holds" : "fails");
    return o;
}

Output cmd_julia(const RunConfig& cfg) {
    Output o;
    std::vector<double> c = cfg.numbers("coeffs");
    const bool quad = cfg.values.count("a") && cfg.values.count("omega");
    if (quad) {
        double a = cfg.number("a"), w = cfg.number("omega");
        c = {0.0, -a * w, a};
        o.result["criterion_real"] = julia_real_quadratic(a, w);
    }
    auto rep = julia_sample_and_multipliers(c, static_cast<int>(cfg.integer("depth")),
                                            static_cast<int>(cfg.integer("samples")), cfg.seed());
    o.result["real"] = rep.real;
    o.result["max_abs_imag"] = rep.max_abs_imag;
    o.result["min_J"] = rep.min_J;
    o.result["max_J"] = rep.max_J;
    o.result["chebyshev_equality"] = rep.chebyshev_equality;
    json mult = json::array();
    for (auto& m : rep.multipliers)
        mult.push_back({{"xi", cplx_json(m.xi)}, {"abs_derivative", m.abs_derivative}, {"role", m.role},
                        {"bound", m.bound}, {"satisfied", m.satisfied}, {"equality", m.equality}});
    o.result["multipliers"] = mult;
    o.summary = std::string("Julia set ") + (rep.real ? "real" : "not real") + " in [" + fmt(rep.min_J + 0.0, 8) + ", " +
                fmt(rep.max_J + 0.0, 8) + "]" + (rep.chebyshev_equality ? ", Chebyshev equality" : "");
    auto samples = rep.samples;
    o.csv = [samples](std::ostream& os) {
        os << "re,im\n";
        os.precision(17);
        for (auto z : samples) os << z.real() << ',' << z.imag() << '\n';
    };
    return o;
}

Output cmd_spectrum(const RunConfig& cfg) {
    Output o;
    auto sys = make_system(cfg);
    auto l = enumerate_spectrum(sys, cfg.number("X"));
    o.result["cutoff"] = l.cutoff;
    o.result["distinct"] = l.records.size();
    o.result["total"] = l.total();
    o.result["zero_modes"] = sys.zero_modes;
    o.result["warnings"] = l.warnings;
    json first = json::array();
    for (std::size_t i = 0; i < std::min<std::size_t>(l.records.size(), 20); ++i)
        first.push_back({{"mu", l.records[i].mu}, {"multiplicity", l.records[i].multiplicity}});
    o.result["first"] = first;
    o.summary = std::to_string(l.records.size()) + " distinct eigenvalues below " + fmt(l.cutoff) + ", " +
                std::to_string(l.total()) + " with multiplicity";
    o.csv = [l](std::ostream& os) { write_eigenvalues_csv(os, l); };
    return o;
}

Output cmd_count(const RunConfig& cfg) {
    Output o;
    auto sys = make_system(cfg);
    const double x = cfg.number("x");
    CountingFunction N(sys, std::max(x, 1.0));
    o.result["x"] = x;
    o.result["N"] = N(x);
    json parts = json::array();
    for (std::size_t i = 0; i < sys.A.size(); ++i) parts.push_back({{"w", sys.A[i]}, {"N_w", N.partial(i, x)}});
    o.result["partial"] = parts;
    o.result["scaled"] = double(N(x)) / std::pow(x, sys.spectral_dim() / 2);
    o.summary = "N(" + fmt(x) + ") = " + std::to_string(N(x));
    return o;
}

Output cmd_renewal(const RunConfig& cfg) {
    Output o;
    auto g = cfg.numbers("gamma");
    auto dim = renewal_spectral_dim(g);
    auto r = renewal_iterate(g, [](double t) { return t >= 0 ? std::exp(-t) : 0.0; }, cfg.number("t0"),
                             cfg.number("t1"), cfg.number("h"));
    o.result["d_S"] = r.d_S;
    o.result["lattice"] = r.lattice;
    o.result["warning"] = dim.warning;
    o.result["period"] = r.period;
    o.result["period_defect"] = r.period_defect;
    o.result["limit"] = r.limit;
    o.result["forcing"] = "exp(-t) for t >= 0";
    o.summary = "d_S = " + fmt(r.d_S) + ", " + (r.lattice ? "lattice" : "non-lattice");
    o.csv = [r](std::ostream& os) {
        os << "t,f\n";
        os.precision(17);
        for (std::size_t i = 0; i < r.t.size(); ++i) os << r.t[i] << ',' << r.f[i] << '\n';
    };
    return o;
}

Output cmd_zeta(const RunConfig& cfg) {
    Output o;
    auto sys = make_system(cfg);
    ZetaOptions opt;
    opt.tol = cfg.number("tol");
    cplx s(cfg.number("s"), cfg.number("s_im"));
    o.result["s_re"] = s.real();
    o.result["s_im"] = s.imag();
    if (cfg.values.count("w")) {
        const double w = cfg.number("w");
        ZetaValue v;
        if (s.real() >= 1) {
            auto part = enumerate_partial(sys.phi, w, cfg.number("series_cutoff"));
            std::vector<double> mus;
            for (auto& r : part.records) mus.push_back(r.mu);
            v = partial_zeta_series(mus, sys.rho(), s);
            o.result["branch"] = "series";
        } else if (cfg.text("recipe") == "published") {
            v = partial_zeta_published(sys.phi, w, s, sys.growth, opt);
            o.result["branch"] = "continuation (published prefactor)";
        } else {
            v = partial_zeta_continuation(sys.phi, w, s, sys.growth, opt);
            o.result["branch"] = "continuation";
        }
        o.result["w"] = w;
        o.result["value_re"] = v.value.real();
        o.result["value_im"] = v.value.imag();
        o.result["error_bound"] = v.error;
        o.result["zero_order"] = v.zero_order;
        o.summary = "zeta_w(s) = " + fmt(v.value.real(), 14) + (v.value.imag() != 0 ? " + " + fmt(v.value.imag(), 14) + "i" : "") +
                    " +- " + fmt(v.error, 3);
        return o;
    }
    auto a = assemble_zeta(sys, s, opt, cfg.number("series_cutoff"));
    o.result["branch"] = a.branch;
    o.result["value_re"] = a.value.real();
    o.result["value_im"] = a.value.imag();
    o.result["error_bound"] = a.error;
    json comps = json::array();
    for (std::size_t i = 0; i < a.components.size(); ++i)
        comps.push_back({{"w", sys.A[i]}, {"prefactor", cplx_json(a.prefactors[i])}, {"partial", cplx_json(a.components[i].value)},
                         {"error", a.components[i].error}});
    o.result["components"] = comps;
    o.result["warnings"] = a.warnings;
    o.summary = "zeta(s) = " + fmt(a.value.real(), 14) + " +- " + fmt(a.error, 3);
    return o;
}

Output cmd_casimir(const RunConfig& cfg) {
    Output o;
    auto sys = make_system(cfg);
    Recipe recipe = cfg.text("recipe") == "published" ? Recipe::published : Recipe::corrected;
    auto c = casimir_energy(sys, cfg.number("tol"), recipe);
    o.result["bc"] = to_string(sys.bc);
    o.result["recipe"] = cfg.text("recipe");
    o.result["E_cas"] = c.energy;
    o.result["zeta_minus_half"] = c.zeta;
    o.result["error_bound"] = c.error;
    json parts = json::array();
    for (std::size_t i = 0; i < sys.A.size(); ++i)
        parts.push_back({{"w", sys.A[i]}, {"J", c.integrals[i]}, {"weight", c.weights[i]}});
    o.result["components"] = parts;
    o.summary = "E_cas (" + std::string(to_string(sys.bc)) + ", " + cfg.text("recipe") + ") = " + fmt(c.energy, 13);
    return o;
}

Output cmd_heat_trace(const RunConfig& cfg) {
    Output o;
    auto sys = make_system(cfg);
    const double tmin = cfg.number("t_min"), tmax = cfg.number("t_max");
    const double X = cfg.values.count("X") ? cfg.number("X") : 60.0 / tmin;
    auto c = heat_trace_curve(sys, tmin, tmax, static_cast<int>(cfg.integer("t_points")), X);
    o.result["cutoff"] = X;
    o.result["eigen_records"] = c.eigen_records;
    o.result["defect"] = c.defect;
    o.result["max_tail"] = c.max_tail;
    o.summary = "heat trace: log-lambda periodicity defect " + fmt(c.defect, 4);
    o.csv = [c](std::ostream& os) {
        os << "t,K,scaledK\n";
        os.precision(17);
        for (std::size_t i = 0; i < c.t.size(); ++i) os << c.t[i] << ',' << c.K[i] << ',' << c.scaled[i] << '\n';
    };
    return o;
}

Output dispatch(const RunConfig& cfg) {
    static const std::map<std::string, std::function<Output(const RunConfig&)>> table = {
        {"dim", cmd_dim},         {"vn", cmd_vn},           {"graph-eigs", cmd_graph_eigs},
        {"restrict-form", cmd_restrict_form},                {"walk", cmd_walk},
        {"phi", cmd_phi},         {"spiral", cmd_spiral},   {"julia", cmd_julia},
        {"spectrum", cmd_spectrum}, {"count", cmd_count},   {"renewal", cmd_renewal},
        {"zeta", cmd_zeta},       {"casimir", cmd_casimir}, {"heat-trace", cmd_heat_trace},
    };
    auto it = table.find(cfg.command);
    if (it == table.end()) throw ConfigError("unknown subcommand '" + cfg.command + "'");
    return it->second(cfg);
}

}  // namespace

int run_command(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    Output o;
    try {
        o = dispatch(cfg);
    } catch (const AccuracyError& e) {
        err << "accuracy: " << e.what() << '\n';
        return exit_accuracy;
    } catch (const BudgetError& e) {
        err << "budget: " << e.what() << " (" << e.completed << " samples done, partial mean " << e.partial_mean << ")\n";
        return exit_accuracy;
    } catch (const CapacityError& e) {
        err << "capacity: " << e.what() << '\n';
        return exit_accuracy;
    } catch (const NumericError& e) {
        err << "numeric: " << e.what() << '\n';
        return exit_accuracy;
    } catch (const OverflowError& e) {
        err << "overflow: " << e.what() << '\n';
        return exit_accuracy;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    }
    json doc;
    doc["command"] = cfg.command;
    doc["version"] = version;
    doc["csv_schema"] = csv_schema;
    doc["config"] = cfg.echo();
    doc["result"] = o.result;
    const std::string path = cfg.text("output");
    if (path == "-") {
        out << doc.dump(2) << '\n';
        err << o.summary << '\n';
    } else {
        std::ofstream f(path);
        if (!f) {
            err << "error: cannot write " << path << '\n';
            return exit_usage;
        }
        f << doc.dump(2) << '\n';
        out << o.summary << '\n';
    }
    const std::string csv = cfg.values.count("csv") ? cfg.values.at("csv") : "";
    if (!csv.empty() && o.csv) {
        std::ofstream f(csv);
        if (!f) {
            err << "error: cannot write " << csv << '\n';
            return exit_usage;
        }
        o.csv(f);
    }
    return exit_ok;
}

}  // namespace fracspec
