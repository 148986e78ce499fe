#include "fracspec/zeta.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/sin_pi.hpp>

namespace fracspec {

namespace {

using boost::math::quadrature::gauss_kronrod;

// Neumaier summation, real and imaginary parts separately.
struct CompensatedSum {
    double re = 0, im = 0, cre = 0, cim = 0;
    static void add1(double& s, double& c, double x) {
        double t = s + x;
        c += std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
        s = t;
    }
    void add(cplx z) {
        add1(re, cre, z.real());
        add1(im, cim, z.imag());
    }
    cplx value() const { return {re + cre, im + cim}; }
};

// q(y) = p(y) - w - a_d (y - w)^d, degree < d.
std::vector<double> q_coeffs(const PolynomialMap<double>& p, double w) {
    const int d = p.degree();
    const double ad = p.leading();
    std::vector<double> q(p.coeffs().begin(), p.coeffs().end());
    q[0] -= w;
    double binom = 1;
    for (int k = 0; k <= d; ++k) {
        q[k] -= ad * binom * std::pow(-w, d - k);
        binom = binom * (d - k) / (k + 1);
    }
    q.resize(d);
    return q;
}

double q_bound(const PolynomialMap<double>& p, double w) {
    double k = 0;
    for (double c : q_coeffs(p, w)) k += std::abs(c);
    return k / std::abs(p.leading());
}

void check_w(double w) {
    if (!(w < 0)) throw DomainError("partial zeta: w must be negative (w = 0 is not supported)");
}

double log_psi_from_phi(const PolynomialMap<double>& p, const std::vector<double>& q, double w, double y) {
    const int d = p.degree();
    const double ad = p.leading();
    if (!(y - w > 0)) throw DomainError("log_psi: Phi_w(x) <= 0");
    if (std::abs(y) <= 1) {
        double num = p(y) - w;
        return std::log(num / (ad * std::pow(y - w, d)));
    }
    // r = q(y) / (a_d (y - w)^d) written in t = 1/y.
    const double t = 1.0 / y;
    double acc = 0, tp = 1;
    for (int i = d - 1; i >= 0; --i) {
        tp *= t;
        acc += q[i] * tp;
    }
    return std::log1p(acc / (ad * std::pow(1 - w * t, d)));
}

double delta_from_phi(const PolynomialMap<double>& p, double w, double y) {
    return std::log1p(-p(y) / w) - p.degree() * std::log1p(-y / w);
}

cplx lambda_pow(double lam, cplx s) { return std::exp(s * std::log(lam)); }

cplx sin_pi(cplx s) {
    if (s.imag() == 0.0) return boost::math::sin_pi(s.real());
    return std::sin(M_PI * s);
}

}  // namespace

double log_psi_zero(const PolynomialMap<double>& p, double w) {
    check_w(w);
    return -(std::log(p.leading()) + (p.degree() - 1) * std::log(-w));
}

double log_psi(const RealPoincare& phi, double w, double x) {
    check_w(w);
    if (x < 0) throw DomainError("log_psi: x must be >= 0");
    double y = phi(x);
    return log_psi_from_phi(phi.map(), q_coeffs(phi.map(), w), w, y);
}

double log_psi_delta(const RealPoincare& phi, double w, double x) {
    check_w(w);
    if (x < 0) throw DomainError("log_psi_delta: x must be >= 0");
    double y = phi(x);
    if (y > 1) return log_psi(phi, w, x) - log_psi_zero(phi.map(), w);
    return delta_from_phi(phi.map(), w, y);
}

int zero_order(const PolynomialMap<double>& p, double w) {
    auto roots = p.solve(w);
    std::vector<int> used(roots.size(), 0);
    std::vector<int> sizes;
    for (std::size_t i = 0; i < roots.size(); ++i) {
        if (used[i]) continue;
        int k = 1;
        for (std::size_t j = i + 1; j < roots.size(); ++j)
            if (!used[j] && std::abs(roots[i] - roots[j]) <= 1e-7 * std::max(1.0, std::abs(roots[i]))) {
                used[j] = 1;
                ++k;
            }
        sizes.push_back(k);
    }
    for (int k : sizes)
        if (k != sizes.front())
            throw DomainError("partial zeta: zeros of Phi - w have mixed orders");
    return sizes.front();
}

ZetaValue mellin_psi(const RealPoincare& phi, double w, cplx s, const GrowthConstants& g, const ZetaOptions& opt) {
    check_w(w);
    const double sigma = s.real();
    if (!(sigma < 1)) throw DomainError("Mellin integral: continuation needs Re s < 1");
    if (s == cplx(0)) throw PoleError("Mellin integral: pole at s = 0");
    const auto& p = phi.map();
    const auto q = q_coeffs(p, w);
    const double L0 = log_psi_zero(p, w);
    const double rho = phi.rho();
    const double target = 1e-15 * std::max(1.0, std::abs(L0));

    ZetaValue out;
    CompensatedSum sum;
    double qerr = 0;

    // x in (0, 1]: x = e^{-v}; integrand (L - L0)(x) e^{s v}.
    auto fa = [&](double v) -> cplx {
        double y = phi(std::exp(-v));
        return delta_from_phi(p, w, y) * std::exp(s * v);
    };
    auto tail_a = [&](double V) {
        double dv = std::abs(delta_from_phi(p, w, phi(std::exp(-V))));
        return 2 * dv * std::exp(sigma * V) / (1 - sigma);
    };
    double VA = 8;
    while (tail_a(VA) > target && VA < 4000) VA += 4;
    double ta = tail_a(VA);
    for (double a = 0; a < VA; a += 1.0) {
        double err = 0;
        cplx r = gauss_kronrod<double, 31>::integrate(fa, a, std::min(a + 1.0, VA), opt.max_depth, opt.panel_tol, &err);
        sum.add(r);
        qerr += err;
        ++out.panels;
    }

    sum.add(-L0 / s);

    // x in [1, T]: x = e^{v}; integrand L(x) e^{-s v}.
    const double Kq = q_bound(p, w);
    auto tail_b = [&](double T) {
        // |L| <= 2 Kq / Phi <= 2 Kq exp(-C1 x^rho) once Phi >= 2 Kq and x >= x0.
        if (T < g.x0 || phi(T) < 2 * Kq) return std::numeric_limits<double>::infinity();
        double a = -sigma / rho, z = g.C1 * std::pow(T, rho);
        double G = a > 0 ? boost::math::tgamma(a, z) : std::pow(z, a - 1) * std::exp(-z);
        return 2 * Kq / rho * std::pow(g.C1, sigma / rho) * G;
    };
    double T = std::max(g.x0, 2.0);
    while (tail_b(T) > target && T < 1e9) T *= 1.25;
    double tb = tail_b(T);
    if (!std::isfinite(tb)) throw AccuracyError("Mellin integral: no valid tail bound", tb);
    auto fb = [&](double v) -> cplx {
        double y = phi(std::exp(v));
        return log_psi_from_phi(p, q, w, y) * std::exp(-s * v);
    };
    const double VB = std::log(T);
    for (double a = 0; a < VB; a += 0.25) {
        double err = 0;
        cplx r = gauss_kronrod<double, 31>::integrate(fb, a, std::min(a + 0.25, VB), opt.max_depth, opt.panel_tol, &err);
        sum.add(r);
        qerr += err;
        ++out.panels;
    }
    out.value = sum.value();
    out.tail_bound = ta + tb;
    out.error = qerr + out.tail_bound;
    return out;
}

namespace {

ZetaValue scaled(ZetaValue j, cplx factor, const ZetaOptions& opt, const std::string& what) {
    ZetaValue out = j;
    out.value = factor * j.value;
    out.error = std::abs(factor) * j.error;
    out.tail_bound = std::abs(factor) * j.tail_bound;
    if (out.error > opt.tol * std::max(1.0, std::abs(out.value))) {
        std::ostringstream os;
        os << what << ": error bound " << out.error << " above tolerance " << opt.tol;
        throw AccuracyError(os.str(), out.error);
    }
    return out;
}

std::string s_str(cplx s) {
    std::ostringstream os;
    os.precision(10);
    os << "s = " << s.real() << (s.imag() < 0 ? " - " : " + ") << std::abs(s.imag()) << "i";
    return os.str();
}

}  // namespace

ZetaValue partial_zeta_continuation(const RealPoincare& phi, double w, cplx s, const GrowthConstants& g,
                                    const ZetaOptions& opt) {
    check_w(w);
    const auto& p = phi.map();
    const int order = zero_order(p, w);
    if (s == cplx(0)) {
        ZetaValue z;
        z.value = 0;
        z.zero_order = order;
        return z;
    }
    const double d = p.degree();
    cplx den = M_PI * (lambda_pow(p.multiplier(), s) - d);
    if (std::abs(den) < 1e-12 * M_PI * d) throw PoleError("partial zeta: pole at " + s_str(s));
    cplx factor = s * sin_pi(s) / den / double(order);
    auto out = scaled(mellin_psi(phi, w, s, g, opt), factor, opt, "partial zeta");
    out.zero_order = order;
    return out;
}

ZetaValue partial_zeta_published(const RealPoincare& phi, double w, cplx s, const GrowthConstants& g,
                                 const ZetaOptions& opt) {
    check_w(w);
    const auto& p = phi.map();
    const int order = zero_order(p, w);
    const double d = p.degree();
    cplx ls = lambda_pow(p.multiplier(), s);
    cplx den = M_PI * (1.0 - d * ls);
    if (std::abs(den) < 1e-12) throw PoleError("published prefactor: pole at " + s_str(s));
    cplx factor = ls * s * sin_pi(s) / den / double(order);
    auto out = scaled(mellin_psi(phi, w, s, g, opt), factor, opt, "partial zeta (published prefactor)");
    out.zero_order = order;
    return out;
}

cplx mellin_log_phi_w(const RealPoincare& phi, double w, cplx s, const GrowthConstants& g, const ZetaOptions& opt) {
    const auto& p = phi.map();
    cplx den = lambda_pow(p.multiplier(), -s) - double(p.degree());
    return mellin_psi(phi, w, -s, g, opt).value / den;
}

ZetaValue partial_zeta_series(const std::vector<double>& mus, double rho, cplx s) {
    if (!(s.real() > rho)) throw DomainError("partial zeta series diverges for Re s <= rho");
    if (mus.size() < 4) throw DomainError("partial zeta series: need at least 4 eigenvalues");
    auto at = [&](std::size_t K) {
        CompensatedSum sum;
        for (std::size_t i = 0; i < K; ++i) sum.add(std::exp(-s * std::log(mus[i])));
        double xc = std::pow(0.5 * (std::pow(mus[K - 1], rho) + std::pow(mus[K], rho)), 1.0 / rho);
        cplx tail = double(K) * rho * std::exp(-s * std::log(xc)) / (s - rho);
        return std::pair<cplx, cplx>(sum.value() + tail, tail);
    };
    const std::size_t K = mus.size() - 1;
    auto [v, tail] = at(K);
    auto [v2, tail2] = at(K / 2);
    (void)tail2;
    ZetaValue out;
    out.value = v;
    out.tail_bound = std::abs(tail);
    out.error = std::abs(v - v2);
    return out;
}

GrowthCheck verify_growth_constants(const RealPoincare& phi, const GrowthConstants& g, double x1, int samples) {
    GrowthCheck c;
    c.min_lower = c.min_upper = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= samples; ++i) {
        double x = g.x0 + (x1 - g.x0) * i / samples;
        double q = phi.log_eval(x).log_abs / std::pow(x, phi.rho());
        c.min_lower = std::min(c.min_lower, q - g.C1);
        c.min_upper = std::min(c.min_upper, g.C2 - q);
    }
    c.ok = c.min_lower >= 0 && c.min_upper >= 0;
    return c;
}

GrowthConstants fit_growth_constants(const RealPoincare& phi, double x0) {
    GrowthConstants g;
    g.x0 = x0;
    double lo = std::numeric_limits<double>::infinity(), hi = 0;
    const double lam = phi.map().multiplier();
    for (int i = 0; i <= 400; ++i) {
        double x = x0 * std::pow(lam, i / 400.0);
        double q = phi.log_eval(x).log_abs / std::pow(x, phi.rho());
        lo = std::min(lo, q);
        hi = std::max(hi, q);
    }
    g.C1 = 0.99 * lo;
    g.C2 = 1.01 * hi;
    return g;
}

std::vector<Pole> pole_catalogue(const SpectralSystem& sys, int kmax) {
    std::vector<Pole> out;
    const double ll = std::log(sys.lambda());
    auto add_line = [&](double re, const std::string& kind) {
        for (int k = -kmax; k <= kmax; ++k) out.push_back({cplx(re, 2 * M_PI * k / ll), kind});
    };
    add_line(std::log(double(sys.p.degree())) / ll, "partial zeta (lambda^s = d)");
    std::vector<double> seen;
    for (auto& R : sys.R) {
        if (R.den.size() < 2) continue;
        std::vector<cplx> a;
        for (auto& c : R.den) a.push_back(static_cast<double>(c));
        for (cplx z : poly_roots(a)) {
            if (std::abs(z.imag()) > 1e-12 || z.real() <= 0) continue;
            double re = -std::log(z.real()) / ll;
            bool dup = false;
            for (double r : seen) dup = dup || std::abs(r - re) < 1e-12;
            if (dup) continue;
            seen.push_back(re);
            add_line(re, "multiplicity generating function");
        }
    }
    return out;
}

ZetaAssembly assemble_zeta(const SpectralSystem& sys, cplx s, const ZetaOptions& opt, double series_cutoff) {
    ZetaAssembly out;
    for (auto& pole : pole_catalogue(sys, 3))
        if (std::abs(s - pole.s) < 1e-6) {
            std::ostringstream os;
            os.precision(12);
            os << "s is within 1e-6 of a pole (" << pole.kind << ") at " << pole.s.real() << " + " << pole.s.imag()
               << "i";
            out.warnings.push_back(os.str());
        }
    const cplx z = lambda_pow(sys.lambda(), -s);
    out.branch = s.real() < 1 ? "continuation" : "series";
    CompensatedSum sum;
    for (std::size_t i = 0; i < sys.A.size(); ++i) {
        cplx pref = sys.R[i].eval(z);
        if (!std::isfinite(std::abs(pref))) throw PoleError("assembly: multiplicity prefactor has a pole at " + s_str(s));
        ZetaValue zv;
        if (out.branch == "continuation") {
            zv = partial_zeta_continuation(sys.phi, sys.A[i], s, sys.growth, opt);
        } else {
            auto part = enumerate_partial(sys.phi, sys.A[i], series_cutoff);
            std::vector<double> mus;
            for (auto& r : part.records) mus.push_back(r.mu);
            zv = partial_zeta_series(mus, sys.rho(), s);
        }
        out.prefactors.push_back(pref);
        out.components.push_back(zv);
        sum.add(pref * zv.value);
        out.error += std::abs(pref) * zv.error;
    }
    out.value = sum.value();
    return out;
}

CasimirResult casimir_energy(const SpectralSystem& sys, double tol, Recipe recipe) {
    ZetaOptions opt;
    opt.tol = std::max(tol, 1e-13);
    const cplx s(-0.5, 0.0);
    const double lam = sys.lambda();
    const double d = sys.p.degree();
    CasimirResult out;
    out.recipe = recipe;
    std::vector<double> w;
    if (recipe == Recipe::published) {
        if (sys.name != "sg") throw ConfigError("the published recipe exists only for the built-in sg system");
        const double r5 = std::sqrt(5.0);
        if (sys.bc == Boundary::dirichlet) {
            const double c = 1.0 / (2 * M_PI * (r5 - 2));
            w = {c * r5, c * (155 + 135 * r5) / 88, -c * (245 + 47 * r5) / 124};
        } else {
            const double pref = std::pow(lam, -0.5) * 0.5 / (M_PI * (1 - d * std::pow(lam, -0.5)));
            for (auto& R : sys.R) w.push_back(R.eval(std::sqrt(lam)) * pref);
        }
    } else {
        const double pref = 0.5 / (M_PI * (std::pow(lam, -0.5) - d));
        for (std::size_t i = 0; i < sys.A.size(); ++i)
            w.push_back(sys.R[i].eval(std::sqrt(lam)) * pref / zero_order(sys.p, sys.A[i]));
    }
    CompensatedSum sum;
    for (std::size_t i = 0; i < sys.A.size(); ++i) {
        auto J = mellin_psi(sys.phi, sys.A[i], s, sys.growth, opt);
        out.integrals.push_back(J.value.real());
        sum.add(w[i] * J.value.real());
        out.error += 0.5 * std::abs(w[i]) * J.error;
    }
    out.weights = w;
    out.zeta = sum.value().real();
    out.energy = 0.5 * out.zeta;
    if (out.error > tol) {
        std::ostringstream os;
        os << "casimir: error bound " << out.error << " above tolerance " << tol;
        throw AccuracyError(os.str(), out.error);
    }
    return out;
}

namespace {

// Largest observed x^{-a} N(x) over the list, times 1.1.
double density_constant(const EigenvalueList& eigs, double a, int zero_modes) {
    double A = 0;
    std::int64_t n = zero_modes;
    for (auto& r : eigs.records) {
        n += r.multiplicity;
        A = std::max(A, double(n) / std::pow(r.mu, a));
    }
    return 1.1 * A;
}

}  // namespace

ThermalResult thermal_energy(const SpectralSystem& sys, double beta, double cutoff, double casimir) {
    if (!(beta > 0)) throw DomainError("thermal_energy: beta must be positive");
    auto eigs = enumerate_spectrum(sys, cutoff);
    ThermalResult out;
    out.casimir = casimir;
    CompensatedSum sum;
    for (auto& r : eigs.records) {
        double u = std::sqrt(r.mu);
        sum.add(double(r.multiplicity) * u / std::expm1(beta * u));
    }
    out.bose_sum = sum.value().real();
    const double a = 0.5 * sys.spectral_dim();
    const double A = density_constant(eigs, a, 0);
    auto minus_fprime = [&](double x) {
        double u = std::sqrt(x), bu = beta * u;
        if (bu > 700) return 0.0;
        double E = std::expm1(bu);
        double dfdu = 1.0 / E - bu * (E + 1) / (E * E);
        return -dfdu / (2 * u);
    };
    auto integrand = [&](double x) { return A * std::pow(x, a) * minus_fprime(x); };
    double err = 0;
    out.tail_bound = gauss_kronrod<double, 31>::integrate(integrand, cutoff, std::numeric_limits<double>::infinity(),
                                                          15, 1e-10, &err) +
                     err;
    out.energy = out.casimir + out.bose_sum;
    return out;
}

HeatTraceValue heat_trace(const EigenvalueList& eigs, double t, double d_S, int zero_modes, double rel_tol) {
    if (!(t > 0)) throw DomainError("heat_trace: t must be positive");
    CompensatedSum sum;
    sum.add(double(zero_modes));
    for (auto& r : eigs.records) sum.add(double(r.multiplicity) * std::exp(-r.mu * t));
    HeatTraceValue out;
    out.K = sum.value().real();
    const double a = 0.5 * d_S;
    const double A = density_constant(eigs, a, zero_modes);
    auto bound = [&](double X) { return A * std::pow(t, -a) * boost::math::tgamma(a + 1, t * X); };
    out.tail_bound = bound(eigs.cutoff);
    if (out.tail_bound > rel_tol * out.K) {
        double X = eigs.cutoff;
        while (bound(X) > rel_tol * out.K && X < 1e300) X *= 1.5;
        std::ostringstream os;
        os.precision(6);
        os << "heat_trace: tail bound " << out.tail_bound << " at t = " << t << "; cutoff needs to reach about " << X;
        throw AccuracyError(os.str(), out.tail_bound);
    }
    return out;
}

}  // namespace fracspec

namespace fracspec {

HeatTraceCurve heat_trace_curve(const SpectralSystem& sys, double t_min, double t_max, int points, double X) {
    if (!(t_min > 0 && t_max > t_min) || points < 2) throw DomainError("heat_trace_curve: need 0 < t_min < t_max, points >= 2");
    auto eigs = enumerate_spectrum(sys, X);
    const double dS = sys.spectral_dim();
    const double lam = sys.lambda();
    auto g = [&](double t, double* tail) {
        auto h = heat_trace(eigs, t, dS, sys.zero_modes);
        if (tail) *tail = std::max(*tail, h.tail_bound);
        return std::pow(t, dS / 2) * h.K;
    };
    HeatTraceCurve c;
    c.eigen_records = eigs.records.size();
    double gmax = 0;
    for (int i = 0; i < points; ++i) {
        double t = t_min * std::pow(t_max / t_min, double(i) / (points - 1));
        double v = g(t, &c.max_tail);
        c.t.push_back(t);
        c.scaled.push_back(v);
        c.K.push_back(v / std::pow(t, dS / 2));
        gmax = std::max(gmax, std::abs(v));
    }
    for (std::size_t i = 0; i < c.t.size(); ++i) {
        if (c.t[i] * lam > t_max * (1 + 1e-12)) break;
        c.defect = std::max(c.defect, std::abs(g(c.t[i] * lam, &c.max_tail) - c.scaled[i]));
    }
    c.defect /= gmax;
    return c;
}

}  // namespace fracspec
