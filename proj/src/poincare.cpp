#include "fracspec/poincare.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "fracspec/rng.hpp"

namespace fracspec {

std::vector<cplx> poly_roots(std::vector<cplx> a) {
    while (a.size() > 1 && a.back() == cplx(0)) a.pop_back();
    const int d = static_cast<int>(a.size()) - 1;
    if (d < 1) throw DomainError("poly_roots: constant polynomial");
    auto eval = [&](cplx x) {
        cplx acc = a[d];
        for (int i = d - 1; i >= 0; --i) acc = acc * x + a[i];
        return acc;
    };
    auto deval = [&](cplx x) {
        cplx acc = a[d] * double(d);
        for (int i = d - 1; i >= 1; --i) acc = acc * x + a[i] * double(i);
        return acc;
    };
    std::vector<cplx> roots;
    if (d == 1) {
        roots = {-a[0] / a[1]};
    } else if (d == 2) {
        cplx disc = std::sqrt(a[1] * a[1] - 4.0 * a[2] * a[0]);
        cplx q = -0.5 * (a[1] + (std::real(std::conj(a[1]) * disc) >= 0 ? disc : -disc));
        if (q == cplx(0))
            roots = {cplx(0), cplx(0)};
        else
            roots = {q / a[2], a[0] / q};
    } else {
        Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(d, d);
        for (int i = 0; i < d; ++i) comp(0, i) = -a[d - 1 - i] / a[d];
        for (int i = 1; i < d; ++i) comp(i, i - 1) = 1.0;
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
        if (es.info() != Eigen::Success) throw NumericError("poly_roots: eigen solver failed");
        for (int i = 0; i < d; ++i) roots.push_back(es.eigenvalues()(i));
    }
    for (auto& r : roots) {
        for (int it = 0; it < 6; ++it) {
            cplx f = eval(r);
            cplx fp = deval(r);
            if (std::abs(fp) < 1e-300 || f == cplx(0)) break;
            cplx cand = r - f / fp;
            // Near a multiple root Newton can wander; accept only improving steps.
            if (std::abs(eval(cand)) < std::abs(f)) r = cand; else break;
        }
    }
    return roots;
}

std::vector<double> real_roots(const std::vector<double>& coeffs, double im_tol) {
    std::vector<cplx> a(coeffs.begin(), coeffs.end());
    double scale = 0;
    for (double c : coeffs) scale = std::max(scale, std::abs(c));
    std::vector<double> out;
    for (cplx r : poly_roots(a))
        if (std::abs(r.imag()) <= im_tol * std::max(1.0, std::abs(r))) out.push_back(r.real());
    std::sort(out.begin(), out.end());
    return out;
}

PolynomialMap<double> sg_map() { return PolynomialMap<double>({0.0, 5.0, 1.0}); }
PolynomialMap<double> chebyshev_map() { return PolynomialMap<double>({0.0, 4.0, 1.0}); }

GrowthProfile growth_profile(const RealPoincare& f, double theta, double t0, double t1, int per_period) {
    if (!(t1 > t0) || per_period < 1) throw DomainError("growth_profile: empty t range");
    const double lam = std::abs(f.map().multiplier());
    GrowthProfile out;
    const int n = static_cast<int>(std::floor((t1 - t0) * per_period + 1e-9)) + 1;
    for (int i = 0; i < n; ++i) {
        double t = t0 + double(i) / per_period;
        double r = std::pow(lam, t);
        double la;
        if (theta == 0.0) {
            la = f.log_eval(r).log_abs;
        } else {
            la = f.log_eval(std::polar(r, theta)).log_abs;
        }
        out.samples.push_back({t, la / std::pow(r, f.rho())});
    }
    out.q_min = out.q_max = out.samples.front().q;
    for (auto& s : out.samples) {
        out.q_min = std::min(out.q_min, s.q);
        out.q_max = std::max(out.q_max, s.q);
    }
    for (int i = 0; i + per_period < n; ++i)
        out.periodicity_defect =
            std::max(out.periodicity_defect, std::abs(out.samples[i + per_period].q - out.samples[i].q));
    return out;
}

template <class Scalar>
SpiralResult spiral_limit(const PolynomialMap<Scalar>& p, cplx z0, cplx f_z0, int max_advance) {
    if (std::abs(p.leading() - Scalar(1)) > 0)
        throw DomainError("spiral_limit: the bracket needs a monic polynomial");
    const int m = p.degree();
    const double K = p.K();
    const double rho = std::log(double(m)) / std::log(std::abs(p.multiplier()));
    SpiralResult res;
    res.threshold = std::max(std::exp(1.0), 2.0 * m * K);
    res.phi_z0 = std::log(std::abs(f_z0));
    if (!(std::abs(z0) > 0)) throw DomainError("spiral_limit: z0 must be nonzero");

    cplx z = z0, fz = f_z0;
    int adv = 0;
    while (!(std::abs(fz) > res.threshold)) {
        if (adv == max_advance)
            throw DomainError("spiral_limit: |Phi(z)| > max(e, 2mK) = " + std::to_string(res.threshold) +
                              " not reached within " + std::to_string(max_advance) + " steps from z0");
        fz = p(fz);
        z *= cplx(p.multiplier());
        ++adv;
        if (!std::isfinite(std::abs(fz))) throw OverflowError("spiral_limit: overflow while advancing");
    }
    res.advance = adv;
    res.z_used = z;
    const double absz_rho = std::pow(std::abs(z), rho);
    const double phi = std::log(std::abs(fz));
    const double slack = 3.0 * K * m / (2.0 * std::abs(fz));
    res.bracket_lo = (phi - slack) / absz_rho;
    res.bracket_hi = (phi + slack) / absz_rho;

    using R = std::common_type_t<Scalar, cplx>;
    LogValue<R> v;
    v.log_abs = phi;
    v.phase = R(fz) / std::abs(fz);
    double prev = phi / absz_rho;
    double scale = absz_rho;
    for (int n = 1; n <= 200; ++n) {
        // p in the log channel, valid because |f| stays above the threshold.
        const auto& a = p.coeffs();
        R t = R(std::exp(-v.log_abs)) / v.phase;
        R corr(1), tp(1);
        for (int i = m - 1; i >= 0; --i) {
            tp *= t;
            corr += R(a[i]) * tp;
        }
        R ph(1);
        for (int i = 0; i < m; ++i) ph *= v.phase;
        ph *= corr / std::abs(corr);
        v.log_abs = m * v.log_abs + std::log(std::abs(corr));
        v.phase = ph / std::abs(ph);
        scale *= m;
        double cur = v.log_abs / scale;
        res.iterations = n;
        res.last_difference = std::abs(cur - prev);
        prev = cur;
        if (res.last_difference < 1e-10 && n >= 3) break;
    }
    res.L = prev;
    res.bracket_holds = res.bracket_lo < res.L && res.L < res.bracket_hi;
    const double z0_rho = std::pow(std::abs(z0), rho);
    res.loose_lo_z0 = (res.phi_z0 - 0.75) / z0_rho;
    res.loose_hi_z0 = (res.phi_z0 + 0.75) / z0_rho;
    res.loose_bracket_holds_z0 = res.loose_lo_z0 < res.L && res.L < res.loose_hi_z0;
    return res;
}

template SpiralResult spiral_limit<double>(const PolynomialMap<double>&, cplx, cplx, int);
template SpiralResult spiral_limit<cplx>(const PolynomialMap<cplx>&, cplx, cplx, int);

bool julia_real_quadratic(double a, double omega) {
    if (omega == 0.0) throw DomainError("julia_real_quadratic: omega = 0 is degenerate");
    if (a == 0.0) throw DomainError("julia_real_quadratic: a = 0 is not quadratic");
    // a z (z - w) is affinely conjugate to u^2 + c with c = -t^2/4 - t/2, t = a w;
    // the Julia set is real iff c <= -2.
    const double t = a * omega;
    return t >= 2.0 || t <= -4.0;
}

namespace {

cplx peval(const std::vector<double>& c, cplx x) {
    cplx acc = c.back();
    for (int i = static_cast<int>(c.size()) - 2; i >= 0; --i) acc = acc * x + c[i];
    return acc;
}

cplx pderiv(const std::vector<double>& c, cplx x) {
    const int d = static_cast<int>(c.size()) - 1;
    cplx acc = c[d] * double(d);
    for (int i = d - 1; i >= 1; --i) acc = acc * x + c[i] * double(i);
    return acc;
}

std::vector<cplx> preimages(const std::vector<double>& c, cplx y) {
    std::vector<cplx> a(c.begin(), c.end());
    a[0] -= y;
    return poly_roots(std::move(a));
}

}  // namespace

JuliaReport julia_sample_and_multipliers(const std::vector<double>& coeffs_in, int depth, int samples,
                                         std::uint64_t seed) {
    std::vector<double> c = coeffs_in;
    while (c.size() > 1 && c.back() == 0.0) c.pop_back();
    const int d = static_cast<int>(c.size()) - 1;
    if (d < 2) throw DomainError("julia_sample_and_multipliers: degree must be >= 2");
    if (depth < 1 || samples < 1) throw DomainError("julia_sample_and_multipliers: depth and samples must be positive");

    std::vector<double> fixc = c;
    fixc[1] -= 1.0;
    std::vector<cplx> fixed = poly_roots(std::vector<cplx>(fixc.begin(), fixc.end()));

    cplx start(1.0, 0.0);
    double best = 1.0;
    for (cplx xi : fixed) {
        double m = std::abs(pderiv(c, xi));
        if (m > best) { best = m; start = xi; }
    }
    if (std::abs(start.imag()) < 1e-12) start = start.real();

    JuliaReport rep;
    rep.samples.resize(samples);
    std::vector<double> resid(samples, 0.0);
    for (int s = 0; s < samples; ++s) {
        auto gen = stream_engine(seed, static_cast<std::uint64_t>(s));
        std::uniform_int_distribution<int> pick(0, d - 1);
        cplx y = start;
        double r = 0;
        for (int k = 0; k < depth; ++k) {
            auto pre = preimages(c, y);
            // Real inputs with real preimages stay exactly real.
            if (y.imag() == 0.0)
                for (auto& x : pre)
                    if (std::abs(x.imag()) <= 1e-14 * std::max(1.0, std::abs(x))) x = x.real();
            cplx x = pre[pick(gen)];
            if (!std::isfinite(std::abs(x)))
                throw NumericError("julia: preimage computation failed at (" + std::to_string(y.real()) + ", " +
                                   std::to_string(y.imag()) + ")");
            r = std::max(r, std::abs(peval(c, x) - y) / std::max(1.0, std::abs(y)));
            y = x;
        }
        rep.samples[s] = y;
        resid[s] = r;
    }
    rep.max_backward_residual = *std::max_element(resid.begin(), resid.end());

    double lo = rep.samples[0].real(), hi = lo, amax = 0;
    for (cplx z : rep.samples) {
        lo = std::min(lo, z.real());
        hi = std::max(hi, z.real());
        rep.max_abs_imag = std::max(rep.max_abs_imag, std::abs(z.imag()));
        amax = std::max(amax, std::abs(z));
    }
    rep.scale = std::max(1.0, amax);
    rep.real = rep.max_abs_imag < 1e-9 * rep.scale;
    rep.min_J = lo;
    rep.max_J = hi;
    if (!rep.real) return rep;

    // Snap the sampled hull to exact candidates: real fixed points and their real preimages.
    std::vector<double> fixed_real;
    for (cplx xi : fixed)
        if (std::abs(xi.imag()) < 1e-9 * std::max(1.0, std::abs(xi))) fixed_real.push_back(xi.real());
    std::vector<double> cand = fixed_real;
    for (double xi : fixed_real)
        for (cplx x : preimages(c, xi))
            if (std::abs(x.imag()) < 1e-9 * std::max(1.0, std::abs(x))) cand.push_back(x.real());
    auto snap = [&](double v) {
        double bestv = v, bestd = 1e-3 * rep.scale;
        for (double x : cand)
            if (std::abs(x - v) < bestd) { bestd = std::abs(x - v); bestv = x; }
        return bestv;
    };
    rep.min_J = snap(lo);
    rep.max_J = snap(hi);

    const double m = d;
    auto add = [&](double xi, const std::string& role, double bound) {
        MultiplierEntry e;
        e.xi = xi;
        e.abs_derivative = std::abs(pderiv(c, xi));
        e.role = role;
        e.bound = bound;
        e.equality = std::abs(e.abs_derivative - bound) <= 1e-9 * bound;
        e.satisfied = e.abs_derivative >= bound * (1 - 1e-12);
        rep.chebyshev_equality = rep.chebyshev_equality || e.equality;
        rep.multipliers.push_back(e);
    };
    add(rep.max_J, "max", m * m);
    add(rep.min_J, "min", m * m);
    std::sort(fixed_real.begin(), fixed_real.end());
    const double tol = 1e-9 * rep.scale;
    for (double xi : fixed_real)
        if (xi > rep.min_J + tol && xi < rep.max_J - tol) add(xi, "interior", m);
    return rep;
}

double harmonic_ball_measure(const JuliaReport& r, double t) {
    if (r.samples.empty()) return 0.0;
    std::size_t k = 0;
    for (cplx z : r.samples)
        if (std::abs(z) <= t) ++k;
    return double(k) / double(r.samples.size());
}

}  // namespace fracspec
