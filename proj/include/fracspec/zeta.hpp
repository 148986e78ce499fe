#pragma once

#include <string>
#include <vector>

#include "fracspec/decimation.hpp"

namespace fracspec {

struct ZetaOptions {
    double tol = 1e-10;        // absolute target, relative once |value| > 1
    double panel_tol = 1e-12;  // Gauss-Kronrod relative tolerance per panel
    int max_depth = 12;
};

struct ZetaValue {
    cplx value;
    double error = 0;       // quadrature estimate + analytic tails, already scaled
    double tail_bound = 0;  // analytic part of `error`
    int panels = 0;
    int zero_order = 1;
};

// log Psi_w(0) = -(log a_d + (d-1) log(-w)).
double log_psi_zero(const PolynomialMap<double>& p, double w);

// log Psi_w(x) = log((p(Phi) - w) / (a_d (Phi - w)^d)), x >= 0.
double log_psi(const RealPoincare& phi, double w, double x);

// log Psi_w(x) - log Psi_w(0) without cancellation for small x.
double log_psi_delta(const RealPoincare& phi, double w, double x);

// Common order of the zeros of Phi - w (> 1 only when w is a critical value of p).
int zero_order(const PolynomialMap<double>& p, double w);

// J(s) = int_0^inf log Psi_w(x) x^{-s-1} dx, continued to Re s < 1 (pole at s = 0).
ZetaValue mellin_psi(const RealPoincare& phi, double w, cplx s, const GrowthConstants& g,
                     const ZetaOptions& opt = {});

// zeta_{Phi,w}(s) = s sin(pi s) / (pi (lambda^s - d)) * J(s) / zero_order, Re s < 1.
ZetaValue partial_zeta_continuation(const RealPoincare& phi, double w, cplx s, const GrowthConstants& g,
                                    const ZetaOptions& opt = {});

// Same integral with the prefactor lambda^s s sin(pi s) / (pi (1 - d lambda^s)) as printed
// alongside the published Casimir values; kept only to reproduce them.
ZetaValue partial_zeta_published(const RealPoincare& phi, double w, cplx s, const GrowthConstants& g,
                                 const ZetaOptions& opt = {});

// M_w(s) = int_0^inf log Phi_w(x) x^{s-1} dx, continued via J.
cplx mellin_log_phi_w(const RealPoincare& phi, double w, cplx s, const GrowthConstants& g,
                      const ZetaOptions& opt = {});

// Dirichlet sum over distinct mu (ascending, complete below the list cutoff), Re s > rho.
// Tail from the density x^rho, cutoff midway (in x^rho) between the last two values.
ZetaValue partial_zeta_series(const std::vector<double>& mus, double rho, cplx s);

struct GrowthCheck {
    bool ok = false;
    double min_lower = 0;  // min over samples of log Phi(x) / x^rho - C1
    double min_upper = 0;  // min over samples of C2 - log Phi(x) / x^rho
};

// Checks exp(C1 x^rho) <= Phi(x) <= exp(C2 x^rho) on [x0, x1].
GrowthCheck verify_growth_constants(const RealPoincare& phi, const GrowthConstants& g, double x1, int samples = 400);

// Lower constant sampled on [x0, lambda x0] (extends to x >= x0 when p(y) >= a_d y^d, y >= 0).
GrowthConstants fit_growth_constants(const RealPoincare& phi, double x0 = 10.0);

struct Pole {
    cplx s;
    std::string kind;
};

std::vector<Pole> pole_catalogue(const SpectralSystem& sys, int kmax = 2);

struct ZetaAssembly {
    cplx value;
    double error = 0;
    std::string branch;  // "continuation" or "series"
    std::vector<cplx> prefactors;
    std::vector<ZetaValue> components;
    std::vector<std::string> warnings;
};

// sum_w R_w(lambda^{-s}) zeta_{Phi,w}(s); the series branch enumerates below series_cutoff.
ZetaAssembly assemble_zeta(const SpectralSystem& sys, cplx s, const ZetaOptions& opt = {},
                           double series_cutoff = 1e6);

enum class Recipe { corrected, published };

struct CasimirResult {
    double energy = 0;
    double zeta = 0;
    double error = 0;
    Recipe recipe = Recipe::corrected;
    std::vector<double> integrals;  // J_w(-1/2) per w
    std::vector<double> weights;    // multiplies J_w in zeta(-1/2)
};

CasimirResult casimir_energy(const SpectralSystem& sys, double tol = 1e-10, Recipe recipe = Recipe::corrected);

struct ThermalResult {
    double energy = 0;
    double casimir = 0;
    double bose_sum = 0;
    double tail_bound = 0;
};

ThermalResult thermal_energy(const SpectralSystem& sys, double beta, double cutoff, double casimir);

struct HeatTraceValue {
    double K = 0;
    double tail_bound = 0;
};

// sum of multiplicity * exp(-lambda t) over the list plus zero modes; the tail uses
// N(x) <= A x^{d_S/2} with A the largest observed x^{-d_S/2} N(x) times 1.1.
HeatTraceValue heat_trace(const EigenvalueList& eigs, double t, double d_S, int zero_modes = 0,
                          double rel_tol = 1e-12);

struct HeatTraceCurve {
    std::vector<double> t, K, scaled;  // scaled = t^{d_S/2} K(t)
    double defect = 0;                  // max |g(lambda t) - g(t)| / max |g| for t, lambda t in range
    double max_tail = 0;
    std::size_t eigen_records = 0;
};

// Log-spaced t in [t_min, t_max]; eigenvalues enumerated below X.
HeatTraceCurve heat_trace_curve(const SpectralSystem& sys, double t_min, double t_max, int points, double X);

}  // namespace fracspec
