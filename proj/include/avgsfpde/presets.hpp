#pragma once

// Named models: operator, coefficients, initial datum and run defaults.

#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "avgsfpde/coefficients.hpp"
#include "avgsfpde/errors.hpp"
#include "avgsfpde/history.hpp"
#include "avgsfpde/integrator.hpp"
#include "avgsfpde/spectral.hpp"

namespace avgsfpde {

struct Preset {
    std::string name;
    std::string summary;
    /// Hidden from the plain listing; used by tests and diagnostics.
    bool diagnostic = false;
    PdeOperator op;
    CoefficientSet cs;
    HistoryBuffer initial;
    /// Direction of initial-data perturbations, same tail shape, unit seminorm.
    std::vector<double> perturbation;
    StepperConfig stepper;
    std::vector<double> eps_grid;
    std::vector<double> d_grid;
    std::vector<double> delta_grid;
    std::size_t paths = 32;
    /// Log-log slope in eps backed by a closed-form oracle, when one exists.
    std::optional<double> eps_slope;

    const SpectralSpace& space() const noexcept { return initial.space(); }
    double h() const noexcept { return initial.h(); }

    /// phi + delta * perturbation.
    HistoryBuffer perturbed(double delta) const {
        auto profile = initial.profile();
        for (std::size_t i = 0; i < profile.size(); ++i) profile[i] += delta * perturbation[i];
        return HistoryBuffer(initial.space(), initial.h(), initial.tail(), profile, initial.horizon());
    }
};

struct PresetOptions {
    /// Galerkin dimension override for field presets (grid m = 2k).
    std::optional<std::size_t> modes;
};

namespace detail {

inline std::vector<double> unit_perturbation(const SpectralSpace& space, double h, const TailProfile& tail) {
    std::vector<double> psi(space.dim(), 0.0);
    psi[0] = 1.0;
    const HistoryBuffer probe(space, h, tail, psi);
    const double sn = seminorm_h(probe, 0.0);
    for (double& c : psi) c /= sn;
    return psi;
}

inline Preset finish(Preset p) {
    p.perturbation = unit_perturbation(p.space(), p.h(), p.initial.tail());
    p.cs.profile.validate(p.h());
    check_operator_space(p.op, p.space());
    return p;
}

inline Preset reaction_diffusion(const PresetOptions& opt, bool oscillating) {
    const std::size_t k = opt.modes.value_or(oscillating ? 32 : 16);
    const double h = 1.0;
    const auto space = SpectralSpace::interval(1.0, k, 2 * k);
    const auto mu = DelayMeasure::exponential(h);
    CoefficientSet cs;
    cs.drift.terms = {PointwiseTerm{ScalarMap::cos_sqrt_abs()}, DelayTerm{ScalarMap::sqrt_abs(), mu}};
    cs.drift_oscillator = oscillating ? Oscillator::sinusoid(1.0, 1.0, 1.0) : Oscillator::constant(1.0);
    std::vector<double> sigma(k);
    for (std::size_t i = 0; i < k; ++i) sigma[i] = 0.5 / static_cast<double>(i + 1);
    cs.diffusion.form = AdditiveNoise{sigma};
    auto& p = cs.profile;
    p.alpha1 = 2.0;
    p.alpha2 = 4.0;
    p.M = 4.0;
    p.L_M = 5.0;
    p.beta = 1.0;
    p.gamma = 0.5;
    p.p = 2.0;
    p.mu1 = mu;
    p.mu2 = mu;
    p.coercivity = {0.5, 0.0, 0.15};
    p.monotone_alpha = 0.0;
    std::vector<double> psi(k, 0.0);
    psi[0] = 0.5;
    Preset out{oscillating ? "reaction-diffusion-delay" : "degenerate-constant",
               oscillating ? "Delta u - u|u| + xi1(t/eps)[cos sqrt|u(t)| + int sqrt|u(t+theta)| mu(dtheta)], "
                             "additive noise sigma_i = 0.5/i"
                           : "reaction-diffusion-delay with xi1 == 1: fast and averaged systems coincide",
               !oscillating,
               PdeOperator::reaction_diffusion(3.0),
               std::move(cs),
               HistoryBuffer(space, h, TailProfile::exponential(h), psi),
               {},
               {},
               {0.5, 0.1, 0.02},
               {0.2, 0.1, 0.05, 0.025},
               {1e-1, 1e-2, 1e-3},
               64,
               std::nullopt};
    out.stepper.dt = 1e-3;
    out.stepper.T = 1.0;
    out.stepper.eps = 0.1;
    if (!oscillating) out.paths = 32;
    return finish(std::move(out));
}

inline Preset porous_media_sin(const PresetOptions& opt) {
    const std::size_t k = opt.modes.value_or(8);
    const auto space = SpectralSpace::interval(1.0, k, 2 * k);
    CoefficientSet cs;
    cs.drift.terms = {PointwiseTerm{ScalarMap::sin_sqrt_abs()}};
    cs.drift_oscillator = Oscillator::sinusoid(1.0, 1.0, 1.0);
    cs.diffusion.form = MultiplicativeNoise{FieldFunctional{{PointwiseTerm{ScalarMap::cos_sqrt_abs(0.5)}}}};
    auto& p = cs.profile;
    p.alpha1 = 1.0;
    p.alpha2 = 2.0;
    p.M = 2.0;
    p.L_M = 2.0;
    p.beta = 1.0;
    p.gamma = 0.5;
    p.p = 3.0;
    p.coercivity = {0.9, 0.0, 0.05};
    p.monotone_alpha = 0.0;
    std::vector<double> psi(k, 0.0);
    psi[0] = 0.5;
    Preset out{"porous-media-sin",
               "Delta(|u|u + u) + xi1(t/eps) sin sqrt|u| + 0.5 cos sqrt|u| dW, scalar Wiener process",
               false,
               PdeOperator::porous_media(3.0),
               std::move(cs),
               HistoryBuffer::constant(space, 1.0, psi),
               {},
               {},
               {0.5, 0.1, 0.02},
               {0.2, 0.1, 0.05, 0.025},
               {1e-1, 1e-2, 1e-3},
               32,
               std::nullopt};
    out.stepper.dt = 2e-4;
    out.stepper.T = 1.0;
    out.stepper.eps = 0.1;
    return finish(std::move(out));
}

inline AssumptionProfile scalar_profile() {
    AssumptionProfile p;
    p.alpha1 = 1.0;
    p.alpha2 = 2.0;
    p.M = 2.0;
    p.L_M = 2.0;
    p.beta = 1.0;
    p.gamma = 0.5;
    p.p = 2.0;
    p.coercivity = {1.0, 0.0, 0.0};
    p.monotone_alpha = 0.0;
    return p;
}

inline Preset scalar(std::string name, std::string summary, bool diagnostic, CoefficientSet cs, double phi0,
                     double dt) {
    cs.profile = scalar_profile();
    Preset out{std::move(name),
               std::move(summary),
               diagnostic,
               PdeOperator::scalar_linear(1.0),
               std::move(cs),
               HistoryBuffer::constant_scalar(1.0, phi0),
               {},
               {},
               {0.1, 0.01, 0.001},
               {0.2, 0.1, 0.05, 0.025},
               {1e-1, 1e-2, 1e-3},
               256,
               std::nullopt};
    out.stepper.dt = dt;
    out.stepper.T = 1.0;
    out.stepper.eps = 0.1;
    return out;
}

inline Preset scalar_linear_osc() {
    CoefficientSet cs;
    cs.drift.terms = {PointwiseTerm{ScalarMap::one()}};
    cs.drift_oscillator = Oscillator::sinusoid(0.0, 1.0, 1.0);
    cs.diffusion.form = AdditiveNoise{{1.0}};
    auto p = scalar("scalar-linear-osc", "du = (-u + sin(t/eps)) dt + dW, u(theta) = 0", false, std::move(cs), 0.0,
                    1e-4);
    p.eps_slope = 2.0;
    return finish(std::move(p));
}

inline Preset scalar_holder_osc() {
    CoefficientSet cs;
    cs.drift.terms = {PointwiseTerm{ScalarMap::sin_sqrt_abs()}};
    cs.drift_oscillator = Oscillator::sinusoid(1.0, 1.0, 1.0);
    cs.diffusion.form = MultiplicativeNoise{FieldFunctional{{PointwiseTerm{ScalarMap::cos_sqrt_abs(0.5)}}}};
    return finish(scalar("scalar-holder-osc",
                         "du = (-u + (1 + sin(t/eps)) sin sqrt|u|) dt + 0.5 cos sqrt|u| dW, u(theta) = 1", false,
                         std::move(cs), 1.0, 1e-3));
}

inline Preset ou_scalar() {
    CoefficientSet cs;
    cs.diffusion.form = AdditiveNoise{{1.0}};
    auto p = scalar("ou-scalar", "du = -u dt + dW, u(theta) = 0", true, std::move(cs), 0.0, 1e-3);
    p.eps_grid = {0.1, 0.01, 0.001};
    return finish(std::move(p));
}

inline Preset broken_quadratic() {
    CoefficientSet cs;
    cs.drift.terms = {SeminormSquaredTerm{1.0}};
    cs.diffusion.form = AdditiveNoise{{0.0}};
    auto p = scalar("broken-quadratic", "du = (-u + |u_t|_h^2) dt: violates linear growth", true, std::move(cs), 0.5,
                    1e-3);
    p.cs.profile.alpha1 = 1.0;
    p.cs.profile.M = 1.0;
    return finish(std::move(p));
}

inline Preset heat_decay() {
    const auto space = SpectralSpace::interval(4.0, 4, 8);
    CoefficientSet cs;
    cs.diffusion.form = AdditiveNoise{};
    cs.profile = scalar_profile();
    Preset out{"heat-decay",
               "du = Laplace u dt on (0, 4), u(0) = e_1, no noise",
               true,
               PdeOperator::pure_laplacian(),
               std::move(cs),
               HistoryBuffer::constant(space, 1.0, {1.0, 0.0, 0.0, 0.0}),
               {},
               {},
               {0.1, 0.01, 0.001},
               {0.2, 0.1, 0.05},
               {1e-1, 1e-2, 1e-3},
               1,
               std::nullopt};
    out.stepper.dt = 1e-3;
    out.stepper.T = 1.0;
    out.stepper.eps = 0.1;
    return finish(std::move(out));
}

}  // namespace detail

inline const std::vector<std::string>& preset_names(bool include_diagnostics = false) {
    static const std::vector<std::string> shipped{"porous-media-sin", "reaction-diffusion-delay",
                                                  "scalar-linear-osc", "scalar-holder-osc"};
    static const std::vector<std::string> all{"porous-media-sin", "reaction-diffusion-delay", "scalar-linear-osc",
                                              "scalar-holder-osc", "degenerate-constant", "heat-decay",
                                              "ou-scalar", "broken-quadratic"};
    return include_diagnostics ? all : shipped;
}

/// Field presets accept a Galerkin dimension override; scalar ones do not.
inline bool has_variable_dimension(const std::string& name) {
    return name == "porous-media-sin" || name == "reaction-diffusion-delay" || name == "degenerate-constant";
}

inline Preset make_preset(const std::string& name, const PresetOptions& opt = {}) {
    if (opt.modes && *opt.modes == 0) throw ArgumentError("modes must be positive");
    if (name == "porous-media-sin") return detail::porous_media_sin(opt);
    if (name == "reaction-diffusion-delay") return detail::reaction_diffusion(opt, true);
    if (name == "degenerate-constant") return detail::reaction_diffusion(opt, false);
    if (opt.modes) throw ArgumentError(fmt::format("preset '{}' has a fixed dimension", name));
    if (name == "scalar-linear-osc") return detail::scalar_linear_osc();
    if (name == "scalar-holder-osc") return detail::scalar_holder_osc();
    if (name == "ou-scalar") return detail::ou_scalar();
    if (name == "broken-quadratic") return detail::broken_quadratic();
    if (name == "heat-decay") return detail::heat_decay();
    throw ArgumentError(fmt::format("unknown preset '{}'", name));
}

}  // namespace avgsfpde
