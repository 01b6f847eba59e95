#include "nudge/nse_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "nudge/errors.hpp"
#include "nudge/fft.hpp"
#include "nudge/field_ops.hpp"

namespace nudge {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

enum class Axis { X, Y };

// Spectral derivative along one axis; Nyquist modes have no real derivative
// and are dropped.
std::vector<Complex> derivative(const Grid& g, const std::vector<Complex>& coeffs, Axis axis) {
    std::vector<Complex> out(coeffs.size());
    for (int j = 0; j < g.n(); ++j) {
        for (int i = 0; i < g.n(); ++i) {
            const auto o = g.offset(j, i);
            if (g.is_nyquist(i) || g.is_nyquist(j)) {
                continue;
            }
            const double k = axis == Axis::X ? g.physical_wavenumber(i) : g.physical_wavenumber(j);
            out[o] = Complex{0.0, k} * coeffs[o];
        }
    }
    return out;
}

// Physical samples of a field and its four gradient entries.
struct PhysicalGradient {
    std::vector<double> ux, uy;
    std::vector<double> dxux, dyux, dxuy, dyuy;
};

PhysicalGradient sample_with_gradient(const SpectralField& f) {
    const Grid& g = f.grid();
    PhysicalGradient p;
    p.ux = backward_scalar(g, f.x());
    p.uy = backward_scalar(g, f.y());
    p.dxux = backward_scalar(g, derivative(g, f.x(), Axis::X));
    p.dyux = backward_scalar(g, derivative(g, f.x(), Axis::Y));
    p.dxuy = backward_scalar(g, derivative(g, f.y(), Axis::X));
    p.dyuy = backward_scalar(g, derivative(g, f.y(), Axis::Y));
    return p;
}

void divide_helmholtz(SpectralField& f, double alpha, double gamma) {
    const Grid& g = f.grid();
    for (int j = 0; j < g.n(); ++j) {
        const double ky = g.physical_wavenumber(j);
        for (int i = 0; i < g.n(); ++i) {
            const double kx = g.physical_wavenumber(i);
            const double d = alpha + gamma * (kx * kx + ky * ky);
            const auto o = g.offset(j, i);
            f.x()[o] /= d;
            f.y()[o] /= d;
        }
    }
}

SpectralField manufactured_shape(const Grid& grid) {
    SpectralField s(grid);
    s.set_mode(0, 0, 1, Complex{0.5, 0.0});   // cos(2 pi y)
    s.set_mode(1, 1, 0, Complex{0.0, -0.5});  // sin(2 pi x)
    return s;
}

double growth(double t, TimeProfile p) { return p == TimeProfile::Exponential ? std::exp(t) : 1.0 + t; }
double growth_rate(double t, TimeProfile p) { return p == TimeProfile::Exponential ? std::exp(t) : 1.0; }

}  // namespace

void ForcingSpec::validate() const {
    if (kind == ForcingKind::Kolmogorov) {
        if (k_f <= 0) {
            throw ConfigError("kolmogorov forcing needs a positive integer k_f");
        }
        if (ramp < 0.0) {
            throw ConfigError("forcing ramp must be >= 0");
        }
    }
}

void SolverConfig::validate() const {
    if (!(nu > 0.0)) {
        throw ConfigError("nu must be positive");
    }
    if (!(dt > 0.0)) {
        throw ConfigError("dt must be positive");
    }
    forcing.validate();
    if (forcing.kind == ForcingKind::Kolmogorov && forcing.k_f >= dealias_cutoff(grid)) {
        throw ConfigError("k_f=" + std::to_string(forcing.k_f) + " is not resolved on a grid of " +
                          std::to_string(grid.n()));
    }
}

SolverState initial_state(const SpectralField& v0, double t0) {
    return SolverState{v0, v0, t0, 0};
}

double trilinear_skew(const SpectralField& a, const SpectralField& b, const SpectralField& c) {
    require_same_grid(a.grid(), b.grid(), "trilinear_skew");
    require_same_grid(a.grid(), c.grid(), "trilinear_skew");
    const Grid& g = a.grid();
    const auto pa = to_physical(dealias(a));
    const auto pb = sample_with_gradient(dealias(b));
    const auto pc = sample_with_gradient(dealias(c));
    double sum = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        // (a.grad b) . c - (a.grad c) . b
        const double adb_x = pa.x[i] * pb.dxux[i] + pa.y[i] * pb.dyux[i];
        const double adb_y = pa.x[i] * pb.dxuy[i] + pa.y[i] * pb.dyuy[i];
        const double adc_x = pa.x[i] * pc.dxux[i] + pa.y[i] * pc.dyux[i];
        const double adc_y = pa.x[i] * pc.dxuy[i] + pa.y[i] * pc.dyuy[i];
        sum += (adb_x * pc.ux[i] + adb_y * pc.uy[i]) - (adc_x * pb.ux[i] + adc_y * pb.uy[i]);
    }
    return 0.5 * sum * g.area() / static_cast<double>(g.size());
}

SpectralField nonlinear_term(const SpectralField& v_star) {
    const Grid& g = v_star.grid();
    const auto p = sample_with_gradient(dealias(v_star));
    PhysicalField n(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double half_div = 0.5 * (p.dxux[i] + p.dyuy[i]);
        n.x[i] = p.ux[i] * p.dxux[i] + p.uy[i] * p.dyux[i] + half_div * p.ux[i];
        n.y[i] = p.ux[i] * p.dxuy[i] + p.uy[i] * p.dyuy[i] + half_div * p.uy[i];
    }
    return leray_project(dealias(from_physical(n)));
}

SpectralField manufactured_truth(double t, const Grid& grid, TimeProfile profile) {
    SpectralField u = manufactured_shape(grid);
    u *= growth(t, profile);
    return u;
}

SpectralField manufactured_forcing(double t, const SolverConfig& cfg) {
    if (cfg.forcing.kind != ForcingKind::ManufacturedPeriodic) {
        throw ConfigError("manufactured_forcing requires the manufactured-periodic forcing kind");
    }
    const Grid& g = cfg.grid;
    const auto profile = cfg.forcing.profile;
    const double k = kTwoPi / g.length();
    // u_t - nu lap u + P(u.grad u); the pressure gradient is removed by P.
    SpectralField f = manufactured_shape(g);
    f *= growth_rate(t, profile) + cfg.nu * k * k * growth(t, profile);
    f += nonlinear_term(manufactured_truth(t, g, profile));
    return f;
}

SpectralField taylor_green(double t, double nu, double amplitude, const Grid& grid) {
    const double k = kTwoPi / grid.length();
    const double decay = amplitude * std::exp(-2.0 * k * k * nu * t);
    PhysicalField p(grid);
    const double h = grid.spacing();
    for (int j = 0; j < grid.n(); ++j) {
        const double y = j * h;
        for (int i = 0; i < grid.n(); ++i) {
            const double x = i * h;
            const auto o = grid.offset(j, i);
            p.x[o] = -decay * std::cos(k * x) * std::sin(k * y);
            p.y[o] = decay * std::sin(k * x) * std::cos(k * y);
        }
    }
    return from_physical(p);
}

SpectralField forcing(double t, const SolverConfig& cfg) {
    switch (cfg.forcing.kind) {
    case ForcingKind::ManufacturedPeriodic:
        return manufactured_forcing(t, cfg);
    case ForcingKind::TaylorGreenZero:
        return SpectralField(cfg.grid);
    case ForcingKind::Kolmogorov: {
        const auto& spec = cfg.forcing;
        const double ramp = spec.ramp > 0.0 ? std::min(1.0, t / spec.ramp) : 1.0;
        SpectralField f(cfg.grid);
        f.set_mode(0, 0, spec.k_f, Complex{0.0, -0.5 * spec.amplitude * ramp});
        return f;
    }
    }
    throw std::logic_error("unhandled forcing kind");
}

PreparedStep prepare_step(const SolverState& state, const SolverConfig& cfg) {
    const double dt = cfg.dt;
    const double t_new = state.t + dt;
    const SpectralField f = forcing(t_new, cfg);
    if (state.step_index == 0) {
        SpectralField rhs = f - nonlinear_term(state.v_now);
        rhs *= dt;
        rhs += state.v_now;
        return PreparedStep{std::move(rhs), 1.0, dt * cfg.nu, dt, t_new, state.step_index};
    }
    SpectralField v_star = 2.0 * state.v_now;
    v_star -= state.v_prev;
    SpectralField rhs = f - nonlinear_term(v_star);
    rhs *= 2.0 * dt;
    rhs += 4.0 * state.v_now;
    rhs -= state.v_prev;
    return PreparedStep{std::move(rhs), 3.0, 2.0 * dt * cfg.nu, 2.0 * dt, t_new, state.step_index};
}

SolverState complete_step(const SolverState& state, const PreparedStep& prepared,
                          const std::optional<NudgeTerm>& nudge) {
    SpectralField v_new(prepared.rhs);
    if (nudge && nudge->chi != 0.0) {
        const double c = prepared.weight * nudge->chi;
        SpectralField data = leray_project(nudge->observer.project(nudge->data));
        data *= c;
        v_new += data;
        v_new = nudge->observer.solve_shifted(v_new, prepared.alpha, prepared.gamma, c);
    } else {
        divide_helmholtz(v_new, prepared.alpha, prepared.gamma);
    }
    v_new = leray_project(v_new);
    return SolverState{std::move(v_new), state.v_now, prepared.t_new, prepared.step_index + 1};
}

SolverState bdf2_step(const SolverState& state, const SolverConfig& cfg,
                      const std::optional<NudgeTerm>& nudge) {
    return complete_step(state, prepare_step(state, cfg), nudge);
}

}  // namespace nudge
