#include "gamelab/vi_solver.hpp"

#include <algorithm>
#include <cmath>

#include "gamelab/simd.hpp"

namespace gamelab {

void PenaltySchedule::validate() const {
    if (eps_obstacle.empty() || eps_gradient.empty())
        throw ConfigError("penalty schedule: empty epsilon sequence");
    if (eps_obstacle.size() != eps_gradient.size())
        throw ConfigError("penalty schedule: sequences must have equal length");
    auto check = [](const std::vector<double>& v, const char* name) {
        for (size_t i = 0; i < v.size(); ++i) {
            if (!(v[i] > 0.0)) throw InvariantError(std::string(name) + ": weights must be positive");
            if (i > 0 && !(v[i] < v[i - 1]))
                throw InvariantError(std::string(name) + ": weights must be strictly decreasing");
        }
    };
    check(eps_obstacle, "eps_obstacle");
    check(eps_gradient, "eps_gradient");
    if (max_outer < 1) throw ConfigError("penalty schedule: max_outer must be positive");
    if (!(newton_tol > 0.0)) throw ConfigError("penalty schedule: newton_tol must be positive");
}

namespace {

// Monotone stencil for L^gamma in 1-d: centered first derivative when the
// off-diagonals stay nonnegative, one-sided upwind otherwise.
struct Stencil {
    std::vector<double> lower, diag, upper;  // interior rows 1..nx-2
};

Stencil assemble_stencil(const GameSpec& spec, double gamma,
                         const std::vector<double>& x_nodes) {
    const int nx = static_cast<int>(x_nodes.size());
    const double dx = (x_nodes.back() - x_nodes.front()) / (nx - 1);
    Stencil st;
    st.lower.assign(nx, 0.0);
    st.diag.assign(nx, 0.0);
    st.upper.assign(nx, 0.0);
    std::vector<double> b(1), a(1);
    for (int i = 1; i < nx - 1; ++i) {
        const double x = x_nodes[i];
        spec.drift_at(std::span<const double>(&x, 1), b);
        spec.diffusion_sq_at(std::span<const double>(&x, 1), a);
        if (!std::isfinite(b[0]) || !std::isfinite(a[0]))
            throw NumericError("non-finite coefficient at x=" + std::to_string(x));
        const double ag = a[0] + gamma * gamma;
        const double diff = 0.5 * ag / (dx * dx);
        if (diff >= std::abs(b[0]) / (2.0 * dx)) {
            st.lower[i] = diff - b[0] / (2.0 * dx);
            st.upper[i] = diff + b[0] / (2.0 * dx);
            st.diag[i] = -2.0 * diff;
        } else {
            st.lower[i] = diff + std::max(-b[0], 0.0) / dx;
            st.upper[i] = diff + std::max(b[0], 0.0) / dx;
            st.diag[i] = -2.0 * diff - std::abs(b[0]) / dx;
        }
        if (st.lower[i] < 0.0 || st.upper[i] < 0.0)
            throw ConfigError("monotonicity violated in stencil at x=" + std::to_string(x));
    }
    return st;
}

// Tridiagonal solve (Thomas) for rows 1..nx-2; boundary unknowns are fixed.
void thomas_interior(const std::vector<double>& lo, const std::vector<double>& di,
                     const std::vector<double>& up, std::vector<double>& rhs,
                     std::vector<double>& out, int nx) {
    static thread_local std::vector<double> cp, dp;
    cp.assign(nx, 0.0);
    dp.assign(nx, 0.0);
    cp[1] = up[1] / di[1];
    dp[1] = rhs[1] / di[1];
    for (int i = 2; i < nx - 1; ++i) {
        const double m = di[i] - lo[i] * cp[i - 1];
        cp[i] = up[i] / m;
        dp[i] = (rhs[i] - lo[i] * dp[i - 1]) / m;
    }
    out[nx - 2] = dp[nx - 2];
    for (int i = nx - 3; i >= 1; --i) out[i] = dp[i] - cp[i] * out[i + 1];
    out[0] = 0.0;
    out[nx - 1] = 0.0;
}

struct LevelContext {
    const Stencil* st;
    const double* up;               // u^{k+1} row
    const std::vector<double>* gk;  // g(t_k, .)
    const std::vector<double>* hk;  // h(t_k, .)
    double fk;                      // f(t_k)
    double inv_dt, r, dx;
    double eps1, eps2;
    int nx;
};

void eval_F(const LevelContext& c, const std::vector<double>& w, std::vector<double>& F) {
    for (int i = 1; i < c.nx - 1; ++i) {
        const double Lw = c.st->lower[i] * w[i - 1] + c.st->diag[i] * w[i] + c.st->upper[i] * w[i + 1];
        const double Dw = (w[i + 1] - w[i - 1]) / (2.0 * c.dx);
        const double pen_obs = std::max((*c.gk)[i] - w[i], 0.0) / c.eps1;
        const double pen_grad = std::max(std::abs(Dw) - c.fk, 0.0) / c.eps2;
        F[i] = (c.up[i] - w[i]) * c.inv_dt + Lw - c.r * w[i] + (*c.hk)[i] + pen_obs - pen_grad;
    }
    F[0] = 0.0;
    F[c.nx - 1] = 0.0;
}

double sup_interior(const std::vector<double>& v) { return simd::kernels().max_abs(v); }

}  // namespace

ValueGrid solve_vi(const GameSpec& spec, double gamma, const GridParams& grid,
                   const PenaltySchedule& schedule, SolveDiagnostics* diag) {
    if (!(gamma > 0.0)) throw ConfigError("solve_vi: gamma must be positive (uniform ellipticity)");
    if (spec.d != 1) throw ConfigError("solve_vi: spatial dimension 1 supported");
    if (grid.n_x < 5 || grid.n_t < 2) throw ConfigError("solve_vi: grid too small");
    schedule.validate();

    const int nx = grid.n_x;
    const int nt = grid.n_t;
    const double T = spec.horizon;
    const double dt = T / nt;
    const double dx = (grid.x_max - grid.x_min) / (nx - 1);

    ValueGrid vg;
    vg.gamma = gamma;
    vg.boundary_layer_frac = grid.boundary_layer_frac;
    vg.t_nodes.resize(nt + 1);
    for (int k = 0; k <= nt; ++k) vg.t_nodes[k] = T * k / nt;
    vg.x_nodes.resize(nx);
    for (int i = 0; i < nx; ++i) vg.x_nodes[i] = grid.x_min + dx * i;
    const size_t total = static_cast<size_t>(nt + 1) * nx;
    vg.u.assign(total, 0.0);
    vg.grad.assign(total, 0.0);
    vg.residual.assign(total, 0.0);
    vg.regions.assign(total, static_cast<uint8_t>(NodeRegion::continue_));

    const Stencil st = assemble_stencil(spec, gamma, vg.x_nodes);

    // Obstacle and running payoff per level.
    std::vector<std::vector<double>> g_lvl(nt + 1, std::vector<double>(nx));
    std::vector<std::vector<double>> h_lvl(nt + 1, std::vector<double>(nx));
    for (int k = 0; k <= nt; ++k)
        for (int i = 0; i < nx; ++i) {
            const double x = vg.x_nodes[i];
            g_lvl[k][i] = spec.g_at(vg.t_nodes[k], std::span<const double>(&x, 1));
            h_lvl[k][i] = spec.h_at(vg.t_nodes[k], std::span<const double>(&x, 1));
        }

    // Terminal condition: assigned, not solved.
    for (int i = 0; i < nx; ++i) vg.u[vg.idx(nt, i)] = g_lvl[nt][i];

    const size_t n_stages = schedule.eps_obstacle.size();
    std::vector<double> w(nx), F(nx), delta(nx), rhs(nx), Ftrial(nx), wtrial(nx);
    std::vector<double> jlo(nx), jdi(nx), jup(nx);

    for (size_t stage = 0; stage < n_stages; ++stage) {
        LevelContext ctx;
        ctx.st = &st;
        ctx.inv_dt = 1.0 / dt;
        ctx.r = spec.discount;
        ctx.dx = dx;
        ctx.eps1 = schedule.eps_obstacle[stage];
        ctx.eps2 = schedule.eps_gradient[stage];
        ctx.nx = nx;

        for (int k = nt - 1; k >= 0; --k) {
            ctx.up = vg.u.data() + vg.idx(k + 1, 0);
            ctx.gk = &g_lvl[k];
            ctx.hk = &h_lvl[k];
            ctx.fk = spec.f_at(vg.t_nodes[k]);

            // Warm start: previous stage's u^k when available, else u^{k+1}.
            if (stage == 0)
                std::copy(ctx.up, ctx.up + nx, w.begin());
            else
                std::copy(vg.u.begin() + vg.idx(k, 0), vg.u.begin() + vg.idx(k, 0) + nx, w.begin());
            w[0] = g_lvl[k][0];
            w[nx - 1] = g_lvl[k][nx - 1];

            eval_F(ctx, w, F);
            double fnorm = sup_interior(F);
            int it = 0;
            for (; it < schedule.max_outer; ++it) {
                // Semismooth Jacobian, tridiagonal.
                for (int i = 1; i < nx - 1; ++i) {
                    const double Dw = (w[i + 1] - w[i - 1]) / (2.0 * dx);
                    const bool obs = g_lvl[k][i] - w[i] > 0.0;
                    const bool gac = std::abs(Dw) - ctx.fk > 0.0;
                    const double gsl = gac ? (Dw >= 0 ? 1.0 : -1.0) / (2.0 * dx * ctx.eps2) : 0.0;
                    jlo[i] = st.lower[i] + gsl;
                    jup[i] = st.upper[i] - gsl;
                    jdi[i] = -ctx.inv_dt + st.diag[i] - ctx.r - (obs ? 1.0 / ctx.eps1 : 0.0);
                    rhs[i] = -F[i];
                }
                thomas_interior(jlo, jdi, jup, rhs, delta, nx);

                double lambda = 1.0;
                const double wsup = sup_interior(w);
                bool accepted = false;
                for (int half = 0; half <= 30; ++half) {
                    std::copy(w.begin(), w.end(), wtrial.begin());
                    simd::kernels().axpy(lambda, delta, wtrial);
                    eval_F(ctx, wtrial, Ftrial);
                    const double ftrial = sup_interior(Ftrial);
                    if (ftrial < fnorm || half == 30) {
                        if (half > 0 && diag) ++diag->damping_events;
                        std::swap(w, wtrial);
                        std::swap(F, Ftrial);
                        fnorm = ftrial;
                        accepted = true;
                        break;
                    }
                    lambda *= 0.5;
                }
                if (diag) ++diag->newton_iterations;
                if (!accepted || lambda * sup_interior(delta) <= schedule.newton_tol * (1.0 + wsup))
                    break;
            }
            if (it >= schedule.max_outer) {
                int worst = 1;
                for (int i = 1; i < nx - 1; ++i)
                    if (std::abs(F[i]) > std::abs(F[worst])) worst = i;
                throw NumericError("Newton did not converge at t=" + std::to_string(vg.t_nodes[k]) +
                                   ", x=" + std::to_string(vg.x_nodes[worst]));
            }
            std::copy(w.begin(), w.end(), vg.u.begin() + vg.idx(k, 0));
        }

        if (diag) diag->stage_residuals.push_back(vi_residual(vg, spec, gamma));
    }

    // Spatial gradient: central interior, one-sided at the box edges.
    for (int k = 0; k <= nt; ++k) {
        for (int i = 0; i < nx; ++i) {
            double gv;
            if (i == 0)
                gv = (vg.u[vg.idx(k, 1)] - vg.u[vg.idx(k, 0)]) / dx;
            else if (i == nx - 1)
                gv = (vg.u[vg.idx(k, nx - 1)] - vg.u[vg.idx(k, nx - 2)]) / dx;
            else
                gv = (vg.u[vg.idx(k, i + 1)] - vg.u[vg.idx(k, i - 1)]) / (2.0 * dx);
            vg.grad[vg.idx(k, i)] = gv;
        }
    }

    vi_residual(vg, spec, gamma);

    // Region labels from the solved grid.
    double usup = 0.0;
    for (double v : vg.u) usup = std::max(usup, std::abs(v));
    const double tol_stop = 1e-4 * (1.0 + usup);
    for (int k = 0; k <= nt; ++k) {
        const double fk = spec.f_at(vg.t_nodes[k]);
        for (int i = 0; i < nx; ++i) {
            const size_t q = vg.idx(k, i);
            if (vg.u[q] - g_lvl[k][i] <= tol_stop)
                vg.regions[q] = static_cast<uint8_t>(NodeRegion::stop);
            else if (fk - std::abs(vg.grad[q]) <= 1e-3 * fk)
                vg.regions[q] = static_cast<uint8_t>(NodeRegion::gradient_active);
            else
                vg.regions[q] = static_cast<uint8_t>(NodeRegion::continue_);
        }
    }
    return vg;
}

ResidualSummary vi_residual(ValueGrid& vg, const GameSpec& spec, double gamma) {
    const int nt = vg.n_t() - 1;
    const int nx = vg.n_x();
    const double dt = vg.dt();
    const double dx = vg.dx();
    const Stencil st = assemble_stencil(spec, gamma, vg.x_nodes);

    std::vector<double> interior_vals;
    const int ilo = std::max(1, vg.interior_lo());
    const int ihi = std::min(nx - 2, vg.interior_hi());
    interior_vals.reserve(static_cast<size_t>(nt) * (ihi - ilo + 1));

    for (int k = 0; k < nt; ++k) {
        const double tk = vg.t_nodes[k];
        const double fk = spec.f_at(tk);
        for (int i = 1; i < nx - 1; ++i) {
            const double x = vg.x_nodes[i];
            const std::span<const double> xs(&x, 1);
            const double uki = vg.u[vg.idx(k, i)];
            const double Lw = st.lower[i] * vg.u[vg.idx(k, i - 1)] + st.diag[i] * uki +
                              st.upper[i] * vg.u[vg.idx(k, i + 1)];
            const double A = (vg.u[vg.idx(k + 1, i)] - uki) / dt + Lw - spec.discount * uki +
                             spec.h_at(tk, xs);
            const double B = spec.g_at(tk, xs) - uki;
            const double Du = (vg.u[vg.idx(k, i + 1)] - vg.u[vg.idx(k, i - 1)]) / (2.0 * dx);
            const double C = fk - std::abs(Du);
            const double r_minmax = std::min(std::max(A, B), C);
            const double r_maxmin = std::max(std::min(A, C), B);
            const double res = std::max(std::abs(r_minmax), std::abs(r_maxmin));
            vg.residual[vg.idx(k, i)] = res;
            if (i >= ilo && i <= ihi) interior_vals.push_back(res);
        }
        vg.residual[vg.idx(k, 0)] = 0.0;
        vg.residual[vg.idx(k, nx - 1)] = 0.0;
    }
    for (int i = 0; i < nx; ++i) vg.residual[vg.idx(nt, i)] = 0.0;

    ResidualSummary s;
    if (!interior_vals.empty()) {
        std::sort(interior_vals.begin(), interior_vals.end());
        s.max_interior = interior_vals.back();
        s.p99_interior = interior_vals[static_cast<size_t>(0.99 * (interior_vals.size() - 1))];
    }
    return s;
}

GradientReport gradient_bound_check(const ValueGrid& vg, const GameSpec& spec, double grad_tol) {
    GradientReport rep;
    rep.tol = grad_tol;
    const int ilo = vg.interior_lo(), ihi = vg.interior_hi();
    for (int k = 0; k < vg.n_t(); ++k) {
        const double fk = spec.f_at(vg.t_nodes[k]);
        for (int i = ilo; i <= ihi; ++i)
            rep.max_ratio = std::max(rep.max_ratio, std::abs(vg.grad[vg.idx(k, i)]) / fk);
    }
    rep.pass = rep.max_ratio <= 1.0 + grad_tol;
    return rep;
}

std::vector<uint8_t> extract_contact_set(const ValueGrid& vg, const GameSpec& spec, double tol) {
    std::vector<uint8_t> mask(vg.u.size(), 0);
    for (int k = 0; k < vg.n_t(); ++k)
        for (int i = 0; i < vg.n_x(); ++i) {
            const double x = vg.x_nodes[i];
            const double g = spec.g_at(vg.t_nodes[k], std::span<const double>(&x, 1));
            if (vg.u[vg.idx(k, i)] - g <= tol || k == vg.n_t() - 1) mask[vg.idx(k, i)] = 1;
        }
    return mask;
}

}  // namespace gamelab
