#include "gamelab/assumptions.hpp"

#include <algorithm>
#include <cmath>

#include "gamelab/rng.hpp"

namespace gamelab {

using nlohmann::json;

json AssumptionReport::to_json() const {
    json j;
    j["conforming"] = conforming;
    json arr = json::array();
    for (const auto& c : checks) {
        json e;
        e["name"] = c.name;
        e["pass"] = c.pass;
        e["estimate"] = c.estimate;
        e["bound"] = c.bound;
        e["witness"] = c.witness;
        if (!c.note.empty()) e["note"] = c.note;
        arr.push_back(e);
    }
    j["checks"] = arr;
    return j;
}

std::vector<std::vector<double>> sample_box(int d, double box, int n, uint64_t seed) {
    GaussianStream s(seed, 0, GaussianStream::Tag::W);
    std::vector<std::vector<double>> pts(n, std::vector<double>(d));
    for (auto& p : pts)
        for (double& c : p) c = box * (2.0 * s.next_uniform() - 1.0);
    return pts;
}

namespace {

double fd_grad_norm(const GameSpec& spec, double t, std::span<const double> x) {
    const double h = 1e-5;
    std::vector<double> xp(x.begin(), x.end()), xm(x.begin(), x.end());
    double s = 0.0;
    for (int j = 0; j < spec.d; ++j) {
        xp[j] += h;
        xm[j] -= h;
        const double g = (spec.g_at(t, xp) - spec.g_at(t, xm)) / (2.0 * h);
        s += g * g;
        xp[j] = x[j];
        xm[j] = x[j];
    }
    return std::sqrt(s);
}

}  // namespace

AssumptionReport validate_assumptions(const GameSpec& spec,
                                      const std::vector<std::vector<double>>& pts) {
    if (pts.size() < 100) throw ConfigError("validate_assumptions: need at least 100 sample points");
    AssumptionReport rep;
    const double T = spec.horizon;
    const std::vector<double> times = {0.0, 0.25 * T, 0.5 * T, 0.75 * T, T};

    // |grad g| / f.
    {
        AssumptionCheck c{.name = "gradient_ratio", .bound = 1.0 + 1e-3};
        for (double t : times)
            for (const auto& x : pts) {
                const double ratio = fd_grad_norm(spec, t, x) / spec.f_at(t);
                if (ratio > c.estimate) {
                    c.estimate = ratio;
                    c.witness = x;
                }
            }
        c.pass = c.estimate <= c.bound;
        rep.checks.push_back(std::move(c));
    }

    // Pairwise Lipschitz quotients of b and sigma vs D1.
    {
        AssumptionCheck cb{.name = "lipschitz_b", .bound = spec.profile.D1 * (1.0 + 1e-6)};
        AssumptionCheck cs{.name = "lipschitz_sigma", .bound = spec.profile.D1 * (1.0 + 1e-6)};
        std::vector<double> bx(spec.d), by(spec.d);
        std::vector<double> sx(static_cast<size_t>(spec.d) * spec.dprime), sy(sx.size());
        for (size_t i = 0; i + 1 < pts.size(); ++i) {
            const auto& x = pts[i];
            const auto& y = pts[i + 1];
            std::vector<double> diff(spec.d);
            for (int j = 0; j < spec.d; ++j) diff[j] = x[j] - y[j];
            const double dn = norm2(diff);
            if (dn < 1e-12) continue;
            spec.drift_at(x, bx);
            spec.drift_at(y, by);
            for (int j = 0; j < spec.d; ++j) diff[j] = bx[j] - by[j];
            const double qb = norm2(diff) / dn;
            if (qb > cb.estimate) {
                cb.estimate = qb;
                cb.witness = x;
            }
            spec.diffusion_at(x, sx);
            spec.diffusion_at(y, sy);
            double fn = 0.0;
            for (size_t j = 0; j < sx.size(); ++j) fn += (sx[j] - sy[j]) * (sx[j] - sy[j]);
            const double qs = std::sqrt(fn) / dn;
            if (qs > cs.estimate) {
                cs.estimate = qs;
                cs.witness = x;
            }
        }
        cb.pass = cb.estimate <= cb.bound;
        cs.pass = cs.estimate <= cs.bound;
        rep.checks.push_back(std::move(cb));
        rep.checks.push_back(std::move(cs));
    }

    // Growth of g + h against the profile bound.
    {
        AssumptionCheck c{.name = "growth_g_plus_h", .bound = 1.0 + 1e-6};
        const auto& p = spec.profile;
        for (double t : times)
            for (const auto& x : pts) {
                const double n = norm2(x);
                double env;
                if (p.variant == ProfileVariant::A22_sublinear)
                    env = p.K1 * (1.0 + std::pow(n, p.beta));
                else
                    env = std::max(p.K5, 1e-300) * (1.0 + n * n);
                const double q = (spec.g_at(t, x) + spec.h_at(t, x)) / env;
                if (q > c.estimate) {
                    c.estimate = q;
                    c.witness = x;
                }
            }
        c.pass = c.estimate <= c.bound;
        if (p.variant != ProfileVariant::A22_sublinear && p.K5 <= 0.0)
            c.note = "K5 not configured; growth check vacuous";
        rep.checks.push_back(std::move(c));
    }

    // Sigma structure (i.a): sigma_ij depends only on x_i, probed by
    // perturbing the other coordinates.
    if (spec.profile.sigma_structure == SigmaStructure::separable_ia) {
        AssumptionCheck c{.name = "sigma_separable_ia", .bound = 1e-9};
        std::vector<double> s0(static_cast<size_t>(spec.d) * spec.dprime), s1(s0.size());
        for (const auto& x : pts) {
            spec.diffusion_at(x, s0);
            for (int k = 0; k < spec.d; ++k) {
                std::vector<double> xp(x);
                xp[k] += 0.37;
                spec.diffusion_at(xp, s1);
                for (int i = 0; i < spec.d; ++i) {
                    if (i == k) continue;
                    for (int j = 0; j < spec.dprime; ++j) {
                        const double dlt =
                            std::abs(s1[static_cast<size_t>(i) * spec.dprime + j] -
                                     s0[static_cast<size_t>(i) * spec.dprime + j]);
                        if (dlt > c.estimate) {
                            c.estimate = dlt;
                            c.witness = x;
                        }
                    }
                }
            }
        }
        c.pass = c.estimate <= c.bound;
        rep.checks.push_back(std::move(c));
    }

    // Sigma structure (i.b): |sigma| <= D2 (1+|x|)^{1/2}.
    if (spec.profile.sigma_structure == SigmaStructure::sqrt_growth_ib ||
        spec.profile.D2 > 0.0) {
        AssumptionCheck c{.name = "sigma_sqrt_growth_ib", .bound = 1.0 + 1e-6};
        std::vector<double> s(static_cast<size_t>(spec.d) * spec.dprime);
        const double D2 = spec.profile.D2 > 0.0 ? spec.profile.D2 : 1.0;
        for (const auto& x : pts) {
            spec.diffusion_at(x, s);
            double fn = 0.0;
            for (double v : s) fn += v * v;
            const double q = std::sqrt(fn) / (D2 * std::sqrt(1.0 + norm2(x)));
            if (q > c.estimate) {
                c.estimate = q;
                c.witness = x;
            }
        }
        c.pass = c.estimate <= c.bound;
        rep.checks.push_back(std::move(c));
    }

    // f positive and non-increasing on a fine time grid.
    {
        AssumptionCheck c{.name = "f_positive_nonincreasing", .bound = 0.0};
        double prev = spec.f_at(0.0);
        bool ok = prev > 0.0;
        for (int i = 1; i <= 256 && ok; ++i) {
            const double v = spec.f_at(T * i / 256.0);
            ok = v > 0.0 && v <= prev + 1e-12 * std::abs(prev);
            prev = v;
        }
        c.pass = ok;
        c.estimate = ok ? 0.0 : 1.0;
        rep.checks.push_back(std::move(c));
    }

    rep.conforming = std::all_of(rep.checks.begin(), rep.checks.end(),
                                 [](const AssumptionCheck& c) { return c.pass; });
    return rep;
}

}  // namespace gamelab
