#include "gamelab/sde.hpp"

#include <algorithm>
#include <cmath>

#include "gamelab/csv.hpp"
#include "gamelab/rng.hpp"
#include "gamelab/simd.hpp"

namespace gamelab {

BrownianDriver BrownianDriver::generate(uint64_t seed, uint64_t path_index, int n_steps,
                                        double dt, int d, int dprime) {
    BrownianDriver drv;
    drv.seed = seed;
    drv.path_index = path_index;
    drv.n_steps = n_steps;
    drv.dt = dt;
    drv.d = d;
    drv.dprime = dprime;
    drv.dW.resize(static_cast<size_t>(n_steps) * dprime);
    drv.dWtilde.resize(static_cast<size_t>(n_steps) * d);
    const double sd = std::sqrt(dt);
    GaussianStream w(seed, path_index, GaussianStream::Tag::W);
    for (double& v : drv.dW) v = sd * w.next_gaussian();
    GaussianStream wt(seed, path_index, GaussianStream::Tag::Wtilde);
    for (double& v : drv.dWtilde) v = sd * wt.next_gaussian();
    return drv;
}

void BrownianDriver::write_csv(std::ostream& os) const {
    os << "s";
    for (int j = 0; j < dprime; ++j) os << ",dW_" << (j + 1);
    for (int j = 0; j < d; ++j) os << ",dWtilde_" << (j + 1);
    os << "\n";
    for (int i = 0; i < n_steps; ++i) {
        put_double(os, (i + 1) * dt);
        for (int j = 0; j < dprime; ++j) os << ',' << fmt_double(dW[static_cast<size_t>(i) * dprime + j]);
        for (int j = 0; j < d; ++j) os << ',' << fmt_double(dWtilde[static_cast<size_t>(i) * d + j]);
        os << "\n";
    }
}

void CadlagPath::write_csv(std::ostream& os) const {
    os << "s";
    for (int j = 0; j < d; ++j) os << ",x_" << (j + 1);
    for (int j = 0; j < d; ++j) os << ",pre_x_" << (j + 1);
    os << ",jump_flag\n";
    for (int i = 0; i < grid.n_nodes(); ++i) {
        put_double(os, grid.time(i));
        for (int j = 0; j < d; ++j) os << ',' << fmt_double(values[static_cast<size_t>(i) * d + j]);
        for (int j = 0; j < d; ++j) os << ',' << fmt_double(pre_values[static_cast<size_t>(i) * d + j]);
        os << ',' << static_cast<int>(jump_flags[i]) << "\n";
    }
}

const CadlagPath& CoupledSample::at_gamma(double gamma) const {
    for (const auto& [g, p] : perturbed)
        if (g == gamma) return p;
    throw ConfigError("no perturbed path stored for gamma=" + std::to_string(gamma));
}

CadlagPath simulate_controlled(const GameSpec& spec, const ControlPath& control,
                               const BrownianDriver& driver, double gamma,
                               std::span<const double> x0) {
    const int d = spec.d;
    if (static_cast<int>(x0.size()) != d) throw ConfigError("x0 dimension mismatch");
    if (control.grid.n_steps != driver.n_steps ||
        std::abs(control.grid.dt() - driver.dt) > 1e-12 * (1.0 + driver.dt))
        throw ConfigError("control grid and driver grid do not align");
    if (control.d != d || driver.d != d || driver.dprime != spec.dprime)
        throw ConfigError("dimension mismatch between spec, control and driver");
    if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("gamma must lie in [0,1)");

    const TimeGrid grid = control.grid;
    const double dt = grid.dt();
    const int n_nodes = grid.n_nodes();

    CadlagPath path;
    path.grid = grid;
    path.d = d;
    path.values.resize(static_cast<size_t>(n_nodes) * d);
    path.pre_values.resize(static_cast<size_t>(n_nodes) * d);
    path.jump_flags.assign(n_nodes, 0);

    std::vector<double> x(x0.begin(), x0.end());
    std::vector<double> b(d), sig(static_cast<size_t>(d) * spec.dprime);

    // The density part of nu accrues continuously over (s_{i-1}, s_i] and so
    // belongs to the left limit; only the atom separates X_{s-} from X_s.
    auto apply_control = [&](int node) {
        const auto n = control.direction_at(node);
        if (node > 0) {
            const double ac = control.density[node - 1] * dt;
            if (ac > 0.0)
                for (int j = 0; j < d; ++j) x[j] += n[j] * ac;
        }
        std::copy(x.begin(), x.end(), path.pre_values.begin() + static_cast<size_t>(node) * d);
        const double atom = control.atom_at(node);
        if (atom > 0.0) {
            for (int j = 0; j < d; ++j) x[j] += n[j] * atom;
            path.jump_flags[node] = 1;
        }
        std::copy(x.begin(), x.end(), path.values.begin() + static_cast<size_t>(node) * d);
    };

    // X_0 = x + n_0 * dnu_0: the initial state before a possible shift is x itself.
    apply_control(0);

    for (int i = 0; i < grid.n_steps; ++i) {
        spec.drift_at(x, b);
        spec.diffusion_at(x, sig);
        const auto dW = driver.dW_at(i);
        const auto dWt = driver.dWtilde_at(i);
        for (int j = 0; j < d; ++j) {
            double dx = b[j] * dt + gamma * dWt[j];
            for (int k = 0; k < spec.dprime; ++k) dx += sig[static_cast<size_t>(j) * spec.dprime + k] * dW[k];
            x[j] += dx;
            if (!std::isfinite(x[j]))
                throw NumericError("non-finite state at grid node " + std::to_string(i + 1) +
                                   ", component " + std::to_string(j + 1));
        }
        apply_control(i + 1);
    }
    return path;
}

CoupledSample simulate_coupled(const GameSpec& spec, const ControlPath& control, uint64_t seed,
                               std::span<const double> gammas, std::span<const double> x0,
                               uint64_t path_index) {
    if (gammas.empty()) throw ConfigError("simulate_coupled: gammas must be nonempty");
    for (double g : gammas)
        if (!(g >= 0.0 && g < 1.0)) throw ConfigError("simulate_coupled: each gamma must lie in [0,1)");

    const BrownianDriver driver = BrownianDriver::generate(seed, path_index, control.grid.n_steps,
                                                           control.grid.dt(), spec.d, spec.dprime);
    CoupledSample sample;
    sample.driver_seed = seed;
    sample.base = simulate_controlled(spec, control, driver, 0.0, x0);
    sample.perturbed.reserve(gammas.size());
    for (double g : gammas) {
        if (g == 0.0)
            sample.perturbed.emplace_back(0.0, sample.base);
        else
            sample.perturbed.emplace_back(g, simulate_controlled(spec, control, driver, g, x0));
    }
    return sample;
}

double sup_distance(const CadlagPath& a, const CadlagPath& b, double p) {
    if (a.grid != b.grid || a.d != b.d) throw ConfigError("sup_distance: grid mismatch");
    if (p < 1.0) throw ConfigError("sup_distance: exponent p must be >= 1");
    double m = 0.0;
    if (a.d == 1) {
        const auto& k = simd::kernels();
        m = std::max(k.max_abs_diff(a.values, b.values), k.max_abs_diff(a.pre_values, b.pre_values));
    } else {
        for (int i = 0; i < a.grid.n_nodes(); ++i) {
            double s = 0.0, sp = 0.0;
            for (int j = 0; j < a.d; ++j) {
                const size_t k = static_cast<size_t>(i) * a.d + j;
                const double dv = a.values[k] - b.values[k];
                const double dp = a.pre_values[k] - b.pre_values[k];
                s += dv * dv;
                sp += dp * dp;
            }
            m = std::max(m, std::sqrt(std::max(s, sp)));
        }
    }
    return p == 1.0 ? m : std::pow(m, p);
}

std::vector<double> left_limit(const CadlagPath& path, double s) {
    const int node = path.grid.node_of(s);
    const auto v = path.pre_value_at(node);
    return {v.begin(), v.end()};
}

MeanStderr moment_estimate(std::span<const CoupledSample> samples, double gamma, double p,
                           PathStatistic statistic) {
    if (samples.size() < 2) throw ConfigError("moment_estimate: need at least 2 samples");
    RunningStat stat;
    for (const CoupledSample& s : samples) {
        const CadlagPath& path = gamma == 0.0 ? s.base : s.at_gamma(gamma);
        double v = 0.0;
        switch (statistic) {
            case PathStatistic::sup_distance:
                v = sup_distance(s.base, path, p);
                break;
            case PathStatistic::terminal_norm:
                v = std::pow(norm2(path.value_at(path.grid.n_steps)), p);
                break;
        }
        stat.add(v);
    }
    return stat.result();
}

}  // namespace gamelab
