#include "gamelab/control.hpp"

#include <algorithm>
#include <cmath>

#include "gamelab/path.hpp"

namespace gamelab {

void ControlPath::rebuild_total() {
    node_atoms.assign(grid.n_nodes(), 0.0);
    for (const auto& [node, size] : atoms) {
        if (node >= 0 && node < grid.n_nodes()) node_atoms[node] += size;
    }
    total.assign(grid.n_nodes(), 0.0);
    double run = 0.0;
    for (int i = 0; i < grid.n_nodes(); ++i) {
        run += increment_at(i);
        total[i] = run;
    }
}

void ControlPath::validate() const {
    if (static_cast<int>(directions.size()) != grid.n_nodes() * d)
        throw InvariantError("control: directions size mismatch");
    if (static_cast<int>(density.size()) != grid.n_steps)
        throw InvariantError("control: density size mismatch");
    for (int i = 0; i < grid.n_nodes(); ++i) {
        const double n = norm2(direction_at(i));
        if (std::abs(n - 1.0) > 1e-12) throw InvariantError("control: direction not unit at node " + std::to_string(i));
    }
    for (double r : density)
        if (r < 0.0) throw InvariantError("control: negative density");
    for (const auto& [node, size] : atoms) {
        if (node < 0 || node > grid.n_steps) throw InvariantError("control: atom off grid");
        if (size < 0.0) throw InvariantError("control: negative atom");
    }
    for (size_t i = 1; i < total.size(); ++i)
        if (total[i] < total[i - 1] - 1e-15) throw InvariantError("control: total not non-decreasing");
}

ControlPath ControlPath::zero(const TimeGrid& grid, int d) {
    ControlPath c;
    c.grid = grid;
    c.d = d;
    c.directions.assign(static_cast<size_t>(grid.n_nodes()) * d, 0.0);
    for (int i = 0; i < grid.n_nodes(); ++i) c.directions[static_cast<size_t>(i) * d] = 1.0;  // e_1
    c.density.assign(grid.n_steps, 0.0);
    c.rebuild_total();
    return c;
}

namespace {

void set_direction_everywhere(ControlPath& c, std::span<const double> n) {
    if (std::abs(norm2(n) - 1.0) > 1e-12) throw ConfigError("control direction must be a unit vector");
    for (int i = 0; i < c.grid.n_nodes(); ++i)
        std::copy(n.begin(), n.end(), c.directions.begin() + static_cast<size_t>(i) * c.d);
}

int axis_of(std::span<const double> n, double& sign) {
    // Feedback families require n = +/- e_j.
    int axis = -1;
    for (size_t i = 0; i < n.size(); ++i) {
        if (std::abs(n[i]) > 1e-12) {
            if (axis >= 0) throw ConfigError("feedback control direction must be +/- a coordinate axis");
            axis = static_cast<int>(i);
            sign = n[i] > 0 ? 1.0 : -1.0;
        }
    }
    if (axis < 0) throw ConfigError("feedback control direction is zero");
    return axis;
}

}  // namespace

ControlPath make_control(const ControlFamily& family, const TimeGrid& grid, int d) {
    if (std::holds_alternative<ReflectAt>(family) || std::holds_alternative<ThresholdPush>(family))
        throw ConfigError("feedback control family needs a reference path");

    ControlPath c = ControlPath::zero(grid, d);
    if (const auto* cd = std::get_if<ConstantDensity>(&family)) {
        if (cd->rate < 0.0) throw ConfigError("constant_density: negative rate");
        set_direction_everywhere(c, cd->direction);
        std::fill(c.density.begin(), c.density.end(), cd->rate);
    } else if (const auto* ja = std::get_if<JumpAt>(&family)) {
        if (ja->size < 0.0) throw ConfigError("jump_at: negative jump size");
        set_direction_everywhere(c, ja->direction);
        c.atoms.emplace_back(grid.node_of(ja->time), ja->size);
    }
    c.rebuild_total();
    c.validate();
    return c;
}

ControlPath make_control(const ControlFamily& family, const TimeGrid& grid, int d,
                         const CadlagPath& reference) {
    if (const auto* rf = std::get_if<ReflectAt>(&family)) {
        if (reference.grid != grid || reference.d != d)
            throw ConfigError("reflect_at: reference path grid mismatch");
        ControlPath c = ControlPath::zero(grid, d);
        double sign = 0.0;
        const int axis = axis_of(rf->direction, sign);
        set_direction_everywhere(c, rf->direction);
        // Minimal nu keeping coordinate on one side of the barrier: the
        // discrete Skorokhod recursion nu_i = max(nu_{i-1}, excess_i).
        double nu = 0.0;
        for (int i = 0; i < grid.n_nodes(); ++i) {
            // Pushing along -e_j keeps y <= barrier; along +e_j keeps y >= barrier.
            const double y = reference.value_at(i)[axis];
            const double excess = sign < 0 ? (y - rf->barrier) : (rf->barrier - y);
            const double target = std::max(nu, std::max(0.0, excess));
            if (target > nu) {
                c.atoms.emplace_back(i, target - nu);
                nu = target;
            }
        }
        c.rebuild_total();
        c.validate();
        return c;
    }
    if (const auto* tp = std::get_if<ThresholdPush>(&family)) {
        if (reference.grid != grid || reference.d != d)
            throw ConfigError("threshold_push: reference path grid mismatch");
        if (tp->size < 0.0) throw ConfigError("threshold_push: negative jump size");
        ControlPath c = ControlPath::zero(grid, d);
        set_direction_everywhere(c, tp->direction);
        for (int i = 0; i < grid.n_nodes(); ++i) {
            if (reference.value_at(i)[0] <= tp->level) {
                c.atoms.emplace_back(i, tp->size);
                break;
            }
        }
        c.rebuild_total();
        c.validate();
        return c;
    }
    return make_control(family, grid, d);
}

const char* control_family_name(const ControlFamily& family) {
    if (std::holds_alternative<ZeroControl>(family)) return "zero";
    if (std::holds_alternative<ConstantDensity>(family)) return "constant_density";
    if (std::holds_alternative<JumpAt>(family)) return "jump_at";
    if (std::holds_alternative<ReflectAt>(family)) return "reflect_at";
    return "threshold_push";
}

}  // namespace gamelab
