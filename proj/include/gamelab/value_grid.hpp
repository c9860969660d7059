#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gamelab/core.hpp"

#include <json.hpp>

namespace gamelab {

enum class NodeRegion : uint8_t { stop = 0, continue_ = 1, gradient_active = 2 };

// Time-space grid carrying the discrete value function u^gamma, its
// finite-difference spatial gradient, per-node VI residuals and region
// labels. Spatial dimension 1; the lateral box is [x_min, x_max].
struct ValueGrid {
    std::vector<double> t_nodes;  // M+1 times, t_nodes.front()=t0, back()=T
    std::vector<double> x_nodes;  // Nx spatial nodes, uniform
    std::vector<double> u;        // (M+1) x Nx, time-major
    std::vector<double> grad;     // same shape
    std::vector<double> residual; // same shape
    std::vector<uint8_t> regions; // same shape (NodeRegion)
    double gamma = 0.0;
    double boundary_layer_frac = 0.1;

    int n_t() const { return static_cast<int>(t_nodes.size()); }
    int n_x() const { return static_cast<int>(x_nodes.size()); }
    size_t idx(int k, int i) const { return static_cast<size_t>(k) * n_x() + i; }
    double dt() const { return (t_nodes.back() - t_nodes.front()) / (n_t() - 1); }
    double dx() const { return (x_nodes.back() - x_nodes.front()) / (n_x() - 1); }

    // First/last spatial index outside the reported boundary layer.
    int interior_lo() const;
    int interior_hi() const;

    // Bilinear interpolation in (t, x); out-of-grid queries clamp to the
    // boundary. Returns true in *extrapolated when clamping happened.
    double interp(double t, double x, bool* extrapolated = nullptr) const;

    // Portable CSV bundle: <prefix>_header.json, <prefix>_nodes.csv,
    // <prefix>_values.csv.
    void save_bundle(const std::string& dir, const std::string& prefix,
                     const nlohmann::json& extra_header = {}) const;
    static ValueGrid load_bundle(const std::string& dir, const std::string& prefix);
};

}  // namespace gamelab
