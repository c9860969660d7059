#include "gamelab/value_grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "gamelab/csv.hpp"

namespace gamelab {

using nlohmann::json;

int ValueGrid::interior_lo() const {
    const double span = x_nodes.back() - x_nodes.front();
    const double lo = x_nodes.front() + boundary_layer_frac * span;
    int i = 0;
    while (i < n_x() && x_nodes[i] < lo) ++i;
    return i;
}

int ValueGrid::interior_hi() const {
    const double span = x_nodes.back() - x_nodes.front();
    const double hi = x_nodes.back() - boundary_layer_frac * span;
    int i = n_x() - 1;
    while (i >= 0 && x_nodes[i] > hi) --i;
    return i;
}

double ValueGrid::interp(double t, double x, bool* extrapolated) const {
    bool clamped = false;
    const double t0 = t_nodes.front(), t1 = t_nodes.back();
    const double x0 = x_nodes.front(), x1 = x_nodes.back();
    if (t < t0 || t > t1) {
        t = std::clamp(t, t0, t1);
        clamped = true;
    }
    if (x < x0 || x > x1) {
        x = std::clamp(x, x0, x1);
        clamped = true;
    }
    if (extrapolated) *extrapolated = clamped;

    const double ft = (t - t0) / dt();
    const double fx = (x - x0) / dx();
    const int k = std::min(static_cast<int>(ft), n_t() - 2);
    const int i = std::min(static_cast<int>(fx), n_x() - 2);
    const double wt = ft - k, wx = fx - i;
    return (1 - wt) * ((1 - wx) * u[idx(k, i)] + wx * u[idx(k, i + 1)]) +
           wt * ((1 - wx) * u[idx(k + 1, i)] + wx * u[idx(k + 1, i + 1)]);
}

void ValueGrid::save_bundle(const std::string& dir, const std::string& prefix,
                            const json& extra_header) const {
    json header = extra_header;
    header["gamma"] = gamma;
    header["n_t"] = n_t();
    header["n_x"] = n_x();
    header["t0"] = t_nodes.front();
    header["t1"] = t_nodes.back();
    header["x_min"] = x_nodes.front();
    header["x_max"] = x_nodes.back();
    header["boundary_layer_frac"] = boundary_layer_frac;
    std::ofstream hf(dir + "/" + prefix + "_header.json");
    hf << header.dump(2) << "\n";

    std::ofstream nf(dir + "/" + prefix + "_nodes.csv");
    nf << "kind,index,value\n";
    for (int k = 0; k < n_t(); ++k) nf << "t," << k << ',' << fmt_double(t_nodes[k]) << "\n";
    for (int i = 0; i < n_x(); ++i) nf << "x," << i << ',' << fmt_double(x_nodes[i]) << "\n";

    std::ofstream vf(dir + "/" + prefix + "_values.csv");
    vf << "k,i,u,grad,residual,region\n";
    for (int k = 0; k < n_t(); ++k)
        for (int i = 0; i < n_x(); ++i) {
            const size_t q = idx(k, i);
            vf << k << ',' << i << ',' << fmt_double(u[q]) << ',' << fmt_double(grad[q]) << ','
               << fmt_double(residual[q]) << ',' << static_cast<int>(regions[q]) << "\n";
        }
}

ValueGrid ValueGrid::load_bundle(const std::string& dir, const std::string& prefix) {
    std::ifstream hf(dir + "/" + prefix + "_header.json");
    if (!hf) throw ConfigError("cannot open bundle header in " + dir);
    json header;
    hf >> header;

    ValueGrid g;
    g.gamma = header.at("gamma").get<double>();
    g.boundary_layer_frac = header.value("boundary_layer_frac", 0.1);
    const int nt = header.at("n_t").get<int>();
    const int nx = header.at("n_x").get<int>();
    g.t_nodes.resize(nt);
    g.x_nodes.resize(nx);

    std::ifstream nf(dir + "/" + prefix + "_nodes.csv");
    if (!nf) throw ConfigError("cannot open bundle nodes in " + dir);
    std::string line;
    std::getline(nf, line);  // header
    while (std::getline(nf, line)) {
        const auto c1 = line.find(','), c2 = line.find(',', c1 + 1);
        const std::string kind = line.substr(0, c1);
        const int index = std::stoi(line.substr(c1 + 1, c2 - c1 - 1));
        const double value = std::stod(line.substr(c2 + 1));
        (kind == "t" ? g.t_nodes : g.x_nodes)[index] = value;
    }

    const size_t total = static_cast<size_t>(nt) * nx;
    g.u.resize(total);
    g.grad.resize(total);
    g.residual.resize(total);
    g.regions.resize(total);
    std::ifstream vf(dir + "/" + prefix + "_values.csv");
    if (!vf) throw ConfigError("cannot open bundle values in " + dir);
    std::getline(vf, line);
    while (std::getline(vf, line)) {
        size_t pos = 0;
        auto next = [&]() {
            const size_t c = line.find(',', pos);
            std::string tok = line.substr(pos, c - pos);
            pos = (c == std::string::npos) ? line.size() : c + 1;
            return tok;
        };
        const int k = std::stoi(next());
        const int i = std::stoi(next());
        const size_t q = g.idx(k, i);
        g.u[q] = std::stod(next());
        g.grad[q] = std::stod(next());
        g.residual[q] = std::stod(next());
        g.regions[q] = static_cast<uint8_t>(std::stoi(next()));
    }
    return g;
}

}  // namespace gamelab
