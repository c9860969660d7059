#include "gamelab/game_spec.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace gamelab {

using nlohmann::json;

void DriftField::eval(std::span<const double> x, std::span<double> out) const {
    const size_t d = x.size();
    switch (family) {
        case Family::zero:
            std::fill(out.begin(), out.end(), 0.0);
            return;
        case Family::affine:
            for (size_t i = 0; i < d; ++i) {
                double s = offset.empty() ? 0.0 : offset[i];
                for (size_t j = 0; j < d; ++j) s += matrix[i * d + j] * x[j];
                out[i] = s;
            }
            return;
    }
}

void DiffusionField::eval(std::span<const double> x, std::span<double> out, int d, int dprime) const {
    std::fill(out.begin(), out.end(), 0.0);
    switch (family) {
        case Family::zero:
            return;
        case Family::constant:
            std::copy(matrix.begin(), matrix.end(), out.begin());
            return;
        case Family::diagonal_affine:
            for (int i = 0; i < std::min(d, dprime); ++i)
                out[i * dprime + i] = slope[i] * x[i] + offset[i];
            return;
        case Family::diagonal_sqrt:
            for (int i = 0; i < std::min(d, dprime); ++i)
                out[i * dprime + i] = scale * std::sqrt(1.0 + std::abs(x[i]));
            return;
        case Family::sqrt_growth: {
            const double v = scale * std::sqrt(1.0 + norm2(x));
            for (int i = 0; i < std::min(d, dprime); ++i) out[i * dprime + i] = v;
            return;
        }
    }
}

double TerminalPayoff::eval(double, std::span<const double> x) const {
    switch (family) {
        case Family::zero:
            return 0.0;
        case Family::constant:
            return value;
        case Family::put:
            return scale * std::max(0.0, strike - x[0]);
        case Family::abs_capped:
            return scale * std::min(norm2(x), cap);
    }
    return 0.0;
}

double RunningPayoff::eval(double, std::span<const double> x) const {
    switch (family) {
        case Family::zero:
            return 0.0;
        case Family::constant:
            return value;
        case Family::quadratic: {
            const double n = norm2(x);
            return value * (1.0 + n * n);
        }
    }
    return 0.0;
}

double ControlCost::eval(double t) const {
    switch (family) {
        case Family::constant:
            return value;
        case Family::exp_decay:
            return amplitude * std::exp(-rate * t) + floor;
    }
    return value;
}

void AssumptionProfile::validate() const {
    if (variant == ProfileVariant::A22_sublinear && !(beta >= 0.0 && beta < 1.0))
        throw InvariantError("profile A22_sublinear requires beta in [0,1)");
    if (variant == ProfileVariant::A51_quadratic && sigma_structure == SigmaStructure::neither)
        throw InvariantError("profile A51_quadratic requires sigma structure (i.a) or (i.b)");
}

void GameSpec::drift_at(std::span<const double> x, std::span<double> out) const {
    drift.eval(x, out);
}

void GameSpec::diffusion_at(std::span<const double> x, std::span<double> out) const {
    diffusion.eval(x, out, d, dprime);
}

void GameSpec::diffusion_sq_at(std::span<const double> x, std::span<double> out) const {
    std::vector<double> s(d * dprime);
    diffusion_at(x, s);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            double acc = 0.0;
            for (int k = 0; k < dprime; ++k) acc += s[i * dprime + k] * s[j * dprime + k];
            out[i * d + j] = acc;
        }
}

void GameSpec::validate() const {
    if (d < 1 || d > 8) throw ConfigError("state dimension d must be in [1,8]");
    if (dprime < 1 || dprime > 8) throw ConfigError("driver dimension d' must be in [1,8]");
    if (horizon <= 0.0) throw ConfigError("horizon must be positive");
    if (discount < 0.0) throw ConfigError("discount must be nonnegative");
    profile.validate();
    // f strictly positive and non-increasing on a sampled grid.
    double prev = f_at(0.0);
    for (int i = 0; i <= 64; ++i) {
        const double t = horizon * i / 64.0;
        const double v = f_at(t);
        if (!(v > 0.0)) throw InvariantError("control cost f must be strictly positive");
        if (v > prev + 1e-12 * std::abs(prev)) throw InvariantError("control cost f must be non-increasing");
        prev = v;
    }
}

namespace {

std::string str_at(const json& j, const char* key, const char* ctx) {
    if (!j.contains(key)) throw ConfigError(std::string(ctx) + "." + key + ": missing field");
    return j.at(key).get<std::string>();
}

double num_at(const json& j, const char* key, const char* ctx) {
    if (!j.contains(key)) throw ConfigError(std::string(ctx) + "." + key + ": missing field");
    if (!j.at(key).is_number()) throw ConfigError(std::string(ctx) + "." + key + ": expected number");
    return j.at(key).get<double>();
}

std::vector<double> flat_matrix(const json& j, const char* key, const char* ctx) {
    if (!j.contains(key)) throw ConfigError(std::string(ctx) + "." + key + ": missing field");
    std::vector<double> out;
    for (const auto& row : j.at(key)) {
        if (row.is_array())
            for (const auto& v : row) out.push_back(v.get<double>());
        else
            out.push_back(row.get<double>());
    }
    return out;
}

}  // namespace

json GameSpec::to_json() const {
    json j;
    j["dims"] = {{"d", d}, {"dprime", dprime}};
    j["horizon"] = horizon;
    j["discount"] = discount;

    json jd;
    switch (drift.family) {
        case DriftField::Family::zero:
            jd["family"] = "zero";
            break;
        case DriftField::Family::affine:
            jd["family"] = "affine";
            jd["matrix"] = drift.matrix;
            jd["offset"] = drift.offset;
            break;
    }
    j["drift"] = jd;

    json js;
    switch (diffusion.family) {
        case DiffusionField::Family::zero:
            js["family"] = "zero";
            break;
        case DiffusionField::Family::constant:
            js["family"] = "constant";
            js["matrix"] = diffusion.matrix;
            break;
        case DiffusionField::Family::diagonal_affine:
            js["family"] = "diagonal_affine";
            js["slope"] = diffusion.slope;
            js["offset"] = diffusion.offset;
            break;
        case DiffusionField::Family::diagonal_sqrt:
            js["family"] = "diagonal_sqrt";
            js["scale"] = diffusion.scale;
            break;
        case DiffusionField::Family::sqrt_growth:
            js["family"] = "sqrt_growth";
            js["scale"] = diffusion.scale;
            break;
    }
    j["diffusion"] = js;

    json jg;
    switch (g.family) {
        case TerminalPayoff::Family::zero:
            jg["family"] = "zero";
            break;
        case TerminalPayoff::Family::constant:
            jg["family"] = "constant";
            jg["value"] = g.value;
            break;
        case TerminalPayoff::Family::put:
            jg["family"] = "put";
            jg["strike"] = g.strike;
            jg["scale"] = g.scale;
            break;
        case TerminalPayoff::Family::abs_capped:
            jg["family"] = "abs_capped";
            jg["cap"] = g.cap;
            jg["scale"] = g.scale;
            break;
    }
    json jh;
    switch (h.family) {
        case RunningPayoff::Family::zero:
            jh["family"] = "zero";
            break;
        case RunningPayoff::Family::constant:
            jh["family"] = "constant";
            jh["value"] = h.value;
            break;
        case RunningPayoff::Family::quadratic:
            jh["family"] = "quadratic";
            jh["value"] = h.value;
            break;
    }
    json jf;
    switch (f.family) {
        case ControlCost::Family::constant:
            jf["family"] = "constant";
            jf["value"] = f.value;
            break;
        case ControlCost::Family::exp_decay:
            jf["family"] = "exp_decay";
            jf["amplitude"] = f.amplitude;
            jf["rate"] = f.rate;
            jf["floor"] = f.floor;
            break;
    }
    j["payoffs"] = {{"g", jg}, {"h", jh}, {"f", jf}};

    json jp;
    switch (profile.variant) {
        case ProfileVariant::A22_sublinear:
            jp["variant"] = "A22_sublinear";
            break;
        case ProfileVariant::A51_quadratic:
            jp["variant"] = "A51_quadratic";
            break;
        case ProfileVariant::A51_lipschitz_h:
            jp["variant"] = "A51_lipschitz_h";
            break;
    }
    jp["D1"] = profile.D1;
    jp["D2"] = profile.D2;
    jp["D3"] = profile.D3;
    jp["K1"] = profile.K1;
    jp["K2"] = profile.K2;
    jp["K5"] = profile.K5;
    jp["beta"] = profile.beta;
    switch (profile.sigma_structure) {
        case SigmaStructure::separable_ia:
            jp["sigma_structure"] = "separable_ia";
            break;
        case SigmaStructure::sqrt_growth_ib:
            jp["sigma_structure"] = "sqrt_growth_ib";
            break;
        case SigmaStructure::neither:
            jp["sigma_structure"] = "neither";
            break;
    }
    j["profile"] = jp;
    return j;
}

GameSpec GameSpec::from_json(const json& j) {
    GameSpec s;
    if (!j.contains("dims")) throw ConfigError("dims: missing field");
    s.d = static_cast<int>(num_at(j.at("dims"), "d", "dims"));
    s.dprime = static_cast<int>(num_at(j.at("dims"), "dprime", "dims"));
    s.horizon = num_at(j, "horizon", "spec");
    s.discount = num_at(j, "discount", "spec");

    if (!j.contains("drift")) throw ConfigError("drift: missing field");
    const json& jd = j.at("drift");
    const std::string df = str_at(jd, "family", "drift");
    if (df == "zero") {
        s.drift.family = DriftField::Family::zero;
    } else if (df == "affine") {
        s.drift.family = DriftField::Family::affine;
        s.drift.matrix = flat_matrix(jd, "matrix", "drift");
        if (jd.contains("offset")) s.drift.offset = jd.at("offset").get<std::vector<double>>();
        if (static_cast<int>(s.drift.matrix.size()) != s.d * s.d)
            throw ConfigError("drift.matrix: expected d*d entries");
    } else {
        throw ConfigError("drift.family: unknown family '" + df + "'");
    }

    if (!j.contains("diffusion")) throw ConfigError("diffusion: missing field");
    const json& js = j.at("diffusion");
    const std::string sf = str_at(js, "family", "diffusion");
    if (sf == "zero") {
        s.diffusion.family = DiffusionField::Family::zero;
    } else if (sf == "constant") {
        s.diffusion.family = DiffusionField::Family::constant;
        s.diffusion.matrix = flat_matrix(js, "matrix", "diffusion");
        if (static_cast<int>(s.diffusion.matrix.size()) != s.d * s.dprime)
            throw ConfigError("diffusion.matrix: expected d*d' entries");
    } else if (sf == "diagonal_affine") {
        s.diffusion.family = DiffusionField::Family::diagonal_affine;
        s.diffusion.slope = js.at("slope").get<std::vector<double>>();
        s.diffusion.offset = js.at("offset").get<std::vector<double>>();
    } else if (sf == "diagonal_sqrt") {
        s.diffusion.family = DiffusionField::Family::diagonal_sqrt;
        s.diffusion.scale = num_at(js, "scale", "diffusion");
    } else if (sf == "sqrt_growth") {
        s.diffusion.family = DiffusionField::Family::sqrt_growth;
        s.diffusion.scale = num_at(js, "scale", "diffusion");
    } else {
        throw ConfigError("diffusion.family: unknown family '" + sf + "'");
    }

    if (!j.contains("payoffs")) throw ConfigError("payoffs: missing field");
    const json& jp = j.at("payoffs");
    {
        const json& jg = jp.at("g");
        const std::string gf = str_at(jg, "family", "payoffs.g");
        if (gf == "zero") {
            s.g.family = TerminalPayoff::Family::zero;
        } else if (gf == "constant") {
            s.g.family = TerminalPayoff::Family::constant;
            s.g.value = num_at(jg, "value", "payoffs.g");
        } else if (gf == "put") {
            s.g.family = TerminalPayoff::Family::put;
            s.g.strike = num_at(jg, "strike", "payoffs.g");
            s.g.scale = jg.contains("scale") ? jg.at("scale").get<double>() : 1.0;
        } else if (gf == "abs_capped") {
            s.g.family = TerminalPayoff::Family::abs_capped;
            s.g.cap = num_at(jg, "cap", "payoffs.g");
            s.g.scale = jg.contains("scale") ? jg.at("scale").get<double>() : 1.0;
        } else {
            throw ConfigError("payoffs.g.family: unknown family '" + gf + "'");
        }
    }
    {
        const json& jh = jp.at("h");
        const std::string hf = str_at(jh, "family", "payoffs.h");
        if (hf == "zero") {
            s.h.family = RunningPayoff::Family::zero;
        } else if (hf == "constant") {
            s.h.family = RunningPayoff::Family::constant;
            s.h.value = num_at(jh, "value", "payoffs.h");
        } else if (hf == "quadratic") {
            s.h.family = RunningPayoff::Family::quadratic;
            s.h.value = num_at(jh, "value", "payoffs.h");
        } else {
            throw ConfigError("payoffs.h.family: unknown family '" + hf + "'");
        }
    }
    {
        const json& jf = jp.at("f");
        const std::string ff = str_at(jf, "family", "payoffs.f");
        if (ff == "constant") {
            s.f.family = ControlCost::Family::constant;
            s.f.value = num_at(jf, "value", "payoffs.f");
        } else if (ff == "exp_decay") {
            s.f.family = ControlCost::Family::exp_decay;
            s.f.amplitude = num_at(jf, "amplitude", "payoffs.f");
            s.f.rate = num_at(jf, "rate", "payoffs.f");
            s.f.floor = num_at(jf, "floor", "payoffs.f");
        } else {
            throw ConfigError("payoffs.f.family: unknown family '" + ff + "'");
        }
    }

    if (j.contains("profile")) {
        const json& pr = j.at("profile");
        const std::string v = str_at(pr, "variant", "profile");
        if (v == "A22_sublinear")
            s.profile.variant = ProfileVariant::A22_sublinear;
        else if (v == "A51_quadratic")
            s.profile.variant = ProfileVariant::A51_quadratic;
        else if (v == "A51_lipschitz_h")
            s.profile.variant = ProfileVariant::A51_lipschitz_h;
        else
            throw ConfigError("profile.variant: unknown variant '" + v + "'");
        auto opt = [&](const char* key, double dflt) {
            return pr.contains(key) ? pr.at(key).get<double>() : dflt;
        };
        s.profile.D1 = opt("D1", 1.0);
        s.profile.D2 = opt("D2", 0.0);
        s.profile.D3 = opt("D3", 1.0);
        s.profile.K1 = opt("K1", 1.0);
        s.profile.K2 = opt("K2", 1.0);
        s.profile.K5 = opt("K5", 0.0);
        s.profile.beta = opt("beta", 0.0);
        const std::string ss = pr.contains("sigma_structure")
                                   ? pr.at("sigma_structure").get<std::string>()
                                   : "neither";
        if (ss == "separable_ia")
            s.profile.sigma_structure = SigmaStructure::separable_ia;
        else if (ss == "sqrt_growth_ib")
            s.profile.sigma_structure = SigmaStructure::sqrt_growth_ib;
        else
            s.profile.sigma_structure = SigmaStructure::neither;
    }

    s.validate();
    return s;
}

GameSpec GameSpec::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open spec file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("spec file " + path + ": " + e.what());
    }
    return from_json(j);
}

}  // namespace gamelab
