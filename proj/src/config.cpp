#include "patchbeam/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "patchbeam/errors.hpp"

namespace patchbeam {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("bad numeric value for " + key + ": '" + v + "'");
    }
}

int to_int(const std::string& key, const std::string& v) {
    const double x = to_double(key, v);
    if (x != std::floor(x)) throw ConfigError("value for " + key + " must be an integer");
    return static_cast<int>(x);
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item)));
    if (out.empty()) throw ConfigError("empty list for " + key);
    return out;
}

// Raw key/value capture before the material and shapes are assembled.
struct RawConfig {
    std::map<std::string, std::string> kv;
    bool has(const std::string& k) const { return kv.count(k) > 0; }
    const std::string& get(const std::string& k) const { return kv.at(k); }
};

SectionShape parse_shape(const RawConfig& raw, const std::string& prefix,
                         const SectionShape& fallback) {
    SectionShape s = fallback;
    if (raw.has(prefix + ".shape")) {
        const std::string v = raw.get(prefix + ".shape");
        if (v == "disc")
            s.kind = SectionShape::Kind::Disc;
        else if (v == "rect")
            s.kind = SectionShape::Kind::Rect;
        else
            throw ConfigError(prefix + ".shape must be disc or rect");
    }
    if (raw.has(prefix + ".radius")) s.radius = to_double(prefix + ".radius", raw.get(prefix + ".radius"));
    if (raw.has(prefix + ".a")) s.a = to_double(prefix + ".a", raw.get(prefix + ".a"));
    if (raw.has(prefix + ".b")) s.b = to_double(prefix + ".b", raw.get(prefix + ".b"));
    return s;
}

const std::vector<std::string>& voigt_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (int i = 1; i <= 6; ++i)
            for (int j = i; j <= 6; ++j)
                k.push_back("material.c" + std::to_string(i) + std::to_string(j));
        return k;
    }();
    return keys;
}

}  // namespace

bool StudyConfig::has_load() const {
    const bool f0 = f[0].is_zero() && f[1].is_zero() && f[2].is_zero();
    const bool h0 = std::all_of(h.begin(), h.end(), [](const Expr& e) { return e.is_zero(); });
    return !(f0 && h0);
}

void StudyConfig::validate() const {
    if (eps_list.empty()) throw ConfigError("sweep.eps must not be empty");
    for (double e : eps_list)
        if (!(e > 0.0)) throw ConfigError("sweep.eps entries must be positive");
    for (std::size_t i = 1; i < eps_list.size(); ++i)
        if (!(eps_list[i] < eps_list[i - 1]))
            throw ConfigError("sweep.eps must be strictly decreasing");
    if (axial_n < 4) throw ConfigError("mesh.axial_n must be at least 4");
    if (!(section_h > 0.0) || !(limit_section_h > 0.0))
        throw ConfigError("section target sizes must be positive");
    if (!(grading >= 1.0) || !(capacity_grading >= 1.0))
        throw ConfigError("grading ratios must be >= 1");
    if (patch_divisions < 1) throw ConfigError("mesh.patch_divisions must be positive");
    if (limit_n_axial < 4) throw ConfigError("limit.n_axial must be at least 4");
    if (!(tol > 0.0)) throw ConfigError("solver.tol must be positive");
    if (maxit_factor < 1) throw ConfigError("solver.maxit_factor must be positive");
    if (threads < 1) throw ConfigError("threads must be positive");
    for (std::size_t i = 0; i < capacity_L.size(); ++i) {
        if (!(capacity_L[i] > 0.0)) throw ConfigError("capacity.L entries must be positive");
        if (i > 0 && !(capacity_L[i] > capacity_L[i - 1]))
            throw ConfigError("capacity.L must be strictly increasing");
    }
    section.outer.validate();
    section.patch.validate();

    // The patch r_eps * S0 must fit inside S at the largest eps.
    const RegimeSpec reg = regime();
    const double r0 = reg.r_eps(eps_list.front());
    for (int axis = 0; axis < 2; ++axis)
        if (!(r0 * section.patch.half_extent(axis) < section.outer.half_extent(axis)))
            throw ConfigError("patch r_eps * S0 does not fit inside S at the largest eps");
}

StudyConfig parse_config_text(const std::string& text) {
    RawConfig raw;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        if (raw.kv.count(key))
            throw ConfigError("duplicate key: " + key);
        raw.kv[key] = value;
    }

    StudyConfig cfg;
    std::map<std::string, std::function<void(const std::string&, const std::string&)>> setters;
    auto dbl = [&](const std::string& k, double& target) {
        setters[k] = [&target](const std::string& key, const std::string& v) {
            target = to_double(key, v);
        };
    };
    auto intval = [&](const std::string& k, int& target) {
        setters[k] = [&target](const std::string& key, const std::string& v) {
            target = to_int(key, v);
        };
    };
    auto expr = [&](const std::string& k, Expr& target) {
        setters[k] = [&target](const std::string&, const std::string& v) {
            target = Expr::parse(v);
        };
    };

    // Material keys are handled after the scan; shapes likewise.
    setters["material.kind"] = [](const std::string&, const std::string&) {};
    setters["material.young"] = setters["material.kind"];
    setters["material.poisson"] = setters["material.kind"];
    setters["material.modulation"] = setters["material.kind"];
    for (const auto& k : voigt_keys()) setters[k] = setters["material.kind"];
    for (const char* k : {"section.shape", "section.radius", "section.a", "section.b",
                          "patch.shape", "patch.radius", "patch.a", "patch.b"})
        setters[k] = setters["material.kind"];

    expr("load.f1", cfg.f[0]);
    expr("load.f2", cfg.f[1]);
    expr("load.f3", cfg.f[2]);
    expr("load.h11", cfg.h[0]);
    expr("load.h22", cfg.h[1]);
    expr("load.h33", cfg.h[2]);
    expr("load.h23", cfg.h[3]);
    expr("load.h13", cfg.h[4]);
    expr("load.h12", cfg.h[5]);
    dbl("regime.kappa", cfg.kappa);
    setters["regime.p"] = [&cfg](const std::string&, const std::string& v) {
        cfg.p = Rational::parse(v);
    };
    setters["sweep.eps"] = [&cfg](const std::string& key, const std::string& v) {
        cfg.eps_list = to_list(key, v);
    };
    intval("mesh.axial_n", cfg.axial_n);
    dbl("mesh.section_h", cfg.section_h);
    dbl("mesh.grading", cfg.grading);
    intval("mesh.patch_divisions", cfg.patch_divisions);
    intval("limit.n_axial", cfg.limit_n_axial);
    dbl("limit.section_h", cfg.limit_section_h);
    setters["capacity.L"] = [&cfg](const std::string& key, const std::string& v) {
        cfg.capacity_L = to_list(key, v);
    };
    dbl("capacity.core_h", cfg.capacity_core_h);
    dbl("capacity.grading", cfg.capacity_grading);
    dbl("solver.tol", cfg.tol);
    intval("solver.maxit_factor", cfg.maxit_factor);
    intval("threads", cfg.threads);
    setters["output.dir"] = [&cfg](const std::string&, const std::string& v) { cfg.out_dir = v; };

    for (const auto& [key, value] : raw.kv) {
        const auto it = setters.find(key);
        if (it == setters.end()) throw ConfigError("unknown key: " + key);
        it->second(key, value);
    }

    // Material.
    const std::string kind = raw.has("material.kind") ? raw.get("material.kind") : "isotropic";
    if (kind == "isotropic") {
        const double young =
            raw.has("material.young") ? to_double("material.young", raw.get("material.young")) : 1.0;
        const double poisson =
            raw.has("material.poisson") ? to_double("material.poisson", raw.get("material.poisson"))
                                        : 0.3;
        try {
            cfg.material = MaterialField::isotropic(young, poisson);
        } catch (const MaterialError& e) {
            throw ConfigError(e.what());
        }
        if (raw.has("material.modulation"))
            cfg.material.set_modulation(Expr::parse(raw.get("material.modulation")));
    } else if (kind == "voigt") {
        if (raw.has("material.modulation"))
            throw ConfigError("material.modulation applies to isotropic materials only");
        Eigen::Matrix<double, 21, 1> upper;
        int k = 0;
        for (const auto& key : voigt_keys()) {
            if (!raw.has(key)) throw ConfigError("missing full-Voigt coefficient " + key);
            upper[k++] = to_double(key, raw.get(key));
        }
        try {
            cfg.material = MaterialField::full_voigt(upper);
        } catch (const MaterialError& e) {
            throw ConfigError(e.what());
        }
    } else {
        throw ConfigError("material.kind must be isotropic or voigt");
    }

    // Shapes: S defaults to the unit disc, S0 to the unit disc.
    cfg.section.outer = parse_shape(raw, "section", SectionShape::disc(1.0));
    cfg.section.patch = parse_shape(raw, "patch", SectionShape::disc(1.0));

    cfg.validate();
    return cfg;
}

StudyConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

}  // namespace patchbeam
