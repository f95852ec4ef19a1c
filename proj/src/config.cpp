#include "pertspec/config.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "json.hpp"
#include "pertspec/errors.hpp"

namespace pertspec {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Reading

void only_keys(const json& obj, const std::string& path, std::initializer_list<std::string_view> allowed) {
    for (const auto& item : obj.items())
        if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
            throw ParseError(path + "." + item.key(), "unknown key");
}

const json& require_object(const json& j, const std::string& path) {
    if (!j.is_object()) throw ParseError(path, "expected an object");
    return j;
}

const json& member(const json& obj, const std::string& key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(path + "." + key, "missing required key");
    return *it;
}

const json* optional_member(const json& obj, const std::string& key) {
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

double get_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ParseError(path, "expected a number");
    return j.get<double>();
}

bool get_bool(const json& j, const std::string& path) {
    if (!j.is_boolean()) throw ParseError(path, "expected true or false");
    return j.get<bool>();
}

std::size_t get_count(const json& j, const std::string& path) {
    if (!j.is_number_integer() || j.get<long long>() < 0) throw ParseError(path, "expected a non-negative integer");
    return j.get<std::size_t>();
}

std::string get_string(const json& j, const std::string& path) {
    if (!j.is_string()) throw ParseError(path, "expected a string");
    return j.get<std::string>();
}

/// A complex number is a plain number or a pair [re, im].
Complex get_complex(const json& j, const std::string& path) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    throw ParseError(path, "expected a number or a pair [re, im]");
}

ComplexMatrix get_matrix(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) throw ParseError(path, "expected a non-empty array of rows");
    const std::size_t rows = j.size();
    std::size_t cols = 0;
    CVector entries;
    for (std::size_t i = 0; i < rows; ++i) {
        const std::string rp = path + "[" + std::to_string(i) + "]";
        if (!j[i].is_array() || j[i].empty()) throw ParseError(rp, "expected a non-empty row");
        if (i == 0) cols = j[i].size();
        if (j[i].size() != cols) throw ParseError(rp, "row length differs from the first row");
        for (std::size_t c = 0; c < cols; ++c)
            entries.push_back(get_complex(j[i][c], rp + "[" + std::to_string(c) + "]"));
    }
    try {
        return ComplexMatrix(rows, cols, std::move(entries));
    } catch (const Error& e) {
        throw ParseError(path, e.what());
    }
}

BoundaryFunctional get_functional(const json& j, const std::string& path) {
    if (!j.is_array()) throw ParseError(path, "expected a list of terms");
    BoundaryFunctional f;
    for (std::size_t t = 0; t < j.size(); ++t) {
        const std::string tp = path + "[" + std::to_string(t) + "]";
        const json& term = require_object(j[t], tp);
        const json* weight = optional_member(term, "weight");
        const json* delay = optional_member(term, "delay");
        const Complex w = weight ? get_complex(*weight, tp + ".weight") : Complex{1.0, 0.0};
        const double tau = delay ? get_number(*delay, tp + ".delay") : 0.0;
        if (const json* loc = optional_member(term, "point")) {
            only_keys(term, tp, {"point", "order", "weight", "delay"});
            int order = 0;
            if (const json* o = optional_member(term, "order")) {
                if (!o->is_number_integer()) throw ParseError(tp + ".order", "expected an integer");
                order = o->get<int>();
            }
            f.points.push_back({get_number(*loc, tp + ".point"), order, w, tau});
        } else if (const json* shape = optional_member(term, "integral")) {
            only_keys(term, tp, {"integral", "rate", "weight", "delay"});
            const std::string s = get_string(*shape, tp + ".integral");
            if (s == "const") {
                if (optional_member(term, "rate")) throw ParseError(tp + ".rate", "constant integrals take no rate");
                f.integrals.push_back({IntegralWeight::constant, {}, w, tau});
            } else if (s == "exp") {
                const Complex rate = get_complex(member(term, "rate", tp), tp + ".rate");
                f.integrals.push_back({IntegralWeight::exponential, rate, w, tau});
            } else {
                throw ParseError(tp + ".integral", "expected \"const\" or \"exp\", got \"" + s + "\"");
            }
        } else {
            throw ParseError(tp, "term needs a \"point\" or an \"integral\" key");
        }
    }
    return f;
}

Rectangle get_region(const json& j, const std::string& path) {
    require_object(j, path);
    only_keys(j, path, {"re", "im"});
    auto interval = [&](const char* key) {
        const json& v = member(j, key, path);
        const std::string p = path + "." + key;
        if (!v.is_array() || v.size() != 2) throw ParseError(p, "expected [low, high]");
        return std::pair{get_number(v[0], p + "[0]"), get_number(v[1], p + "[1]")};
    };
    const auto [a, b] = interval("re");
    const auto [c, d] = interval("im");
    return {{a, c}, {b, d}};
}

ProblemKind get_kind(const json& p, const std::string& path) {
    const std::string name = get_string(member(p, "kind", path), path + ".kind");
    const std::initializer_list<std::string_view> common{"kind", "psi", "region", "tolerances"};
    auto allow = [&](std::initializer_list<std::string_view> extra) {
        std::vector<std::string_view> keys(common);
        keys.insert(keys.end(), extra.begin(), extra.end());
        for (const auto& item : p.items())
            if (std::find(keys.begin(), keys.end(), item.key()) == keys.end())
                throw ParseError(path + "." + item.key(), "unknown key for kind " + name);
    };
    if (name == "first_derivative") {
        allow({});
        return FirstDerivative{};
    }
    if (name == "second_derivative") {
        allow({});
        return SecondDerivative{};
    }
    if (name == "convection_diffusion") {
        allow({"c", "k"});
        ConvectionDiffusion cd;
        if (const json* c = optional_member(p, "c")) cd.c = get_complex(*c, path + ".c");
        if (const json* k = optional_member(p, "k")) cd.k = get_complex(*k, path + ".k");
        return cd;
    }
    if (name == "boundary_delay_heat") {
        allow({"atoms"});
        BoundaryDelayHeat heat;
        const json& atoms = member(p, "atoms", path);
        if (!atoms.is_array()) throw ParseError(path + ".atoms", "expected a list");
        for (std::size_t i = 0; i < atoms.size(); ++i) {
            const std::string ap = path + ".atoms[" + std::to_string(i) + "]";
            require_object(atoms[i], ap);
            only_keys(atoms[i], ap, {"r", "w"});
            DelayAtom a;
            a.r = get_number(member(atoms[i], "r", ap), ap + ".r");
            if (const json* w = optional_member(atoms[i], "w")) a.w = get_complex(*w, ap + ".w");
            heat.atoms.push_back(a);
        }
        return heat;
    }
    if (name == "delay_system") {
        allow({"A", "lags"});
        DelaySystem d;
        d.a = get_matrix(member(p, "A", path), path + ".A");
        if (const json* lags = optional_member(p, "lags")) {
            if (!lags->is_array()) throw ParseError(path + ".lags", "expected a list");
            for (std::size_t i = 0; i < lags->size(); ++i) {
                const std::string lp = path + ".lags[" + std::to_string(i) + "]";
                require_object((*lags)[i], lp);
                only_keys((*lags)[i], lp, {"tau", "A"});
                d.lags.push_back({get_number(member((*lags)[i], "tau", lp), lp + ".tau"),
                                  get_matrix(member((*lags)[i], "A", lp), lp + ".A")});
            }
        }
        return d;
    }
    if (name == "quadratic_pencil") {
        allow({"A", "P"});
        return QuadraticPencil{get_matrix(member(p, "A", path), path + ".A"),
                               get_matrix(member(p, "P", path), path + ".P")};
    }
    throw ParseError(path + ".kind", "unknown problem kind \"" + name + "\"");
}

ProblemSpec get_problem(const json& p, const std::string& path) {
    require_object(p, path);
    ProblemSpec spec;
    spec.kind = get_kind(p, path);
    if (const json* psi = optional_member(p, "psi")) {
        if (!psi->is_array()) throw ParseError(path + ".psi", "expected a list of functionals");
        for (std::size_t i = 0; i < psi->size(); ++i)
            spec.psi.push_back(get_functional((*psi)[i], path + ".psi[" + std::to_string(i) + "]"));
    }
    spec.region = get_region(member(p, "region", path), path + ".region");
    if (const json* tol = optional_member(p, "tolerances")) {
        const std::string tp = path + ".tolerances";
        require_object(*tol, tp);
        only_keys(*tol, tp, {"root", "residual"});
        if (const json* r = optional_member(*tol, "root")) spec.tolerances.root = get_number(*r, tp + ".root");
        if (const json* r = optional_member(*tol, "residual"))
            spec.tolerances.residual = get_number(*r, tp + ".residual");
    }
    return spec;
}

// ---------------------------------------------------------------------------
// Writing

ojson put_complex(Complex z) {
    if (z.imag() == 0.0) return z.real();
    return ojson::array({z.real(), z.imag()});
}

ojson put_matrix(const ComplexMatrix& m) {
    ojson rows = ojson::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        ojson row = ojson::array();
        for (Complex z : m.row(i)) row.push_back(put_complex(z));
        rows.push_back(std::move(row));
    }
    return rows;
}

ojson put_functional(const BoundaryFunctional& f) {
    ojson terms = ojson::array();
    for (const PointTerm& p : f.points) {
        ojson t;
        t["point"] = p.location;
        t["order"] = p.order;
        t["weight"] = put_complex(p.weight);
        t["delay"] = p.delay;
        terms.push_back(std::move(t));
    }
    for (const IntegralTerm& i : f.integrals) {
        ojson t;
        t["integral"] = i.shape == IntegralWeight::constant ? "const" : "exp";
        if (i.shape == IntegralWeight::exponential) t["rate"] = put_complex(i.rate);
        t["weight"] = put_complex(i.weight);
        t["delay"] = i.delay;
        terms.push_back(std::move(t));
    }
    return terms;
}

ojson put_problem(const ProblemSpec& spec) {
    ojson p;
    p["kind"] = kind_name(spec.kind);
    std::visit(
        [&](const auto& k) {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, ConvectionDiffusion>) {
                p["c"] = put_complex(k.c);
                p["k"] = put_complex(k.k);
            } else if constexpr (std::is_same_v<K, BoundaryDelayHeat>) {
                ojson atoms = ojson::array();
                for (const DelayAtom& a : k.atoms) {
                    ojson atom;
                    atom["r"] = a.r;
                    atom["w"] = put_complex(a.w);
                    atoms.push_back(std::move(atom));
                }
                p["atoms"] = std::move(atoms);
            } else if constexpr (std::is_same_v<K, DelaySystem>) {
                p["A"] = put_matrix(k.a);
                ojson lags = ojson::array();
                for (const DelayLag& l : k.lags) {
                    ojson lag;
                    lag["tau"] = l.tau;
                    lag["A"] = put_matrix(l.a);
                    lags.push_back(std::move(lag));
                }
                p["lags"] = std::move(lags);
            } else if constexpr (std::is_same_v<K, QuadraticPencil>) {
                p["A"] = put_matrix(k.a);
                p["P"] = put_matrix(k.p);
            }
        },
        spec.kind);
    ojson psi = ojson::array();
    for (const BoundaryFunctional& f : spec.psi) psi.push_back(put_functional(f));
    p["psi"] = std::move(psi);
    p["region"]["re"] = {spec.region.lower_left.real(), spec.region.upper_right.real()};
    p["region"]["im"] = {spec.region.lower_left.imag(), spec.region.upper_right.imag()};
    p["tolerances"]["root"] = spec.tolerances.root;
    p["tolerances"]["residual"] = spec.tolerances.residual;
    return p;
}

}  // namespace

void JobConfig::validate() const {
    problem.validate();
    if (oracle.grid < 64) throw ValidationError("oracle.grid must be at least 64");
    if (!(oracle.match_tolerance > 0.0)) throw ValidationError("oracle.match_tolerance must be positive");
    if (outputs.f_grid.enabled() && (outputs.f_grid.nx < 2 || outputs.f_grid.ny < 2))
        throw ValidationError("outputs.f_grid needs at least 2 x 2 samples");
    if (outputs.f_grid.enabled() != (outputs.f_grid.nx > 0 || outputs.f_grid.ny > 0))
        throw ValidationError("outputs.f_grid: nx and ny must both be positive");
}

JobConfig parse_config(std::string_view text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError("$", std::string("malformed JSON: ") + e.what());
    }
    require_object(root, "$");
    only_keys(root, "$", {"problem", "outputs", "oracle", "seed"});

    JobConfig config;
    config.problem = get_problem(member(root, "problem", "$"), "problem");
    if (const json* out = optional_member(root, "outputs")) {
        require_object(*out, "outputs");
        only_keys(*out, "outputs", {"roots", "f_grid", "oracle_comparison"});
        if (const json* r = optional_member(*out, "roots")) config.outputs.roots = get_bool(*r, "outputs.roots");
        if (const json* o = optional_member(*out, "oracle_comparison"))
            config.outputs.oracle_comparison = get_bool(*o, "outputs.oracle_comparison");
        if (const json* g = optional_member(*out, "f_grid"); g && !g->is_null()) {
            require_object(*g, "outputs.f_grid");
            only_keys(*g, "outputs.f_grid", {"nx", "ny"});
            config.outputs.f_grid.nx = get_count(member(*g, "nx", "outputs.f_grid"), "outputs.f_grid.nx");
            config.outputs.f_grid.ny = get_count(member(*g, "ny", "outputs.f_grid"), "outputs.f_grid.ny");
        }
    }
    if (const json* o = optional_member(root, "oracle")) {
        require_object(*o, "oracle");
        only_keys(*o, "oracle", {"enabled", "grid", "match_tolerance"});
        if (const json* e = optional_member(*o, "enabled")) config.oracle.enabled = get_bool(*e, "oracle.enabled");
        if (const json* g = optional_member(*o, "grid")) config.oracle.grid = get_count(*g, "oracle.grid");
        if (const json* m = optional_member(*o, "match_tolerance"))
            config.oracle.match_tolerance = get_number(*m, "oracle.match_tolerance");
    }
    if (const json* s = optional_member(root, "seed")) {
        if (!s->is_number_unsigned()) throw ParseError("seed", "expected a non-negative integer");
        config.seed = s->get<std::uint64_t>();
    }
    config.validate();
    return config;
}

JobConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read configuration " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

std::string serialize_config(const JobConfig& config) {
    ojson root;
    root["problem"] = put_problem(config.problem);
    root["outputs"]["roots"] = config.outputs.roots;
    if (config.outputs.f_grid.enabled()) {
        root["outputs"]["f_grid"]["nx"] = config.outputs.f_grid.nx;
        root["outputs"]["f_grid"]["ny"] = config.outputs.f_grid.ny;
    } else {
        root["outputs"]["f_grid"] = nullptr;
    }
    root["outputs"]["oracle_comparison"] = config.outputs.oracle_comparison;
    root["oracle"]["enabled"] = config.oracle.enabled;
    root["oracle"]["grid"] = config.oracle.grid;
    root["oracle"]["match_tolerance"] = config.oracle.match_tolerance;
    root["seed"] = config.seed;
    return root.dump(2) + "\n";
}

}  // namespace pertspec
