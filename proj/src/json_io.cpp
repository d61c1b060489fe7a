#include "urnedge/json_io.hpp"

#include "urnedge/error.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace urnedge {

namespace {

template <typename T>
T require(const json& j, const char* key) {
    if (!j.contains(key))
        throw Error(ErrorCode::ConfigError, std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ConfigError, std::string("field '") + key + "': " + e.what());
    }
}

// JSON has no infinity; report it as null.
json number(double v) {
    if (std::isfinite(v))
        return v;
    return nullptr;
}

} // namespace

GumSpec gum_from_json(const json& j) {
    if (!j.is_object())
        throw Error(ErrorCode::ConfigError, "model must be a JSON object");
    const Family family = parse_family(require<std::string>(j, "family"));
    const auto shapes = require<std::vector<double>>(j, "shapes");
    const int n = require<int>(j, "n");
    if (j.contains("nu"))
        return make_gum(family, shapes, n, require<double>(j, "nu"));
    return calibrate(family, shapes, n);
}

json gum_to_json(const GumSpec& gum) {
    return {{"family", std::string(family_name(gum.family))}, {"shapes", gum.shapes}, {"n", gum.n}};
}

Kernel kernel_from_json(const json& j) {
    if (!j.is_object())
        throw Error(ErrorCode::ConfigError, "kernel must be a JSON object");
    if (j.contains("builtin")) {
        const auto name = require<std::string>(j, "builtin");
        if (name == "power")
            return Kernel::power(require<int>(j, "k"));
        if (name == "indicator")
            return Kernel::indicator(require<int>(j, "r"));
        throw Error(ErrorCode::ConfigError, "unknown builtin kernel '" + name + "'");
    }
    if (j.contains("tables"))
        return Kernel::tables(require<std::vector<std::vector<double>>>(j, "tables"));
    if (j.contains("compound")) {
        std::vector<DiscreteLaw> laws;
        for (const json& l : j.at("compound")) {
            DiscreteLaw law{require<std::vector<double>>(l, "support"), require<std::vector<double>>(l, "probs")};
            validate_law(law);
            laws.push_back(std::move(law));
        }
        return Kernel::compound(std::move(laws));
    }
    throw Error(ErrorCode::ConfigError, "kernel needs one of 'builtin', 'tables', 'compound'");
}

json kernel_to_json(const Kernel& kernel) {
    return std::visit(
        [](const auto& k) -> json {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, PowerKernel>)
                return {{"builtin", "power"}, {"k", k.k}};
            else if constexpr (std::is_same_v<K, IndicatorKernel>)
                return {{"builtin", "indicator"}, {"r", k.r}};
            else if constexpr (std::is_same_v<K, TableKernel>)
                return {{"tables", k.tables}};
            else {
                json laws = json::array();
                for (const DiscreteLaw& l : k.laws)
                    laws.push_back({{"support", l.support}, {"probs", l.probs}});
                return {{"compound", laws}};
            }
        },
        kernel.variant());
}

json to_json(const ExpansionResult& r) {
    json monomials = json::array();
    const Eigen::VectorXd c = r.W.t_coefficients();
    for (Eigen::Index a = 0; a < c.size(); ++a)
        if (c(a) != 0.0)
            monomials.push_back({{"a", a}, {"coeff", c(a)}});
    json prov = json::object();
    for (const auto& [k, v] : r.provenance)
        prov[k] = v;
    return {{"s", r.s},         {"x_N", r.xN},        {"monomials", monomials}, {"Lambda_N", r.Lambda},
            {"gamma_N", r.gamma}, {"sigma_N", r.sigma}, {"B_N", r.B},              {"provenance", prov}};
}

json to_json(const BoundReport& r) {
    json beta = json::object(), kappa = json::object();
    for (const auto& [k, v] : r.beta)
        beta[k] = v;
    for (const auto& [k, v] : r.kappa)
        kappa[k] = v;
    return {
        {"s", r.s},
        {"delta", r.delta},
        {"eps", r.eps},
        {"beta", beta},
        {"kappa", kappa},
        {"T_upsilon", number(r.T_upsilon)},
        {"M_upsilon", number(r.M_upsilon)},
        {"T_script_E", number(r.T_script_E)},
        {"M_script_E", number(r.M_script_E)},
        {"upsilon", number(r.upsilon)},
        {"E_delta", number(r.E_delta)},
        {"E_one", number(r.E_one)},
        {"T_N", number(r.T_N)},
        {"L2", r.lindeberg.L2},
        {"script_L1", r.lindeberg.script_L1},
        {"script_L2", r.lindeberg.script_L2},
        {"normal_approx_rhs", number(r.normal_approx_rhs)},
        {"expansion_rhs_partial", number(r.expansion_rhs_partial)},
        {"chi_term_omitted", r.chi_term_omitted},
    };
}

json to_json(const ExactDist& d) {
    json values = json::array();
    for (const auto& [v, p] : d.values)
        values.push_back({v, p});
    json out = {{"z0", d.z0},
                {"h", d.h},
                {"values", values},
                {"total_prob_check", d.total_prob_check},
                {"tail_eps", d.tail_eps},
                {"q_v", d.q_v}};
    if (d.seed) {
        out["seed"] = *d.seed;
        out["reps"] = d.reps;
    } else {
        out["local_mass"] = d.local_mass;
    }
    return out;
}

namespace {

json fields_json(const std::vector<ParamField>& fields) {
    json out = json::array();
    for (const ParamField& f : fields)
        out.push_back({{"label", f.label},
                       {"key", f.key},
                       {"printed", number(f.printed)},
                       {"n_power", f.n_power},
                       {"suspected_typo", f.suspected_typo},
                       {"note", f.note}});
    return out;
}

} // namespace

json to_json(const ChiSqParams& p) {
    json P = json::object();
    for (int i = 2; i <= 6; ++i)
        P[std::to_string(i)] = p.P[i];
    return {{"application", "chisq"}, {"n", p.n},           {"N", p.N},         {"lambda", p.lambda},
            {"P", P},                 {"degenerate", p.degenerate}, {"fields", fields_json(p.fields())}};
}

json to_json(const SampleSumParams& p) {
    return {{"application", "samplesum"},
            {"n", p.n},
            {"N", p.N},
            {"Omega", p.Omega},
            {"p", p.p},
            {"beta_3_upper_bound", number(p.beta_bound(1.0))},
            {"fields", fields_json(p.fields())}};
}

json to_json(const DixonParams& p) {
    return {{"application", "dixon"},
            {"M", p.M},
            {"n", p.n},
            {"k", p.k},
            {"N", p.N},
            {"leftover", p.leftover},
            {"rho", p.rho},
            {"g_kernel", {{"quadratic", p.g_quadratic}, {"linear", p.g_linear}, {"constant", p.g_constant}}},
            {"fields", fields_json(p.fields())}};
}

json to_json(const DiffReport& r) {
    json rows = json::array();
    for (const DiffRow& row : r.rows)
        rows.push_back({{"label", row.field.label},
                        {"reconciled", number(row.reconciled)},
                        {"engine", number(row.engine)},
                        {"rel_diff", number(row.rel_diff)},
                        {"suspected_typo", row.field.suspected_typo},
                        {"within_tol", row.within_tol},
                        {"note", row.field.note}});
    return {{"tol", r.tol}, {"ok", r.ok()}, {"flagged", r.flagged_count()}, {"rows", rows}};
}

std::string format_double(double v) {
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string exact_dist_csv(const ExactDist& d) {
    std::string out = "value,prob\n";
    for (const auto& [v, p] : d.values)
        out += format_double(v) + "," + format_double(p) + "\n";
    return out;
}

} // namespace urnedge
