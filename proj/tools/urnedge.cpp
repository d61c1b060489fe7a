// Batch front end: expansions, exact and simulated laws, comparisons,
// diagnostics and closed-form reconciliation.

#include "urnedge/catalog.hpp"
#include "urnedge/diagnostics.hpp"
#include "urnedge/edgeworth.hpp"
#include "urnedge/error.hpp"
#include "urnedge/json_io.hpp"
#include "urnedge/oracle.hpp"
#include "urnedge/special.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

using namespace urnedge;

namespace {

constexpr double kReconcileTailEps = 1e-20;

struct RunConfig {
    std::string command;
    std::string model_file;
    std::string kernel_file;
    int s = 5;
    double tail_eps = 1e-12;
    std::optional<double> qv;
    long long reps = 100000;
    std::uint64_t seed = 1;
    double umin = -3.0;
    double umax = 3.0;
    int usteps = 61;
    std::string out;
    std::string format = "csv";
    bool continuity = true;
};

json read_json_file(const std::string& path, const char* what) {
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::ConfigError, std::string("cannot open ") + what + " file '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ConfigError, std::string(what) + " file '" + path + "': " + e.what());
    }
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

class Emitter {
public:
    Emitter(const RunConfig& cfg, const GumSpec& gum, const json& kernel) : cfg_(cfg) {
        json canon = {{"command", cfg.command}, {"model", gum_to_json(gum)}, {"kernel", kernel},
                      {"s", cfg.s},             {"tail_eps", cfg.tail_eps},   {"reps", cfg.reps},
                      {"seed", cfg.seed},       {"umin", cfg.umin},           {"umax", cfg.umax},
                      {"usteps", cfg.usteps},   {"continuity", cfg.continuity}};
        if (cfg.qv)
            canon["q_v"] = *cfg.qv;
        std::ostringstream hash;
        hash << std::hex << fnv1a(canon.dump());
        meta_ = {{"command", cfg.command}, {"config_hash", hash.str()}, {"tail_eps", cfg.tail_eps}};
        if (cfg.command == "simulate")
            meta_["seed"] = cfg.seed;
        if (cfg.qv)
            meta_["q_v"] = *cfg.qv;
    }

    json& meta() { return meta_; }
    bool csv() const { return cfg_.format == "csv"; }

    std::string csv_header() const {
        std::string h;
        for (const auto& [k, v] : meta_.items())
            h += "# " + k + "=" + (v.is_string() ? v.get<std::string>() : v.dump()) + "\n";
        return h;
    }

    void write(const std::string& body) const {
        if (cfg_.out.empty()) {
            std::cout << body;
            return;
        }
        std::ofstream f(cfg_.out);
        if (!f)
            throw Error(ErrorCode::ConfigError, "cannot write '" + cfg_.out + "'");
        f << body;
    }

    void write_json(json doc) const {
        doc["metadata"] = meta_;
        write(doc.dump(2) + "\n");
    }

private:
    const RunConfig& cfg_;
    json meta_;
};

std::vector<double> u_grid(const RunConfig& cfg) {
    if (cfg.usteps < 1 || !(cfg.umax >= cfg.umin))
        throw Error(ErrorCode::ConfigError, "u-grid needs usteps >= 1 and umax >= umin");
    std::vector<double> u(cfg.usteps);
    for (int i = 0; i < cfg.usteps; ++i)
        u[i] = cfg.usteps == 1 ? cfg.umin : cfg.umin + (cfg.umax - cfg.umin) * i / (cfg.usteps - 1);
    return u;
}

std::string csv_row(std::initializer_list<double> values) {
    std::string row;
    for (double v : values)
        row += (row.empty() ? "" : ",") + format_double(v);
    return row + "\n";
}

int run(const RunConfig& cfg) {
    if (cfg.s < 3 || cfg.s > 5)
        throw Error(ErrorCode::UnsupportedOrder, "--s must be 3, 4 or 5");
    if (cfg.format != "csv" && cfg.format != "json")
        throw Error(ErrorCode::ConfigError, "--format must be csv or json");
    if (cfg.reps < 0)
        throw Error(ErrorCode::ConfigError, "--reps must be >= 0");

    const GumSpec gum = gum_from_json(read_json_file(cfg.model_file, "model"));
    const json kernel_json = cfg.kernel_file.empty() ? json{{"builtin", "power"}, {"k", 2}}
                                                     : read_json_file(cfg.kernel_file, "kernel");
    const Kernel kernel = kernel_from_json(kernel_json);
    if (gum.warning)
        std::cerr << "warning: " << *gum.warning << "\n";
    Emitter out(cfg, gum, kernel_json);

    if (cfg.command == "expand") {
        const CenteredStat c = center(gum, kernel, cfg.tail_eps);
        const ExpansionResult r = build_w(c, cfg.s);
        const auto grid = u_grid(cfg);
        if (out.csv()) {
            out.meta()["expansion"] = to_json(r);
            std::string body = out.csv_header() + "u,W" + std::to_string(cfg.s) + "\n";
            for (double u : grid)
                body += csv_row({u, cdf_expansion(r, u)});
            out.write(body);
        } else {
            json rows = json::array();
            for (double u : grid)
                rows.push_back({{"u", u}, {"W", cdf_expansion(r, u)}});
            out.write_json({{"expansion", to_json(r)}, {"grid", rows}});
        }
        return 0;
    }

    if (cfg.command == "exact") {
        const ExactDist d = exact_pmf(gum, kernel, cfg.tail_eps, cfg.qv);
        out.meta()["h"] = d.h;
        if (out.csv())
            out.write(out.csv_header() + exact_dist_csv(d));
        else
            out.write_json({{"exact", to_json(d)}});
        return 0;
    }

    if (cfg.command == "simulate") {
        if (cfg.reps < 1)
            throw Error(ErrorCode::ConfigError, "simulate needs --reps >= 1");
        const ExactDist d = sample(gum, kernel, cfg.reps, cfg.seed);
        out.meta()["reps"] = cfg.reps;
        if (out.csv()) {
            std::string body = out.csv_header() + "value,prob,cdf\n";
            double acc = 0.0;
            for (const auto& [v, p] : d.values) {
                acc += p;
                body += csv_row({v, p, acc});
            }
            out.write(body);
        } else {
            out.write_json({{"sample", to_json(d)}});
        }
        return 0;
    }

    if (cfg.command == "compare") {
        const CenteredStat c = center(gum, kernel, cfg.tail_eps);
        const ExactDist d = exact_pmf(gum, kernel, cfg.tail_eps, cfg.qv);
        const ExpansionResult w3 = build_w(c, 3), w4 = build_w(c, 4), w5 = build_w(c, 5);
        const bool lattice = cfg.continuity && d.h > 0.0;
        const Lattice L{d.z0, d.h};
        out.meta()["continuity_correction"] = lattice;
        out.meta()["h"] = d.h;
        const auto grid = u_grid(cfg);
        double sup[3] = {0.0, 0.0, 0.0};
        json rows = json::array();
        std::string body = out.csv_header() + "u,exact,W3,W4,W5,err3,err4,err5\n";
        for (double u : grid) {
            const double F = d.cdf(w3.center() + u * w3.sigma);
            const double W3 = cdf_expansion(w3, u);
            const double W4 = lattice ? lattice_cdf_corrected(w4, u, L) : cdf_expansion(w4, u);
            const double W5 = lattice ? lattice_cdf_corrected(w5, u, L) : cdf_expansion(w5, u);
            const double e[3] = {std::abs(F - W3), std::abs(F - W4), std::abs(F - W5)};
            for (int i = 0; i < 3; ++i)
                sup[i] = std::max(sup[i], e[i]);
            body += csv_row({u, F, W3, W4, W5, e[0], e[1], e[2]});
            rows.push_back({{"u", u}, {"exact", F}, {"W3", W3}, {"W4", W4}, {"W5", W5}});
        }
        if (out.csv()) {
            body += "sup,,,,," + format_double(sup[0]) + "," + format_double(sup[1]) + "," + format_double(sup[2]) + "\n";
            out.write(body);
        } else {
            out.write_json({{"rows", rows}, {"sup", {{"err3", sup[0]}, {"err4", sup[1]}, {"err5", sup[2]}}}});
        }
        return 0;
    }

    if (cfg.command == "diagnose") {
        const CenteredStat c = center(gum, kernel, cfg.tail_eps);
        const BoundReport r = gates(c, cfg.s);
        const json j = to_json(r);
        if (out.csv()) {
            std::string body = out.csv_header() + "quantity,value\n";
            for (const auto& [k, v] : j.items()) {
                if (v.is_object()) {
                    for (const auto& [k2, v2] : v.items())
                        body += k + "_" + k2 + "," + v2.dump() + "\n";
                } else {
                    body += k + "," + (v.is_number_float() ? format_double(v.get<double>()) : v.dump()) + "\n";
                }
            }
            out.write(body);
        } else {
            out.write_json({{"bounds", j}});
        }
        return 0;
    }

    if (cfg.command == "catalog") {
        // Closed forms are reconciled at 1e-9; truncation error of the engine
        // moments grows like tail_eps times a power of the window, hence the cap.
        const double tail = std::min(cfg.tail_eps, kReconcileTailEps);
        out.meta()["tail_eps"] = tail;
        const CenteredStat c = center(gum, kernel, tail);
        json params;
        std::vector<ParamField> fields;
        const bool power2 = std::holds_alternative<PowerKernel>(kernel.variant())
                            && std::get<PowerKernel>(kernel.variant()).k == 2;
        if (gum.family == Family::Poisson && power2) {
            const ChiSqParams p = chisq_closed_form(gum.n, gum.shapes);
            params = to_json(p);
            fields = p.fields();
        } else if (gum.family == Family::Binomial && kernel.randomized()) {
            std::vector<std::array<double, 4>> moments;
            for (int m = 0; m < gum.size(); ++m)
                moments.push_back(raw_moments(kernel.increment_law(m)));
            const SampleSumParams p = samplesum_closed_form(gum.shapes, moments, gum.n);
            params = to_json(p);
            fields = p.fields();
        } else if (gum.family == Family::NegBinomial && power2) {
            const double k = gum.shapes.front();
            for (double d : gum.shapes)
                if (d != k || k != std::round(k))
                    throw Error(ErrorCode::ConfigError, "Dixon needs equal integer cell orders");
            const int ki = static_cast<int>(k);
            const DixonParams p = dixon_closed_form(gum.size() * ki, gum.n, ki);
            params = to_json(p);
            fields = p.fields();
        } else {
            throw Error(ErrorCode::ConfigError,
                        "no closed form for this model and kernel (chi-square, sample sum or Dixon)");
        }
        const DiffReport diff = cross_check(fields, c, 1e-9, false);
        if (out.csv()) {
            std::string body = out.csv_header() + "label,printed,n_power,reconciled,engine,rel_diff,suspected_typo,within_tol\n";
            for (const DiffRow& r : diff.rows)
                body += "\"" + r.field.label + "\"," + format_double(r.field.printed) + "," + format_double(r.field.n_power)
                        + "," + format_double(r.reconciled) + "," + format_double(r.engine) + ","
                        + format_double(r.rel_diff) + "," + (r.field.suspected_typo ? "1" : "0") + ","
                        + (r.within_tol ? "1" : "0") + "\n";
            out.write(body);
        } else {
            out.write_json({{"params", params}, {"diff", to_json(diff)}});
        }
        if (!diff.ok())
            throw Error(ErrorCode::MismatchBeyondTolerance, "unflagged closed-form field disagrees with the engine");
        return 0;
    }

    throw Error(ErrorCode::ConfigError, "unknown command '" + cfg.command + "'");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Edgeworth expansions for decomposable statistics in generalized urn models"};
    app.require_subcommand(1, 1);
    RunConfig cfg;
    double qv = 0.0;
    std::string continuity = "on";

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--model", cfg.model_file, "model JSON file")->required();
        sub->add_option("--kernel", cfg.kernel_file, "kernel JSON file (default: power 2)");
        sub->add_option("--s", cfg.s, "expansion order 3, 4 or 5");
        sub->add_option("--tail-eps", cfg.tail_eps, "omitted tail probability per cell");
        sub->add_option("--qv", qv, "value lattice step (bins kernel values)");
        sub->add_option("--reps", cfg.reps, "Monte-Carlo repetitions");
        sub->add_option("--seed", cfg.seed, "64-bit seed");
        sub->add_option("--umin", cfg.umin, "left end of the u grid");
        sub->add_option("--umax", cfg.umax, "right end of the u grid");
        sub->add_option("--usteps", cfg.usteps, "number of grid points");
        sub->add_option("--out", cfg.out, "output file (default: stdout)");
        sub->add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--continuity", continuity, "lattice continuity correction in compare")
            ->check(CLI::IsMember({"on", "off"}));
    };
    const std::pair<const char*, const char*> commands[] = {
        {"expand", "CDF expansion W_s on a u grid"},
        {"exact", "exact conditional law by dynamic programming"},
        {"simulate", "Monte-Carlo law from the urn scheme"},
        {"compare", "exact CDF against W3, W4, W5 with sup errors"},
        {"diagnose", "normalized moments, M_N, Lindeberg and bound ingredients"},
        {"catalog", "closed-form parameters reconciled with the engine"},
    };
    for (const auto& [name, what] : commands)
        add_common(app.add_subcommand(name, what));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    cfg.command = app.get_subcommands().front()->get_name();
    if (qv > 0.0)
        cfg.qv = qv;
    cfg.continuity = continuity == "on";

    try {
        return run(cfg);
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return is_numerical(e.code()) ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "ConfigError: " << e.what() << "\n";
        return 1;
    }
}
