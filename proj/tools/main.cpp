// knlayer: run half-space moment problems, order sweeps, and profile dumps.

#include <cstdio>
#include <ctime>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include <knlayer/errors.hpp>
#include <knlayer/problems.hpp>

namespace {

using knlayer::ProblemConfig;
using knlayer::ProblemKind;
using ojson = nlohmann::ordered_json;

struct CommonOpts {
    std::string problem = "kramers";
    std::string model = "bgk";
    std::string bc = "new";
    double prandtl = -1.0; // <0 = not given
    double chi = 1.0;
    double drive = -1.0;
};

void add_common_flags(CLI::App *cmd, CommonOpts &o) {
    cmd->add_option("--problem", o.problem, "Problem to solve")
        ->check(CLI::IsMember({"kramers", "thermal-slip", "temperature-jump"}));
    cmd->add_option("--model", o.model, "Collision model")
        ->check(CLI::IsMember({"bgk", "shakhov"}));
    cmd->add_option("--prandtl", o.prandtl, "Prandtl number (shakhov; default 2/3)");
    cmd->add_option("--chi", o.chi, "Accommodation coefficient in (0,1]");
    cmd->add_option("--bc", o.bc, "Wall condition flavour")
        ->check(CLI::IsMember({"new", "grad"}));
    cmd->add_option("--drive", o.drive, "Prescribed wall datum (nonzero)");
}

ProblemConfig to_config(const CommonOpts &o) {
    ProblemConfig cfg;
    if (o.problem == "kramers")
        cfg.kind = ProblemKind::Kramers;
    else if (o.problem == "thermal-slip")
        cfg.kind = ProblemKind::ThermalSlip;
    else
        cfg.kind = ProblemKind::TemperatureJump;

    if (o.model == "bgk") {
        cfg.model = knlayer::CollisionModel::bgk(); // Prandtl forced to 1
    } else {
        if (o.prandtl == 0.0 || (o.prandtl < 0.0 && o.prandtl != -1.0))
            throw std::invalid_argument("prandtl must be positive");
        cfg.model = knlayer::CollisionModel::shakhov(o.prandtl > 0.0 ? o.prandtl : 2.0 / 3.0);
    }
    cfg.chi = o.chi;
    cfg.drive = o.drive;
    cfg.bc = (o.bc == "grad") ? knlayer::BcKind::Grad : knlayer::BcKind::NewMaxwell;
    return cfg;
}

std::string model_string(const ProblemConfig &cfg) {
    return cfg.model.kind == knlayer::CollisionModel::Kind::Shakhov ? "shakhov" : "bgk";
}

std::string problem_string(const ProblemConfig &cfg) {
    switch (cfg.kind) {
    case ProblemKind::Kramers:
        return "kramers";
    case ProblemKind::ThermalSlip:
        return "thermal-slip";
    default:
        return "temperature-jump";
    }
}

std::string iso_timestamp() {
    char buf[32];
    const std::time_t now = std::time(nullptr);
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

std::string quote_args(int argc, char **argv) {
    std::string cmd;
    for (int i = 0; i < argc; ++i) {
        if (i) cmd += ' ';
        cmd += argv[i];
    }
    return cmd;
}

void write_profile_csv(const std::string &path, const knlayer::ProblemResult &res,
                       const ProblemConfig &cfg) {
    std::FILE *f = std::fopen(path.c_str(), "w");
    if (!f)
        throw std::runtime_error("cannot open profile output file: " + path);
    std::fprintf(f, "%s\n",
                 cfg.kind == ProblemKind::TemperatureJump ? "lambda_y,theta_d" : "mu_y,u_d");
    for (const auto &[y, v] : res.profile)
        std::fprintf(f, "%.17g,%.17g\n", y, v);
    std::fclose(f);
}

int cmd_run(const ProblemConfig &cfg, const std::string &profile_path,
            const std::string &json_path, const std::string &command) {
    const knlayer::ProblemResult res = knlayer::run_problem(cfg);
    std::printf("%s = %.6f\n", res.coefficient_name.c_str(), res.coefficient);

    if (!profile_path.empty())
        write_profile_csv(profile_path, res, cfg);

    if (!json_path.empty()) {
        ojson j;
        j["problem"] = problem_string(cfg);
        j["model"] = model_string(cfg);
        j["prandtl"] = cfg.model.prandtl;
        j["order"] = cfg.M;
        j["chi"] = cfg.chi;
        j["bc"] = cfg.bc == knlayer::BcKind::Grad ? "grad" : "new";
        j["coefficient_name"] = res.coefficient_name;
        j["coefficient_value"] = res.coefficient;
        j["counts"] = {{"m", res.counts.m},   {"n", res.counts.n},
                       {"p1", res.counts.p1}, {"p2", res.counts.p2},
                       {"r1", res.counts.r1}, {"r2", res.counts.r2},
                       {"n_plus", res.counts.nplus}};
        ojson outputs = ojson::array();
        if (!profile_path.empty()) outputs.push_back(profile_path);
        outputs.push_back(json_path);
        j["manifest"] = {{"command", command},
                         {"version", "0.1.0"},
                         {"timestamp", iso_timestamp()},
                         {"outputs", outputs}};
        std::ofstream out(json_path);
        if (!out)
            throw std::runtime_error("cannot open json output file: " + json_path);
        out << j.dump(2) << "\n";
    }
    return 0;
}

std::vector<int> parse_orders(const std::string &expr) {
    const auto bad = [&] {
        return std::invalid_argument("--orders expects M or start:step:stop, got '" + expr + "'");
    };
    std::vector<long> parts;
    std::stringstream ss(expr);
    std::string tok;
    while (std::getline(ss, tok, ':')) {
        size_t used = 0;
        long value = 0;
        try {
            value = std::stol(tok, &used);
        } catch (const std::exception &) {
            throw bad();
        }
        if (used != tok.size()) throw bad();
        parts.push_back(value);
    }
    std::vector<int> orders;
    if (parts.size() == 1) {
        orders.push_back(static_cast<int>(parts[0]));
    } else if (parts.size() == 3) {
        const long start = parts[0], step = parts[1], stop = parts[2];
        if (step < 1 || stop < start) throw bad();
        for (long M = start; M <= stop; M += step)
            orders.push_back(static_cast<int>(M));
    } else {
        throw bad();
    }
    return orders;
}

int cmd_sweep(const ProblemConfig &cfg, const std::string &orders_expr,
              std::optional<double> reference, const std::string &out_path) {
    const std::vector<int> orders = parse_orders(orders_expr);
    const auto rows = knlayer::sweep_orders(cfg, orders, reference);

    std::FILE *f = stdout;
    if (!out_path.empty()) {
        f = std::fopen(out_path.c_str(), "w");
        if (!f)
            throw std::runtime_error("cannot open sweep output file: " + out_path);
    }
    std::fprintf(f, reference ? "M,coefficient,log2_error\n" : "M,coefficient\n");
    for (const auto &row : rows) {
        if (reference)
            std::fprintf(f, "%d,%.17g,%.17g\n", row.order, row.coefficient, row.log2_error);
        else
            std::fprintf(f, "%d,%.17g\n", row.order, row.coefficient);
    }
    if (f != stdout) std::fclose(f);
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Half-space moment solver for Knudsen-layer slip and jump problems"};
    app.require_subcommand(1);

    CommonOpts run_opts, sweep_opts;
    int order = 0;
    double ymax = 0.0;
    int samples = 200;
    std::string profile_path, json_path, orders_expr, sweep_out;
    double reference = 0.0;

    CLI::App *run = app.add_subcommand("run", "Solve one problem at a fixed order");
    add_common_flags(run, run_opts);
    run->add_option("--order", order, "Truncation order M (>= 3)")->required();
    run->add_option("--ymax", ymax, "Profile extent (default: automatic)");
    run->add_option("--samples", samples, "Profile grid points");
    run->add_option("--profile", profile_path, "Write the layer profile to this CSV");
    run->add_option("--json", json_path, "Write a JSON summary to this file");

    CLI::App *sweep = app.add_subcommand("sweep", "Coefficient vs. truncation order");
    add_common_flags(sweep, sweep_opts);
    sweep->add_option("--orders", orders_expr, "Orders as M or start:step:stop")->required();
    CLI::Option *ref_opt =
        sweep->add_option("--reference", reference, "Reference value; adds a log2_error column");
    sweep->add_option("--out", sweep_out, "Write the sweep CSV here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) {
            ProblemConfig cfg = to_config(run_opts);
            cfg.M = order;
            cfg.ymax = ymax;
            cfg.samples = samples;
            return cmd_run(cfg, profile_path, json_path, quote_args(argc, argv));
        }
        ProblemConfig cfg = to_config(sweep_opts);
        std::optional<double> ref;
        if (ref_opt->count()) ref = reference;
        return cmd_sweep(cfg, orders_expr, ref, sweep_out);
    } catch (const knlayer::UnsupportedConfigurationError &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const knlayer::IllPosedBoundaryError &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const knlayer::InconsistentDataError &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const knlayer::InconsistencyError &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    } catch (const knlayer::AssemblyError &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    } catch (const std::exception &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
