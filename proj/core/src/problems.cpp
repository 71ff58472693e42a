#include "knlayer/problems.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "knlayer/errors.hpp"

namespace knlayer {

namespace {

constexpr double kMu = std::numbers::sqrt2 / 2.0; // viscosity at unit Prandtl

double heat_conductivity(const CollisionModel &model) {
    return std::numbers::sqrt2 / (2.0 * model.prandtl);
}

int require_position(const IndexSet &set, const MultiIndex &idx) {
    const int pos = set.position(idx);
    if (pos < 0) {
        std::ostringstream os;
        os << "index set lost a required moment (order " << set.order() << ")";
        throw InconsistencyError(os.str());
    }
    return pos;
}

void validate_config(const ProblemConfig &cfg) {
    if (cfg.M < 3)
        throw std::invalid_argument("order must be at least 3");
    if (cfg.drive == 0.0)
        throw std::invalid_argument("drive must be nonzero");
    if (cfg.samples < 2)
        throw std::invalid_argument("need at least 2 profile samples");
    if (cfg.ymax < 0.0)
        throw std::invalid_argument("ymax must be nonnegative");
}

Counts counts_of(const Decomposition &dec) {
    Counts c;
    c.m = dec.m;
    c.n = dec.n;
    c.p1 = dec.p1;
    c.p2 = dec.p2;
    c.r1 = dec.r1;
    c.r2 = dec.r2;
    c.nplus = dec.nplus;
    return c;
}

void expect_counts(const Counts &c, int p1, int p2, int r1, int r2) {
    if (c.p1 == p1 && c.p2 == p2 && c.r1 == r1 && c.r2 == r2)
        return;
    std::ostringstream os;
    os << "unexpected subspace dimensions: got (p1,p2,r1,r2) = (" << c.p1 << "," << c.p2
       << "," << c.r1 << "," << c.r2 << "), expected (" << p1 << "," << p2 << "," << r1
       << "," << r2 << ")";
    throw InconsistencyError(os.str());
}

struct SolveParts {
    std::shared_ptr<const MomentSystem> sys;
    std::shared_ptr<const Decomposition> dec;
    BoundarySolve bs;
    Eigen::VectorXd fe_hat; // induced even plateau, length m
};

SolveParts solve_driven(IndexSet set, const ProblemConfig &cfg, const Eigen::VectorXd &fe,
                        const Eigen::VectorXd &fo) {
    SolveParts parts;
    parts.sys = std::make_shared<const MomentSystem>(assemble_system(std::move(set), cfg.model));
    parts.dec = std::make_shared<const Decomposition>(decompose(*parts.sys));

    BoundarySpec spec;
    spec.chi = cfg.chi;
    spec.f_e = fe;
    spec.f_o = fo;
    spec.kind = cfg.bc;
    const BoundarySystem bsys = (cfg.bc == BcKind::Grad)
                                    ? build_grad_bc(*parts.sys, *parts.dec, spec)
                                    : build_new_bc(*parts.sys, *parts.dec, spec);
    parts.bs = solve_boundary(bsys);
    parts.fe_hat = parts.dec->Ge() * parts.bs.slip;
    return parts;
}

double profile_extent(const ProblemConfig &cfg, const Decomposition &dec) {
    if (cfg.ymax > 0.0)
        return cfg.ymax;
    if (dec.LambdaPlus.size() == 0)
        return 1.0; // no layer modes; the profile is identically zero
    return dec.LambdaPlus.maxCoeff() * std::log(1e8);
}

// Evaluates the layer on a uniform grid, applies the per-problem linear
// relations that must vanish identically, and maps the state to the profile
// ordinate. `check` gets (w, tol) and throws on violation; `defect` maps w
// to the plotted quantity.
template <typename CheckFn, typename DefectFn>
std::vector<std::pair<double, double>> sample_profile(const LayerSolution &sol, double ymax,
                                                      int samples, double y_scale,
                                                      CheckFn &&check, DefectFn &&defect) {
    const Eigen::VectorXd w0 = evaluate_solution(sol, 0.0);
    const double tol = 1e-12 * std::max(1.0, w0.lpNorm<Eigen::Infinity>());
    std::vector<std::pair<double, double>> profile;
    profile.reserve(static_cast<size_t>(samples));
    for (int j = 0; j < samples; ++j) {
        const double y = ymax * static_cast<double>(j) / static_cast<double>(samples - 1);
        const Eigen::VectorXd w = evaluate_solution(sol, y);
        check(w, tol);
        profile.emplace_back(y_scale * y, defect(w));
    }
    return profile;
}

} // namespace

IndexSet kramers_index_set(int M) {
    return build_index_set({MultiIndex{1, 0, 0}, MultiIndex{3, 0, 0}, MultiIndex{1, 0, 2}}, M, 3);
}

IndexSet temperature_jump_index_set(int M) {
    return build_index_set({MultiIndex{0, 0, 0}, MultiIndex{2, 0, 0}, MultiIndex{0, 0, 2}}, M, 3);
}

ProblemResult run_kramers(const ProblemConfig &cfg) {
    validate_config(cfg);
    IndexSet set = kramers_index_set(cfg.M);

    Eigen::VectorXd fe = Eigen::VectorXd::Zero(set.m());
    Eigen::VectorXd fo = Eigen::VectorXd::Zero(set.n());
    const int pos_shear = require_position(set, MultiIndex{1, 1, 0});
    fo[pos_shear - set.m()] = cfg.drive;

    SolveParts parts = solve_driven(std::move(set), cfg, fe, fo);
    const IndexSet &idxs = parts.sys->set;
    ProblemResult res;
    res.counts = counts_of(*parts.dec);
    expect_counts(res.counts, 1, 0, 1, 0);

    const int pos_u1 = require_position(idxs, MultiIndex{1, 0, 0});
    const int pos_heat = require_position(idxs, MultiIndex{1, 2, 0});

    res.coefficient_name = "eta";
    res.coefficient = -kMu * parts.fe_hat[pos_u1] / cfg.drive;
    res.raw = make_layer_solution(parts.dec, parts.bs.z0, parts.bs.slip);
    res.system = parts.sys;
    res.y_scale = kMu;
    res.y_max = profile_extent(cfg, *parts.dec);
    const double drive = cfg.drive;
    res.profile = sample_profile(
        res.raw, res.y_max, cfg.samples, res.y_scale,
        [&](const Eigen::VectorXd &w, double tol) {
            // momentum conservation fixes the shear to its wall value and
            // couples the velocity defect to one heat-flux moment
            if (std::abs(w[pos_shear]) > tol)
                throw InconsistencyError("computed layer carries a shear-stress defect");
            if (std::abs(w[pos_u1] + std::numbers::sqrt2 * w[pos_heat]) > tol)
                throw InconsistencyError("velocity/heat-flux defect coupling violated");
        },
        [&](const Eigen::VectorXd &w) { return kMu * w[pos_u1] / drive; });
    return res;
}

ProblemResult run_thermal_slip(const ProblemConfig &cfg) {
    validate_config(cfg);
    IndexSet set = kramers_index_set(cfg.M);

    Eigen::VectorXd fe = Eigen::VectorXd::Zero(set.m());
    Eigen::VectorXd fo = Eigen::VectorXd::Zero(set.n());
    // prescribed tangential heat flux enters through the three even
    // third-order moments that compose it
    fe[require_position(set, MultiIndex{3, 0, 0})] = std::numbers::sqrt3 * cfg.drive;
    fe[require_position(set, MultiIndex{1, 2, 0})] = cfg.drive;
    fe[require_position(set, MultiIndex{1, 0, 2})] = cfg.drive;

    SolveParts parts = solve_driven(std::move(set), cfg, fe, fo);
    const IndexSet &idxs = parts.sys->set;
    ProblemResult res;
    res.counts = counts_of(*parts.dec);
    expect_counts(res.counts, 1, 0, 1, 0);

    const int pos_u1 = require_position(idxs, MultiIndex{1, 0, 0});
    const int pos_heat = require_position(idxs, MultiIndex{1, 2, 0});
    const int pos_shear = require_position(idxs, MultiIndex{1, 1, 0});

    const double lambda = heat_conductivity(cfg.model);
    res.eta_t = -0.5 * lambda * parts.fe_hat[pos_u1] / cfg.drive;
    res.coefficient_name = "Pr*eta_t";
    res.coefficient = cfg.model.prandtl * res.eta_t;
    res.raw = make_layer_solution(parts.dec, parts.bs.z0, parts.bs.slip);
    res.system = parts.sys;
    res.y_scale = kMu;
    res.y_max = profile_extent(cfg, *parts.dec);
    const double drive = cfg.drive;
    res.profile = sample_profile(
        res.raw, res.y_max, cfg.samples, res.y_scale,
        [&](const Eigen::VectorXd &w, double tol) {
            if (std::abs(w[pos_shear]) > tol)
                throw InconsistencyError("computed layer carries a shear-stress defect");
            if (std::abs(w[pos_u1] + std::numbers::sqrt2 * w[pos_heat]) > tol)
                throw InconsistencyError("velocity/heat-flux defect coupling violated");
        },
        [&](const Eigen::VectorXd &w) { return 0.5 * lambda * w[pos_u1] / drive; });
    return res;
}

ProblemResult run_temperature_jump(const ProblemConfig &cfg) {
    validate_config(cfg);
    IndexSet set = temperature_jump_index_set(cfg.M);

    Eigen::VectorXd fe = Eigen::VectorXd::Zero(set.m());
    Eigen::VectorXd fo = Eigen::VectorXd::Zero(set.n());
    // prescribed normal heat flux, decomposed over the odd third-order moments
    fo[require_position(set, MultiIndex{2, 1, 0}) - set.m()] = cfg.drive;
    fo[require_position(set, MultiIndex{0, 1, 2}) - set.m()] = cfg.drive;
    fo[require_position(set, MultiIndex{0, 3, 0}) - set.m()] = std::numbers::sqrt3 * cfg.drive;

    SolveParts parts = solve_driven(std::move(set), cfg, fe, fo);
    const IndexSet &idxs = parts.sys->set;
    ProblemResult res;
    res.counts = counts_of(*parts.dec);
    expect_counts(res.counts, 2, 1, 1, 0);

    const int pos_rho = require_position(idxs, MultiIndex{0, 0, 0});
    const int pos_t1 = require_position(idxs, MultiIndex{2, 0, 0});
    const int pos_t2 = require_position(idxs, MultiIndex{0, 2, 0});
    const int pos_t3 = require_position(idxs, MultiIndex{0, 0, 2});
    const int pos_u2 = require_position(idxs, MultiIndex{0, 1, 0});
    const int pos_q1 = require_position(idxs, MultiIndex{2, 1, 0});
    const int pos_q2 = require_position(idxs, MultiIndex{0, 3, 0});
    const int pos_q3 = require_position(idxs, MultiIndex{0, 1, 2});

    const double lambda = heat_conductivity(cfg.model);
    // theta_B = sqrt(2) * fe_hat[2 e_1]: the plateau is isotropic in the
    // trace moments, so one component determines the temperature jump
    res.coefficient_name = "zeta";
    res.coefficient = -lambda * parts.fe_hat[pos_t1] / cfg.drive;
    res.raw = make_layer_solution(parts.dec, parts.bs.z0, parts.bs.slip);
    res.system = parts.sys;
    res.y_scale = lambda;
    res.y_max = profile_extent(cfg, *parts.dec);
    const double drive = cfg.drive;
    const double theta_scale = lambda / std::numbers::sqrt2;
    res.profile = sample_profile(
        res.raw, res.y_max, cfg.samples, res.y_scale,
        [&](const Eigen::VectorXd &w, double tol) {
            if (std::abs(w[pos_u2]) > tol)
                throw InconsistencyError("computed layer carries a normal-velocity defect");
            if (std::abs(w[pos_rho] + std::numbers::sqrt2 * w[pos_t2]) > tol)
                throw InconsistencyError("density/pressure defect coupling violated");
            if (std::abs(w[pos_q1] + std::numbers::sqrt3 * w[pos_q2] + w[pos_q3]) > tol)
                throw InconsistencyError("computed layer carries a normal heat-flux defect");
        },
        [&](const Eigen::VectorXd &w) {
            const double theta_k =
                std::numbers::sqrt2 / 3.0 * (w[pos_t1] + w[pos_t2] + w[pos_t3]);
            return theta_scale * theta_k / drive;
        });
    return res;
}

ProblemResult run_problem(const ProblemConfig &cfg) {
    switch (cfg.kind) {
    case ProblemKind::Kramers:
        return run_kramers(cfg);
    case ProblemKind::ThermalSlip:
        return run_thermal_slip(cfg);
    case ProblemKind::TemperatureJump:
        return run_temperature_jump(cfg);
    }
    throw std::invalid_argument("unknown problem kind");
}

std::vector<SweepRow> sweep_orders(ProblemConfig cfg, const std::vector<int> &orders,
                                   std::optional<double> reference) {
    if (orders.empty())
        throw std::invalid_argument("sweep needs at least one order");
    for (int M : orders)
        if (M < 3)
            throw std::invalid_argument("order must be at least 3");

    std::vector<SweepRow> rows;
    rows.reserve(orders.size());
    for (int M : orders) {
        cfg.M = M;
        const ProblemResult res = run_problem(cfg);
        SweepRow row;
        row.order = M;
        row.coefficient = res.coefficient;
        if (reference)
            row.log2_error = std::log2(std::abs(res.coefficient - *reference));
        rows.push_back(row);
    }
    return rows;
}

} // namespace knlayer
