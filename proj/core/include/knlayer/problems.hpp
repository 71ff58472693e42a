#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "knlayer/maxwell_bc.hpp"

namespace knlayer {

enum class ProblemKind { Kramers, ThermalSlip, TemperatureJump };

/// Configuration of one layer computation. drive is the prescribed wall
/// datum: tangential stress for Kramers, tangential heat flux for thermal
/// slip, normal heat flux for temperature jump. The default -1 makes the
/// reported slip/jump values positive; coefficients are drive-invariant.
struct ProblemConfig {
    ProblemKind kind = ProblemKind::Kramers;
    int M = 3;
    CollisionModel model = CollisionModel::bgk();
    double chi = 1.0;
    double drive = -1.0;
    BcKind bc = BcKind::NewMaxwell;
    int samples = 200;  // profile grid points
    double ymax = 0.0;  // 0 = automatic: slowest mode decayed to 1e-8
};

struct Counts {
    int m = 0, n = 0;
    int p1 = 0, p2 = 0, r1 = 0, r2 = 0;
    int nplus = 0;
};

struct ProblemResult {
    double coefficient = 0.0;     // eta, Pr*eta_t, or zeta
    std::string coefficient_name; // "eta", "Pr*eta_t", "zeta"
    // thermal slip only: the unscaled coefficient eta_t besides Pr*eta_t
    double eta_t = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::pair<double, double>> profile; // (scaled y, defect)
    Counts counts;
    LayerSolution raw;
    std::shared_ptr<const MomentSystem> system;
    double y_scale = 1.0; // profile abscissa = y_scale * y
    double y_max = 0.0;   // unscaled grid extent actually used
};

/// Index set {e1 + 2 e_j + a2 e2, j = 1,3} u {e1 + a2 e2} up to norm M.
/// Cardinality 3M - 4 for M >= 3.
IndexSet kramers_index_set(int M);

/// Index set {2 e_j + a2 e2, j = 1,3} u {a2 e2} up to norm M.
IndexSet temperature_jump_index_set(int M);

/// Flow past a wall driven by tangential stress sigma_12 = drive.
/// Reports eta = -mu u_1(0+) / drive with mu = sqrt(2)/2 and the velocity
/// defect profile u_d against mu y.
ProblemResult run_kramers(const ProblemConfig &cfg);

/// Flow driven by a tangential heat flux q_1 = drive. Same index set as
/// Kramers. Reports Pr * eta_t where eta_t = -(lambda/2) u_1(0+) / drive,
/// lambda = sqrt(2) / (2 Pr).
ProblemResult run_thermal_slip(const ProblemConfig &cfg);

/// Gas heated through a normal heat flux q_2 = drive. Reports
/// zeta = -(lambda/sqrt(2)) theta_B / drive and the temperature defect
/// profile theta_d against lambda y.
ProblemResult run_temperature_jump(const ProblemConfig &cfg);

/// Dispatch on cfg.kind.
ProblemResult run_problem(const ProblemConfig &cfg);

struct SweepRow {
    int order = 0;
    double coefficient = 0.0;
    // log2 |coefficient - reference|; NaN when no reference was supplied
    double log2_error = std::numeric_limits<double>::quiet_NaN();
};

/// Run cfg at each order in turn. orders must be non-empty, all >= 3.
std::vector<SweepRow> sweep_orders(ProblemConfig cfg, const std::vector<int> &orders,
                                   std::optional<double> reference = std::nullopt);

} // namespace knlayer
