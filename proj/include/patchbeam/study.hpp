#ifndef PATCHBEAM_STUDY_HPP
#define PATCHBEAM_STUDY_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "patchbeam/capacity.hpp"
#include "patchbeam/config.hpp"
#include "patchbeam/fem.hpp"
#include "patchbeam/limit_beam.hpp"

namespace patchbeam {

// One full 3D solve on the thin cylinder.
struct SolveOutcome {
    double eps = 0.0, r_eps = 0.0;
    std::shared_ptr<const VolumeMesh> mesh;
    DisplacementField U;
    StrainSamples strains;
    SolveStats stats;
    double energy_A = 0.0;   // int A^eps e(U):e(U)
    double energy_e2 = 0.0;  // int |e(U)|^2
    double work = 0.0;       // f-work + h-work
};

SolveOutcome solve3d(const StudyConfig& cfg, double eps);

// Normalized corrector errors (the two displayed limits of the Theorem),
// evaluated with the 3D mesh's own quadrature rule.
double err_disp(const SolveOutcome& out, const BeamSolution& B);
double err_strain(const SolveOutcome& out, const BeamSolution& B, const RegimeSpec& regime,
                  const CapacitarySet* capacity);

// Cross-section average of the axial displacement on the x1 = 0 face.
double face_average_u1(const SolveOutcome& out);

// (1/|Omega|) ( int |f|^2 + int |h|^2 ) over the unit-section cylinder.
double load_norm_omega(const StudyConfig& cfg, const CellSolver& cells);

// Limit problem solved once per study, with the capacity data the regime
// needs (natural far field enters the penalty; the clamped variant is kept
// for the truncation bracket report).
struct LimitOutcome {
    BeamSolution beam;
    std::shared_ptr<const SectionMesh> section;
    std::shared_ptr<CapacitarySet> capacity_natural;
    std::shared_ptr<CapacitarySet> capacity_clamped;
    PenaltyForm penalty;
    double penalty_eig = 0.0;  // smallest active eigenvalue, critical regimes only
};

LimitOutcome run_limit(const StudyConfig& cfg, bool with_bracket = false);

struct StudyRow {
    double eps = 0.0, r_eps = 0.0;
    bool ok = false;
    std::string error;
    double err_disp = 0.0, err_strain = 0.0, energy_ratio = 0.0;
    double face_u1 = 0.0;
    int cg_iters = 0;
    double residual = 0.0;
};

struct ConvergenceReport {
    RegimeSpec regime;
    std::vector<StudyRow> rows;
    Eigen::Matrix<double, 6, 1> trace = Eigen::Matrix<double, 6, 1>::Zero();
    std::optional<double> penalty_eig;       // critical regimes
    std::optional<double> bracket_gap_rel;   // capacity truncation info
    bool zero_load = false;

    bool disp_decreasing = false;
    bool strain_decreasing = false;
    bool energy_bounded = false;
    bool pass() const;
};

ConvergenceReport run_study(const StudyConfig& cfg);

struct EnergyBoundRow {
    double eps = 0.0;
    double ratio = 0.0;
    int cg_iters = 0;
};

struct EnergyBoundReport {
    std::vector<EnergyBoundRow> rows;
    double load_norm = 0.0;
    bool applicable = false;  // false for zero loads (0/0 rows)
    bool bounded = false;     // max <= 3 x median
};

EnergyBoundReport energy_bound_report(const StudyConfig& cfg);

// Capacity study over the configured truncation list, both far-field
// variants per L.
struct CapacityStudy {
    struct Entry {
        double L = 0.0;
        Farfield farfield = Farfield::Natural;
        std::shared_ptr<CapacitarySet> set;
    };
    std::vector<Entry> entries;

    const CapacitarySet* find(double L, Farfield ff) const;
};

CapacityStudy run_capacity_study(const StudyConfig& cfg);

// Report writers; all emit deterministic, byte-stable text.
std::string format_double(double v);
void write_study_outputs(const ConvergenceReport& report, const StudyConfig& cfg,
                         const std::string& out_dir);
void write_limit_outputs(const LimitOutcome& limit, const StudyConfig& cfg,
                         const std::string& out_dir);
void write_capacity_outputs(const CapacityStudy& study, const StudyConfig& cfg,
                            const std::string& out_dir);
void write_coercivity_outputs(const CapacityStudy& study, const StudyConfig& cfg,
                              const std::string& out_dir);
void write_solve3d_outputs(const std::vector<SolveOutcome>& outcomes, const StudyConfig& cfg,
                           const std::string& out_dir);

}  // namespace patchbeam

#endif
