#include "patchbeam/study.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>

#include "patchbeam/elements.hpp"
#include "patchbeam/errors.hpp"

namespace patchbeam {

namespace {

VectorField body_field(const StudyConfig& cfg) {
    return [f = cfg.f](const Eigen::Vector3d& y) {
        return Eigen::Vector3d(f[0](y), f[1](y), f[2](y));
    };
}

TensorField prestrain_field(const StudyConfig& cfg) {
    return [h = cfg.h](const Eigen::Vector3d& y) {
        Voigt6 s;
        for (int k = 0; k < 6; ++k) s[k] = h[k](y);
        return voigt_to_stress(s);
    };
}

bool h_is_zero(const StudyConfig& cfg) {
    return std::all_of(cfg.h.begin(), cfg.h.end(), [](const Expr& e) { return e.is_zero(); });
}

int cg_maxit(const SparseSystem& sys, int factor) {
    return std::max(100, static_cast<int>(factor * std::sqrt(double(sys.free_dofs.size()))));
}

}  // namespace

SolveOutcome solve3d(const StudyConfig& cfg, double eps) {
    const RegimeSpec regime = cfg.regime();
    SolveOutcome out;
    out.eps = eps;
    out.r_eps = regime.r_eps(eps);
    out.mesh = std::make_shared<const VolumeMesh>(
        build_cylinder_mesh(cfg.section, eps, out.r_eps, cfg.axial_n, cfg.section_h,
                            {cfg.grading, cfg.patch_divisions}));
    const VolumeMesh& mesh = *out.mesh;

    SparseSystem sys = assemble_stiffness(mesh, cfg.material, MaterialFrame::CylinderRescale);
    Eigen::VectorXd load =
        assemble_body_load(mesh, body_field(cfg), eps, MaterialFrame::CylinderRescale);
    if (!h_is_zero(cfg))
        load += assemble_prestrain_load(mesh, prestrain_field(cfg), MaterialFrame::CylinderRescale);
    sys.b = load;

    std::vector<int> clamp = mesh.gamma0;
    clamp.insert(clamp.end(), mesh.gamma1.begin(), mesh.gamma1.end());
    std::sort(clamp.begin(), clamp.end());
    sys = impose_dirichlet_zero(std::move(sys), clamp);

    out.U = solve_spd(sys, cfg.tol, cg_maxit(sys, cfg.maxit_factor), &out.stats);
    out.strains = strain_at_quadrature(mesh, out.U);
    out.energy_A =
        quadratic_energy(out.strains, cfg.material, MaterialFrame::CylinderRescale, eps);
    out.energy_e2 = quadratic_energy(out.strains, MaterialField::identity_form(),
                                     MaterialFrame::Frozen);
    out.work = load.dot(out.U.values);
    return out;
}

double err_disp(const SolveOutcome& out, const BeamSolution& B) {
    const Eigen::Matrix3Xd U = displacement_at_quadrature(*out.mesh, out.U);
    const double eps = out.eps;
    double acc = 0.0, vol = 0.0;
    for (int k = 0; k < out.strains.sample_count(); ++k) {
        const Eigen::Vector3d x = out.strains.pos.col(k);
        const double w = out.strains.weight[k];
        const double y1 = std::clamp(x[0], 0.0, 1.0);
        const double y2 = x[1] / eps, y3 = x[2] / eps;
        const double u1 = B.zeta1(y1) - B.zeta2_prime(y1) * y2 - B.zeta3_prime(y1) * y3;
        const double d1 = U(0, k) - u1;
        const double d2 = eps * U(1, k) - B.zeta2(y1);
        const double d3 = eps * U(2, k) - B.zeta3(y1);
        acc += w * (d1 * d1 + d2 * d2 + d3 * d3);
        vol += w;
    }
    return acc / vol;
}

double err_strain(const SolveOutcome& out, const BeamSolution& B, const RegimeSpec& regime,
                  const CapacitarySet* capacity) {
    if (regime.critical() && capacity == nullptr)
        throw std::invalid_argument("err_strain: critical regime needs the capacitary set");
    LimitFieldCache cache(B);
    const int section_quads = out.mesh->section.quad_count();
    std::vector<int> handle(section_quads * 4, -1);

    const Eigen::Matrix<double, 6, 1> trace = B.trace();
    const double eps = out.eps, r_eps = out.r_eps;
    const double zbox = capacity ? capacity->L() : 0.0;
    double acc = 0.0, vol = 0.0;
    for (int k = 0; k < out.strains.sample_count(); ++k) {
        const int elem = k / 8, q = k % 8;
        const int sq = elem % section_quads;
        const int slot = sq * 4 + (q & 3);
        const Eigen::Vector3d x = out.strains.pos.col(k);
        if (handle[slot] < 0) handle[slot] = cache.register_point(x.tail<2>() / eps);

        Eigen::Matrix3d diff =
            voigt_to_strain(out.strains.eng.col(k)) -
            cache.E_at(handle[slot], std::clamp(x[0], 0.0, 1.0));
        if (capacity && regime.critical()) {
            const Eigen::Vector3d z = x / (eps * r_eps);
            if (z.cwiseAbs().maxCoeff() <= zbox)
                diff -= corrector_eval(regime, *capacity, trace, eps, r_eps, z);
        }
        const double w = out.strains.weight[k];
        acc += w * diff.squaredNorm();
        vol += w;
    }
    return acc / vol;
}

double face_average_u1(const SolveOutcome& out) {
    const SectionMesh& sec = out.mesh->section;
    double num = 0.0, den = 0.0;
    for (int q = 0; q < sec.quad_count(); ++q) {
        Eigen::Matrix<double, 2, 4> P;
        Eigen::Vector4d u1;
        for (int c = 0; c < 4; ++c) {
            P.col(c) = sec.nodes.col(sec.quads(c, q));
            u1[c] = out.U.values[3 * sec.quads(c, q)];  // layer-0 node ids
        }
        for (double gx : gauss2())
            for (double gy : gauss2()) {
                const double w = (P * quad_shape_grad(gx, gy)).determinant();
                const Eigen::Vector4d N = quad_shape(gx, gy);
                num += w * N.dot(u1);
                den += w;
            }
    }
    return num / den;
}

double load_norm_omega(const StudyConfig& cfg, const CellSolver& cells) {
    const BeamGrid grid{cfg.limit_n_axial};
    double acc = 0.0, vol = 0.0;
    for (int cidx = 0; cidx < grid.cell_count(); ++cidx) {
        const double y1 = grid.qp_coord(cidx);
        const double w1 = grid.qp_weight_of(cidx);
        for (const auto& qp : cells.quad_points()) {
            const Eigen::Vector3d y(y1, qp.pos[0], qp.pos[1]);
            double f2 = 0.0;
            for (int i = 0; i < 3; ++i) {
                const double v = cfg.f[i](y);
                f2 += v * v;
            }
            double h2 = 0.0;
            for (int i = 0; i < 6; ++i) {
                const double v = cfg.h[i](y);
                h2 += (i < 3 ? 1.0 : 2.0) * v * v;
            }
            acc += w1 * qp.w * (f2 + h2);
            vol += w1 * qp.w;
        }
    }
    return acc / vol;
}

LimitOutcome run_limit(const StudyConfig& cfg, bool with_bracket) {
    const RegimeSpec regime = cfg.regime();
    LimitOutcome out;
    out.section = std::make_shared<const SectionMesh>(
        build_section_mesh(cfg.section.outer, cfg.limit_section_h));

    if (regime.critical()) {
        CapacityParams params;
        params.L = cfg.capacity_L.back();
        params.box = {cfg.capacity_core_h, cfg.capacity_grading};
        params.tol = cfg.tol;
        params.maxit_factor = cfg.maxit_factor;
        params.threads = cfg.threads;
        params.farfield = Farfield::Natural;
        auto natural = std::make_shared<CapacitarySet>(
            CapacitarySet::build(cfg.section.patch, cfg.material.at_origin(), params));
        out.capacity_natural = natural;
        if (with_bracket) {
            params.farfield = Farfield::Clamped;
            out.capacity_clamped = std::make_shared<CapacitarySet>(CapacitarySet::build(
                cfg.section.patch, cfg.material.at_origin(), params, natural->mesh_ptr()));
        }
        out.penalty = penalty_form(regime, *natural);
        out.penalty_eig = coercivity_eigen(out.penalty);
    }

    LimitProblem problem{cfg.material, cfg.section.outer, out.section,
                         cfg.f,        cfg.h,             cfg.limit_n_axial};
    out.beam = solve_limit(problem, regime, regime.critical() ? &out.penalty : nullptr);
    return out;
}

bool ConvergenceReport::pass() const {
    for (const auto& row : rows)
        if (!row.ok) return false;
    if (zero_load) return true;
    bool ok = rows.size() < 2 || (disp_decreasing && strain_decreasing);
    ok = ok && energy_bounded;
    if (penalty_eig) ok = ok && *penalty_eig > 0.0;
    return ok;
}

namespace {

bool strictly_decreasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] < v[i - 1])) return false;
    return true;
}

bool bounded_by_median(std::vector<double> ratios, double factor) {
    if (ratios.empty()) return true;
    std::sort(ratios.begin(), ratios.end());
    const double median = ratios[ratios.size() / 2];
    const double mx = ratios.back();
    if (!(std::isfinite(mx))) return false;
    return median == 0.0 ? mx == 0.0 : mx <= factor * median;
}

}  // namespace

ConvergenceReport run_study(const StudyConfig& cfg) {
    cfg.validate();
    ConvergenceReport report;
    report.regime = cfg.regime();
    report.zero_load = !cfg.has_load();

    const LimitOutcome limit = run_limit(cfg, /*with_bracket=*/true);
    report.trace = limit.beam.trace();
    if (report.regime.critical()) {
        report.penalty_eig = limit.penalty_eig;
        if (limit.capacity_natural && limit.capacity_clamped) {
            const auto& gn = limit.capacity_natural->gram();
            const auto& gc = limit.capacity_clamped->gram();
            double gap = 0.0;
            for (int i = 0; i < 6; ++i)
                if (gc(i, i) > 0.0) gap = std::max(gap, (gc(i, i) - gn(i, i)) / gc(i, i));
            report.bracket_gap_rel = gap;
        }
    }

    // The per-eps points are independent; run them concurrently when asked,
    // assemble the report in sweep order.
    std::vector<StudyRow> rows(cfg.eps_list.size());
    auto run_point = [&](std::size_t i) {
        StudyRow row;
        row.eps = cfg.eps_list[i];
        row.r_eps = report.regime.r_eps(row.eps);
        try {
            const SolveOutcome out = solve3d(cfg, row.eps);
            row.err_disp = err_disp(out, limit.beam);
            row.err_strain =
                err_strain(out, limit.beam, report.regime, limit.capacity_natural.get());
            CellSolver cells(limit.beam.section);
            const double denom = load_norm_omega(cfg, cells);
            const double vol = out.mesh->volume();
            row.energy_ratio = denom > 0.0 ? (out.energy_e2 / vol) / denom
                                           : std::numeric_limits<double>::quiet_NaN();
            row.face_u1 = face_average_u1(out);
            row.cg_iters = out.stats.iterations;
            row.residual = out.stats.residual;
            row.ok = true;
        } catch (const std::exception& e) {
            row.ok = false;
            row.error = e.what();
        }
        rows[i] = std::move(row);
    };
    if (cfg.threads > 1) {
        std::vector<std::future<void>> jobs;
        for (std::size_t i = 0; i < rows.size(); ++i)
            jobs.push_back(std::async(std::launch::async, run_point, i));
        for (auto& j : jobs) j.get();
    } else {
        for (std::size_t i = 0; i < rows.size(); ++i) run_point(i);
    }
    report.rows = std::move(rows);

    std::vector<double> derr, serr, ratios;
    for (const auto& row : report.rows) {
        if (!row.ok) continue;
        derr.push_back(row.err_disp);
        serr.push_back(row.err_strain);
        if (std::isfinite(row.energy_ratio)) ratios.push_back(row.energy_ratio);
    }
    report.disp_decreasing = strictly_decreasing(derr);
    report.strain_decreasing = strictly_decreasing(serr);
    report.energy_bounded = bounded_by_median(ratios, 3.0);
    return report;
}

EnergyBoundReport energy_bound_report(const StudyConfig& cfg) {
    cfg.validate();
    EnergyBoundReport report;
    const auto section = std::make_shared<const SectionMesh>(
        build_section_mesh(cfg.section.outer, cfg.limit_section_h));
    CellSolver cells(section);
    report.load_norm = load_norm_omega(cfg, cells);
    report.applicable = report.load_norm > 0.0;
    std::vector<double> ratios;
    for (double eps : cfg.eps_list) {
        const SolveOutcome out = solve3d(cfg, eps);
        EnergyBoundRow row;
        row.eps = eps;
        row.cg_iters = out.stats.iterations;
        row.ratio = report.applicable
                        ? (out.energy_e2 / out.mesh->volume()) / report.load_norm
                        : std::numeric_limits<double>::quiet_NaN();
        if (report.applicable) ratios.push_back(row.ratio);
        report.rows.push_back(row);
    }
    report.bounded = !report.applicable || bounded_by_median(ratios, 3.0);
    return report;
}

const CapacitarySet* CapacityStudy::find(double L, Farfield ff) const {
    for (const auto& e : entries)
        if (e.L == L && e.farfield == ff) return e.set.get();
    return nullptr;
}

CapacityStudy run_capacity_study(const StudyConfig& cfg) {
    CapacityStudy study;
    for (double L : cfg.capacity_L) {
        CapacityParams params;
        params.L = L;
        params.box = {cfg.capacity_core_h, cfg.capacity_grading};
        params.tol = cfg.tol;
        params.maxit_factor = cfg.maxit_factor;
        params.threads = cfg.threads;
        std::shared_ptr<const VolumeMesh> mesh;
        for (Farfield ff : {Farfield::Natural, Farfield::Clamped}) {
            params.farfield = ff;
            auto set = std::make_shared<CapacitarySet>(
                CapacitarySet::build(cfg.section.patch, cfg.material.at_origin(), params, mesh));
            mesh = set->mesh_ptr();
            study.entries.push_back({L, ff, std::move(set)});
        }
    }
    return study;
}

// ---------------------------------------------------------------------------
// Report writers
// ---------------------------------------------------------------------------

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

namespace {

std::ofstream open_out(const std::string& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    std::ofstream out(dir + "/" + name, std::ios::binary);
    if (!out) throw ConfigError("cannot write output file " + dir + "/" + name);
    return out;
}

const char* farfield_name(Farfield ff) {
    return ff == Farfield::Natural ? "natural" : "clamped";
}

void write_header(std::ofstream& os, const StudyConfig& cfg) {
    const RegimeSpec regime = cfg.regime();
    os << "# regime=" << to_string(regime.tag) << " rho=" << format_double(regime.rho)
       << " kappa=" << format_double(cfg.kappa) << " p=" << regime.p.num << "/" << regime.p.den
       << "\n";
}

}  // namespace

void write_study_outputs(const ConvergenceReport& report, const StudyConfig& cfg,
                         const std::string& out_dir) {
    auto csv = open_out(out_dir, "study.csv");
    csv << "epsilon,r_epsilon,regime,rho,err_disp,err_strain,energy_ratio,cg_iters,residual\n";
    for (const auto& row : report.rows) {
        csv << format_double(row.eps) << ',' << format_double(row.r_eps) << ','
            << to_string(report.regime.tag) << ',' << format_double(report.regime.rho) << ','
            << format_double(row.err_disp) << ',' << format_double(row.err_strain) << ','
            << format_double(row.energy_ratio) << ',' << row.cg_iters << ','
            << format_double(row.residual) << '\n';
    }

    auto txt = open_out(out_dir, "summary.txt");
    write_header(txt, cfg);
    txt << "limit trace (zeta2, zeta3, zeta1, c, zeta2', zeta3') at y1=0:";
    for (int i = 0; i < 6; ++i) txt << ' ' << format_double(report.trace[i]);
    txt << "\n";
    if (report.penalty_eig)
        txt << "penalty smallest eigenvalue: " << format_double(*report.penalty_eig) << "\n";
    if (report.bracket_gap_rel)
        txt << "capacity bracket relative gap: " << format_double(*report.bracket_gap_rel) << "\n";
    for (const auto& row : report.rows) {
        txt << "eps=" << format_double(row.eps);
        if (row.ok) {
            txt << " err_disp=" << format_double(row.err_disp)
                << " err_strain=" << format_double(row.err_strain)
                << " energy_ratio=" << format_double(row.energy_ratio)
                << " face_u1=" << format_double(row.face_u1) << " iters=" << row.cg_iters
                << " residual=" << format_double(row.residual) << "\n";
        } else {
            txt << " FAILED: " << row.error << "\n";
        }
    }
    txt << "verdict err_disp strictly decreasing: " << (report.disp_decreasing ? "yes" : "no")
        << "\n";
    txt << "verdict err_strain strictly decreasing: " << (report.strain_decreasing ? "yes" : "no")
        << "\n";
    txt << "verdict energy ratio bounded: " << (report.energy_bounded ? "yes" : "no") << "\n";
    txt << "overall: " << (report.pass() ? "pass" : "fail") << "\n";
}

void write_limit_outputs(const LimitOutcome& limit, const StudyConfig& cfg,
                         const std::string& out_dir) {
    auto csv = open_out(out_dir, "limit.csv");
    csv << "y1,zeta1,zeta2,zeta3,c\n";
    const int samples = 100;
    for (int i = 0; i <= samples; ++i) {
        const double y1 = double(i) / samples;
        csv << format_double(y1) << ',' << format_double(limit.beam.zeta1(y1)) << ','
            << format_double(limit.beam.zeta2(y1)) << ',' << format_double(limit.beam.zeta3(y1))
            << ',' << format_double(limit.beam.twist(y1)) << '\n';
    }
    auto trace = open_out(out_dir, "limit_trace.csv");
    trace << "zeta2_0,zeta3_0,zeta1_0,c_0,zeta2p_0,zeta3p_0\n";
    const auto t = limit.beam.trace();
    for (int i = 0; i < 6; ++i) trace << format_double(t[i]) << (i == 5 ? '\n' : ',');

    auto txt = open_out(out_dir, "limit_summary.txt");
    write_header(txt, cfg);
    txt << "effective stiffness D at y1=0 (rows theta = zeta1', zeta2'', zeta3'', c'):\n";
    const Eigen::Matrix4d D = limit.beam.cells.front().D;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) txt << (j ? " " : "") << format_double(D(i, j));
        txt << "\n";
    }
    if (limit.penalty_eig > 0.0)
        txt << "penalty smallest eigenvalue: " << format_double(limit.penalty_eig) << "\n";
}

void write_capacity_outputs(const CapacityStudy& study, const StudyConfig& cfg,
                            const std::string& out_dir) {
    auto csv = open_out(out_dir, "capacity.csv");
    csv << "L,farfield,entry,value\n";
    auto row = [&](double L, Farfield ff, const std::string& entry, double value) {
        csv << format_double(L) << ',' << farfield_name(ff) << ',' << entry << ','
            << format_double(value) << '\n';
    };
    static const char* names[6] = {"phi1", "phi2", "phi3", "psi1", "psi2", "psi3"};
    for (const auto& e : study.entries) {
        const auto& G = e.set->gram();
        for (int i = 0; i < 6; ++i)
            for (int j = i; j < 6; ++j)
                row(e.L, e.farfield, std::string("G_") + names[i] + "_" + names[j], G(i, j));
        row(e.L, e.farfield, "a2", e.set->a()[0]);
        row(e.L, e.farfield, "a3", e.set->a()[1]);
        for (int i = 0; i < 3; ++i)
            for (int k = 0; k < 3; ++k)
                row(e.L, e.farfield, "b" + std::to_string(i + 1) + "_" + std::to_string(k + 1),
                    e.set->b(i)[k]);
        row(e.L, e.farfield, "gram_hat_phi1", e.set->gram_hat_phi1());
        const auto& Gp = e.set->gram_hat_psi();
        for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j)
                row(e.L, e.farfield,
                    "gram_hat_psi_" + std::to_string(i + 1) + std::to_string(j + 1), Gp(i, j));
        for (int i = 0; i < 6; ++i)
            row(e.L, e.farfield, std::string("tail_") + names[i], e.set->tail_fraction()[i]);
        // Active penalty blocks and their smallest eigenvalues for the three
        // critical sizes at the configured kappa.
        for (const auto& [tag_p, label] :
             std::initializer_list<std::pair<Rational, const char*>>{
                 {Rational(3, 1), "crit3"}, {Rational(1, 1), "crit1"}, {Rational(1, 3), "crit13"}}) {
            const RegimeSpec regime = classify(cfg.kappa, tag_p);
            const PenaltyForm P = penalty_form(regime, *e.set);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(P.active_block(),
                                                              Eigen::EigenvaluesOnly);
            row(e.L, e.farfield, std::string("penalty_eig_min_") + label,
                es.eigenvalues().minCoeff());
        }
    }

    auto txt = open_out(out_dir, "capacity_summary.txt");
    write_header(txt, cfg);
    for (const auto& e : study.entries) {
        txt << "L=" << format_double(e.L) << " farfield=" << farfield_name(e.farfield) << "\n";
        txt << "  gram diag:";
        for (int i = 0; i < 6; ++i) txt << ' ' << format_double(e.set->gram()(i, i));
        txt << "\n  a=(" << format_double(e.set->a()[0]) << ", " << format_double(e.set->a()[1])
            << ")\n";
        txt << "  solver iters:";
        for (int i = 0; i < 6; ++i) txt << ' ' << e.set->stats(i).iterations;
        txt << "\n";
    }
    // Truncation brackets per L (natural below, clamped above).
    for (std::size_t i = 0; i + 1 < study.entries.size(); i += 2) {
        const auto& nat = study.entries[i];
        const auto& cl = study.entries[i + 1];
        txt << "bracket L=" << format_double(nat.L) << " max relative gap: ";
        double gap = 0.0;
        for (int k = 0; k < 6; ++k)
            if (cl.set->gram()(k, k) > 0.0)
                gap = std::max(gap,
                               (cl.set->gram()(k, k) - nat.set->gram()(k, k)) / cl.set->gram()(k, k));
        txt << format_double(gap) << "\n";
    }
}

void write_coercivity_outputs(const CapacityStudy& study, const StudyConfig& cfg,
                              const std::string& out_dir) {
    auto csv = open_out(out_dir, "coercivity.csv");
    csv << "L,regime,rho,eig_min_natural,eig_min_clamped\n";
    for (std::size_t i = 0; i + 1 < study.entries.size(); i += 2) {
        const auto& nat = study.entries[i];
        const auto& cl = study.entries[i + 1];
        for (const Rational& p : {Rational(3, 1), Rational(1, 1), Rational(1, 3)}) {
            const RegimeSpec regime = classify(cfg.kappa, p);
            const double en = coercivity_eigen(penalty_form(regime, *nat.set));
            const double ec = coercivity_eigen(penalty_form(regime, *cl.set));
            csv << format_double(nat.L) << ',' << to_string(regime.tag) << ','
                << format_double(regime.rho) << ',' << format_double(en) << ','
                << format_double(ec) << '\n';
        }
    }
}

void write_solve3d_outputs(const std::vector<SolveOutcome>& outcomes, const StudyConfig& cfg,
                           const std::string& out_dir) {
    auto csv = open_out(out_dir, "solve3d.csv");
    csv << "epsilon,r_epsilon,dofs,energy,work,cg_iters,residual\n";
    for (const auto& out : outcomes) {
        csv << format_double(out.eps) << ',' << format_double(out.r_eps) << ','
            << 3 * out.mesh->node_count() << ',' << format_double(out.energy_A) << ','
            << format_double(out.work) << ',' << out.stats.iterations << ','
            << format_double(out.stats.residual) << '\n';
    }
    auto txt = open_out(out_dir, "solve3d_summary.txt");
    write_header(txt, cfg);
    for (const auto& out : outcomes)
        txt << "eps=" << format_double(out.eps) << " energy=" << format_double(out.energy_A)
            << " energy/work=" << format_double(out.work != 0.0 ? out.energy_A / out.work : 0.0)
            << " iters=" << out.stats.iterations << "\n";
}

}  // namespace patchbeam
