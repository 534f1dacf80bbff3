#include "patchbeam/capacity.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <future>

#include "patchbeam/errors.hpp"

namespace patchbeam {

Eigen::Vector3d patch_profile(PatchProfileKind kind, const Eigen::Vector3d& z,
                              const SectionShape& s0) {
    const double scale = s0.diameter();
    if (std::abs(z[0]) > 1e-9 * scale || !s0.contains(z.tail<2>(), 1.0, 1e-9))
        throw MeshError("patch_profile: point is off the patch {0} x S0");
    switch (kind) {
        case PatchProfileKind::Axial: return {1.0, 0.0, 0.0};
        case PatchProfileKind::Trans2: return {0.0, 1.0, 0.0};
        case PatchProfileKind::Trans3: return {0.0, 0.0, 1.0};
        case PatchProfileKind::Torsion: return {0.0, z[2], -z[1]};
        case PatchProfileKind::Rot2: return {-z[1], z[0], 0.0};
        default: return {-z[2], 0.0, z[0]};  // Rot3
    }
}

namespace {

constexpr PatchProfileKind kRawKinds[6] = {PatchProfileKind::Axial,   PatchProfileKind::Trans2,
                                           PatchProfileKind::Trans3,  PatchProfileKind::Torsion,
                                           PatchProfileKind::Rot2,    PatchProfileKind::Rot3};

// Constrained system for the half-box problem: the patch carries the profile
// data, the far boundary is free (Natural) or clamped to zero (Clamped).
SparseSystem constrained_halfbox_system(const VolumeMesh& mesh, const VoigtMatrix& A0,
                                        Farfield farfield) {
    MaterialField mat = MaterialField::identity_form();
    {
        // Wrap A0 as a constant field through the 21 upper coefficients.
        Eigen::Matrix<double, 21, 1> upper;
        int k = 0;
        for (int i = 0; i < 6; ++i)
            for (int j = i; j < 6; ++j) upper[k++] = A0(i, j);
        mat = MaterialField::full_voigt(upper);
    }
    SparseSystem sys = assemble_stiffness(mesh, mat, MaterialFrame::Frozen);
    std::vector<int> set = mesh.patch;
    if (farfield == Farfield::Clamped)
        set.insert(set.end(), mesh.farfield.begin(), mesh.farfield.end());
    std::sort(set.begin(), set.end());
    set.erase(std::unique(set.begin(), set.end()), set.end());
    return impose_dirichlet_zero(std::move(sys), set);
}

// Dirichlet values for one profile kind on a constrained system: profile on
// patch nodes, zero elsewhere (the clamped far field).
Eigen::VectorXd profile_values(const SparseSystem& sys, const VolumeMesh& mesh,
                               PatchProfileKind kind, const SectionShape& s0) {
    std::vector<char> on_patch(mesh.node_count(), 0);
    for (int n : mesh.patch) on_patch[n] = 1;
    Eigen::VectorXd g = Eigen::VectorXd::Zero(sys.constrained.size());
    for (std::size_t k = 0; k < sys.constrained.size(); ++k) {
        const int dof = sys.constrained[k];
        const int node = dof / 3;
        if (!on_patch[node]) continue;
        g[k] = patch_profile(kind, mesh.nodes.col(node), s0)[dof % 3];
    }
    return g;
}

int capacity_maxit(const SparseSystem& sys, int factor) {
    return std::max(100, static_cast<int>(factor * std::sqrt(double(sys.free_dofs.size()))));
}

}  // namespace

DisplacementField solve_potential(PatchProfileKind kind, const SectionShape& s0,
                                  const VoigtMatrix& A0, const CapacityParams& params,
                                  std::shared_ptr<const VolumeMesh>* mesh_out,
                                  SolveStats* stats) {
    auto mesh = std::make_shared<const VolumeMesh>(build_halfbox_mesh(s0, params.L, params.box));
    SparseSystem sys = constrained_halfbox_system(*mesh, A0, params.farfield);
    const Eigen::VectorXd g = profile_values(sys, *mesh, kind, s0);
    DisplacementField U =
        solve_spd(sys, params.tol, capacity_maxit(sys, params.maxit_factor), stats, &g);
    if (mesh_out) *mesh_out = std::move(mesh);
    return U;
}

Eigen::MatrixXd energy_gram(const VolumeMesh& mesh, const VoigtMatrix& A0,
                            const std::vector<const DisplacementField*>& potentials) {
    const int n = static_cast<int>(potentials.size());
    std::vector<StrainSamples> samples(n);
    for (int i = 0; i < n; ++i) {
        if (potentials[i]->values.size() != 3 * mesh.node_count())
            throw MeshError("energy_gram: potential does not live on the given mesh");
        samples[i] = strain_at_quadrature(mesh, *potentials[i]);
    }
    Eigen::MatrixXd G(n, n);
    for (int i = 0; i < n; ++i) {
        const Eigen::Matrix<double, 6, Eigen::Dynamic> sig = A0 * samples[i].eng;
        for (int j = i; j < n; ++j) {
            const double v =
                (sig.cwiseProduct(samples[j].eng).colwise().sum() * samples[j].weight.asDiagonal())
                    .sum();
            G(i, j) = v;
            G(j, i) = v;
        }
    }
    return G;
}

Eigen::VectorXd orthogonalize(int target, const std::vector<int>& basis, const Eigen::MatrixXd& G,
                              double* condition) {
    const int nb = static_cast<int>(basis.size());
    Eigen::MatrixXd B(nb, nb);
    Eigen::VectorXd rhs(nb);
    for (int i = 0; i < nb; ++i) {
        rhs[i] = -G(basis[i], target);
        for (int j = 0; j < nb; ++j) B(i, j) = G(basis[i], basis[j]);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi / lo > 1e12)
        throw SolveError("orthogonalize: basis Gram block is singular or ill conditioned",
                         lo, 0);
    if (condition) *condition = hi / lo;
    return B.llt().solve(rhs);
}

bool CapacitarySet::inside(const Eigen::Vector3d& z) const {
    const double L = params_.L;
    const double tol = 1e-12 * L;
    return z[0] >= -tol && z[0] <= L + tol && std::abs(z[1]) <= L + tol &&
           std::abs(z[2]) <= L + tol;
}

Eigen::Matrix3d CapacitarySet::strain(FieldId id, const Eigen::Vector3d& z) const {
    if (!inside(z)) return Eigen::Matrix3d::Zero();
    const auto [elem, xi] = mesh_->locate(z);
    return eval_strain(*mesh_, fields_[id], elem, xi);
}

CapacitarySet CapacitarySet::build(const SectionShape& s0, const VoigtMatrix& A0,
                                   const CapacityParams& params,
                                   std::shared_ptr<const VolumeMesh> mesh) {
    CapacitarySet set;
    set.params_ = params;
    set.A0_ = A0;
    set.mesh_ = mesh ? std::move(mesh)
                     : std::make_shared<const VolumeMesh>(
                           build_halfbox_mesh(s0, params.L, params.box));
    const VolumeMesh& M = *set.mesh_;

    SparseSystem sys = constrained_halfbox_system(M, A0, params.farfield);
    const int maxit = capacity_maxit(sys, params.maxit_factor);

    set.fields_.resize(10);
    set.stats_.resize(6);
    auto solve_kind = [&](int raw) {
        const Eigen::VectorXd g = profile_values(sys, M, kRawKinds[raw], s0);
        set.fields_[raw] = solve_spd(sys, params.tol, maxit, &set.stats_[raw], &g);
    };
    if (params.threads > 1) {
        std::vector<std::future<void>> jobs;
        for (int raw = 0; raw < 6; ++raw)
            jobs.push_back(std::async(std::launch::async, solve_kind, raw));
        for (auto& j : jobs) j.get();
    } else {
        for (int raw = 0; raw < 6; ++raw) solve_kind(raw);
    }

    // Gram and truncation-tail report.
    {
        std::vector<const DisplacementField*> ptrs;
        for (int raw = 0; raw < 6; ++raw) ptrs.push_back(&set.fields_[raw]);
        set.gram_ = energy_gram(M, A0, ptrs);
        for (int raw = 0; raw < 6; ++raw) {
            const StrainSamples s = strain_at_quadrature(M, set.fields_[raw]);
            double total = 0.0, outer = 0.0;
            for (int k = 0; k < s.sample_count(); ++k) {
                const Voigt6 v = s.eng.col(k);
                const double e = s.weight[k] * v.dot(A0 * v);
                total += e;
                if (s.pos.col(k).cwiseAbs().maxCoeff() >= 0.7 * params.L) outer += e;
            }
            set.tail_fraction_[raw] = total > 0.0 ? outer / total : 0.0;
        }
    }

    // Orthogonalized combinations.  phi-hat-1 = phi1 + a_alpha phi^alpha with
    // the energy-orthogonality system for (a2, a3); psi-hat-i uses all three
    // phi's.
    const Eigen::VectorXd a = orthogonalize(kPhi1, {kPhi2, kPhi3}, set.gram_,
                                            &set.phi_condition_);
    set.a_ = a;
    set.fields_[kPhiHat1].values = set.fields_[kPhi1].values + a[0] * set.fields_[kPhi2].values +
                                   a[1] * set.fields_[kPhi3].values;
    for (int i = 0; i < 3; ++i) {
        const Eigen::VectorXd bi = orthogonalize(kPsi1 + i, {kPhi1, kPhi2, kPhi3}, set.gram_);
        set.b_[i] = bi;
        set.fields_[kPsiHat1 + i].values =
            set.fields_[kPsi1 + i].values + bi[0] * set.fields_[kPhi1].values +
            bi[1] * set.fields_[kPhi2].values + bi[2] * set.fields_[kPhi3].values;
    }

    // Gram entries of the combinations, algebraically from the raw Gram.
    const Eigen::Matrix3d Gphi = set.gram_.topLeftCorner<3, 3>();
    {
        Eigen::Vector3d c(1.0, set.a_[0], set.a_[1]);
        set.gram_hat_phi1_ = c.dot(Gphi * c);
    }
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const Eigen::Vector3d gi = set.gram_.block<3, 1>(0, kPsi1 + i);
            const Eigen::Vector3d gj = set.gram_.block<3, 1>(0, kPsi1 + j);
            set.gram_hat_psi_(i, j) = set.gram_(kPsi1 + i, kPsi1 + j) + set.b_[i].dot(gj) +
                                      set.b_[j].dot(gi) + set.b_[i].dot(Gphi * set.b_[j]);
        }
    return set;
}

Eigen::MatrixXd PenaltyForm::active_block() const {
    const int n = static_cast<int>(active_slots.size());
    Eigen::MatrixXd B(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) B(i, j) = matrix(active_slots[i], active_slots[j]);
    return B;
}

PenaltyForm penalty_form(const RegimeSpec& regime, const CapacitarySet& set) {
    PenaltyForm P;
    P.regime = regime.tag;
    if (!regime.critical()) return P;  // the zero form
    P.rho = regime.rho;
    switch (regime.tag) {
        case RegimeTag::Critical3:
            P.active_slots = {kTraceZeta2, kTraceZeta3};
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    P.matrix(P.active_slots[i], P.active_slots[j]) =
                        regime.rho * set.gram()(CapacitarySet::kPhi2 + i,
                                                CapacitarySet::kPhi2 + j);
            break;
        case RegimeTag::Critical1:
            P.active_slots = {kTraceZeta1};
            P.matrix(kTraceZeta1, kTraceZeta1) = regime.rho * set.gram_hat_phi1();
            break;
        default:  // CriticalThird
            P.active_slots = {kTraceTwist, kTraceZeta2Prime, kTraceZeta3Prime};
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    P.matrix(P.active_slots[i], P.active_slots[j]) =
                        regime.rho * set.gram_hat_psi()(i, j);
    }
    return P;
}

double coercivity_eigen(const PenaltyForm& penalty) {
    if (penalty.active_slots.empty())
        throw std::invalid_argument("coercivity_eigen: non-critical regime has no active block");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(penalty.active_block(),
                                                      Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    if (!(lo > 0.0))
        throw CoercivityError("coercivity_eigen: active penalty block is not positive definite");
    return lo;
}

}  // namespace patchbeam
