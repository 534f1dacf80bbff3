#ifndef PATCHBEAM_GEOMETRY_HPP
#define PATCHBEAM_GEOMETRY_HPP

#include <Eigen/Core>
#include <iosfwd>
#include <string>
#include <vector>

namespace patchbeam {

// ---------------------------------------------------------------------------
// Section descriptions
// ---------------------------------------------------------------------------

// A bounded planar domain centered at the origin: disc of given radius or an
// a x b rectangle.
struct SectionShape {
    enum class Kind { Disc, Rect };
    Kind kind = Kind::Disc;
    double radius = 1.0;      // disc
    double a = 1.0, b = 1.0;  // rect side lengths

    static SectionShape disc(double r) { return {Kind::Disc, r, 0, 0}; }
    static SectionShape rect(double a, double b) { return {Kind::Rect, 0, a, b}; }

    double area() const;
    double diameter() const;
    double half_extent(int axis) const;  // bounding half-width along y2/y3
    bool contains(const Eigen::Vector2d& p, double scale, double tol_rel = 1e-12) const;
    void validate() const;  // throws MeshError on degenerate dimensions
};

// The cross-section S and the clamping patch profile S0 (the patch itself is
// r_eps * S0, scaled again by eps in physical coordinates).
struct SectionSpec {
    SectionShape outer;  // S
    SectionShape patch;  // S0
};

// ---------------------------------------------------------------------------
// Meshes
// ---------------------------------------------------------------------------

// Conforming quadrilateral mesh of a section, nodes in section coordinates.
struct SectionMesh {
    Eigen::Matrix2Xd nodes;                 // column per node
    Eigen::Matrix<int, 4, Eigen::Dynamic> quads;  // CCW node ids, column per quad
    std::vector<int> boundary;              // outer boundary node ids

    int node_count() const { return static_cast<int>(nodes.cols()); }
    int quad_count() const { return static_cast<int>(quads.cols()); }

    // Sum of quadrature weights (positivity of Jacobians is a build guarantee).
    double area() const;

    // Point location: returns (quad id, reference coords) with forward-map
    // error below 1e-10 * diameter; throws MeshError if p is outside.
    std::pair<int, Eigen::Vector2d> locate(const Eigen::Vector2d& p) const;

    // Per-quad bounding boxes, filled at build time for locate().
    Eigen::Matrix2Xd bbox_min, bbox_max;
    void finalize();  // computes boxes, checks Jacobians
};

enum class MeshKind { Generic, Cylinder, Halfbox };

// Structured hexahedral mesh built by extruding a section mesh along an
// axial coordinate array.  Node (layer k, section node i) has id
// k * section.node_count() + i; same layout for elements.
struct VolumeMesh {
    MeshKind kind = MeshKind::Generic;
    Eigen::Matrix3Xd nodes;                       // physical coordinates
    Eigen::Matrix<int, 8, Eigen::Dynamic> hexes;  // column per element

    SectionMesh section;        // generating section (y' or z' units)
    Eigen::VectorXd axial;      // x1 (cylinder) or z1 (halfbox) layer coords
    double section_scale = 1.0; // physical x' = section_scale * section node

    // Cylinder metadata
    double eps = 0.0, r_eps = 0.0;
    // Halfbox metadata
    double L = 0.0;

    std::vector<int> gamma0, gamma1;     // cylinder clamp sets
    std::vector<int> patch, farfield;    // halfbox sets

    int node_count() const { return static_cast<int>(nodes.cols()); }
    int elem_count() const { return static_cast<int>(hexes.cols()); }
    double volume() const;

    std::pair<int, Eigen::Vector3d> locate(const Eigen::Vector3d& p) const;

    Eigen::Matrix3Xd bbox_min, bbox_max;
    void finalize();

    // Plain-text debug dump: one-line header (version, counts), then nodes
    // and elements.
    void dump(std::ostream& os) const;
};

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

struct GradingParams {
    double ratio = 1.3;       // geometric growth factor away from the patch
    int patch_divisions = 4;  // element edges across the patch half-width
};

// Mesh of S with target element size h (no patch refinement).
SectionMesh build_section_mesh(const SectionShape& shape, double h);

// Mesh of S refined around the patch r_eps * S0, in y' units.
SectionMesh build_cylinder_section(const SectionSpec& spec, double r_eps, double h,
                                   const GradingParams& grading);

// Mesh of (0,1) x eps*S with axial grading toward x1 = 0 (first layer height
// of order eps*r_eps) and in-section refinement around the patch.  Fills
// gamma0 (x1 = 0, x'/(eps r_eps) in closure(S0)) and gamma1 (x1 = 1).
VolumeMesh build_cylinder_mesh(const SectionSpec& spec, double eps, double r_eps,
                               int axial_n, double section_h, const GradingParams& grading);

struct HalfboxParams {
    double core_h_rel = 0.18;  // spacing near the patch, relative to its half-extent
    double ratio = 1.3;        // geometric growth toward the far boundary
};

// Mesh of the truncated half space (0,L) x (-L,L)^2 graded away from the
// Dirichlet patch {0} x S0.  Fills the patch and farfield node sets.
VolumeMesh build_halfbox_mesh(const SectionShape& s0, double L, const HalfboxParams& params);

// Uniform box mesh of (0,lx) x (-ly/2,ly/2) x (-lz/2,lz/2); no node sets.
VolumeMesh build_box_mesh(double lx, double ly, double lz, int nx, int ny, int nz);

// 1D helpers (exposed for tests).
std::vector<double> graded_line(double len, double h0, double ratio, double hcap);
std::vector<double> symmetric_patch_line(double half, double patch_half, int n_patch,
                                         double ratio, double hcap);

}  // namespace patchbeam

#endif
