#ifndef PATCHBEAM_CONFIG_HPP
#define PATCHBEAM_CONFIG_HPP

#include <array>
#include <string>
#include <vector>

#include "patchbeam/expr.hpp"
#include "patchbeam/geometry.hpp"
#include "patchbeam/material.hpp"
#include "patchbeam/regimes.hpp"

namespace patchbeam {

// Run configuration, read from a plain-text key=value file with dotted
// section prefixes (material.young=1.0).  Unknown keys are errors.
struct StudyConfig {
    MaterialField material = MaterialField::isotropic(1.0, 0.3);
    SectionSpec section;  // S and S0

    std::array<Expr, 3> f;  // body load coefficient functions on Omega
    std::array<Expr, 6> h;  // prestrain coefficients, Voigt order

    double kappa = 1.0;
    Rational p = Rational(2, 1);

    std::vector<double> eps_list = {0.2, 0.1, 0.05};

    int axial_n = 24;
    double section_h = 0.16;
    double grading = 1.3;
    int patch_divisions = 4;

    int limit_n_axial = 64;
    double limit_section_h = 0.05;

    std::vector<double> capacity_L = {8.0, 16.0};
    double capacity_core_h = 0.18;
    double capacity_grading = 1.3;

    double tol = 1e-10;
    int maxit_factor = 50;
    int threads = 1;
    std::string out_dir = "out";

    RegimeSpec regime() const { return classify(kappa, p); }
    bool has_load() const;
    void validate() const;  // throws ConfigError on inconsistent settings
};

StudyConfig parse_config_text(const std::string& text);
StudyConfig parse_config_file(const std::string& path);

}  // namespace patchbeam

#endif
