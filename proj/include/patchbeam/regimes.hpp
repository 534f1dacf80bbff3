#ifndef PATCHBEAM_REGIMES_HPP
#define PATCHBEAM_REGIMES_HPP

#include <Eigen/Core>
#include <string>
#include <vector>

namespace patchbeam {

class CapacitarySet;

// Exact rational exponent, so the regime boundaries p = 3, 1, 1/3 are decided
// without floating-point tolerance.
struct Rational {
    long long num = 0;
    long long den = 1;

    Rational() = default;
    Rational(long long n, long long d);

    // Accepts "3", "2/3", "0.5" (decimals become exact tenth powers).
    static Rational parse(const std::string& text);

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    int compare(long long n, long long d) const;  // sign of *this - n/d
    bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
};

// The seven windows of r_eps = kappa * eps^p relative to eps^3, eps, eps^(1/3).
enum class RegimeTag {
    SubCubic,         // r << eps^3
    Critical3,        // r ~ eps^3
    CubicToLinear,    // eps^3 << r << eps
    Critical1,        // r ~ eps
    LinearToCubeRoot, // eps << r << eps^(1/3)
    CriticalThird,    // r ~ eps^(1/3)
    SuperCubeRoot     // eps^(1/3) << r
};

std::string to_string(RegimeTag tag);

struct RegimeSpec {
    RegimeTag tag = RegimeTag::SubCubic;
    double kappa = 1.0;
    Rational p;
    double rho = 0.0;  // set only for the three critical tags

    bool critical() const {
        return tag == RegimeTag::Critical3 || tag == RegimeTag::Critical1 ||
               tag == RegimeTag::CriticalThird;
    }
    double r_eps(double eps) const;
};

RegimeSpec classify(double kappa, const Rational& p);

// Canonical trace ordering, used by constraint sets, penalty matrices and
// BeamSolution::trace():
//   0: zeta2(0)  1: zeta3(0)  2: zeta1(0)  3: c(0)  4: zeta2'(0)  5: zeta3'(0)
enum TraceSlot {
    kTraceZeta2 = 0,
    kTraceZeta3 = 1,
    kTraceZeta1 = 2,
    kTraceTwist = 3,
    kTraceZeta2Prime = 4,
    kTraceZeta3Prime = 5
};

// Trace slots forced to zero; grows monotonically along the regime order.
std::vector<int> constraint_set(const RegimeSpec& regime);

// The corrector strain P_eps at a point of the rescaled half space,
// assembled from the capacitary strain fields with the regime's prefactor;
// identically zero for non-critical regimes and outside the truncated box.
Eigen::Matrix3d corrector_eval(const RegimeSpec& regime, const CapacitarySet& set,
                               const Eigen::Matrix<double, 6, 1>& trace, double eps,
                               double r_eps, const Eigen::Vector3d& z);

}  // namespace patchbeam

#endif
