#include "patchbeam/regimes.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "patchbeam/capacity.hpp"
#include "patchbeam/errors.hpp"

namespace patchbeam {

Rational::Rational(long long n, long long d) : num(n), den(d) {
    if (den == 0) throw ConfigError("rational exponent with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const long long g = std::gcd(std::abs(num), den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
}

Rational Rational::parse(const std::string& text) {
    const auto slash = text.find('/');
    auto parse_part = [&](const std::string& part) -> Rational {
        std::size_t dot = part.find('.');
        try {
            if (dot == std::string::npos) return Rational(std::stoll(part), 1);
            const std::string ip = part.substr(0, dot), fp = part.substr(dot + 1);
            if (fp.size() > 12) throw ConfigError("exponent has too many decimals: " + part);
            long long den = 1;
            for (std::size_t i = 0; i < fp.size(); ++i) den *= 10;
            const long long whole = ip.empty() ? 0 : std::stoll(ip);
            return Rational(whole * den + (fp.empty() ? 0 : std::stoll(fp)), den);
        } catch (const std::invalid_argument&) {
            throw ConfigError("bad rational exponent: " + text);
        } catch (const std::out_of_range&) {
            throw ConfigError("rational exponent out of range: " + text);
        }
    };
    if (slash == std::string::npos) return parse_part(text);
    const Rational a = parse_part(text.substr(0, slash));
    const Rational b = parse_part(text.substr(slash + 1));
    if (b.num == 0) throw ConfigError("rational exponent divides by zero: " + text);
    return Rational(a.num * b.den, a.den * b.num);
}

int Rational::compare(long long n, long long d) const {
    const long long lhs = num * d, rhs = n * den;
    return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
}

std::string to_string(RegimeTag tag) {
    switch (tag) {
        case RegimeTag::SubCubic: return "sub-eps3";
        case RegimeTag::Critical3: return "critical-eps3";
        case RegimeTag::CubicToLinear: return "eps3-to-eps";
        case RegimeTag::Critical1: return "critical-eps";
        case RegimeTag::LinearToCubeRoot: return "eps-to-eps13";
        case RegimeTag::CriticalThird: return "critical-eps13";
        default: return "super-eps13";
    }
}

double RegimeSpec::r_eps(double eps) const {
    return kappa * std::pow(eps, p.value());
}

RegimeSpec classify(double kappa, const Rational& p) {
    if (!(kappa > 0.0)) throw std::invalid_argument("classify: kappa must be positive");
    if (p.compare(0, 1) < 0) throw std::invalid_argument("classify: exponent must be >= 0");
    RegimeSpec r;
    r.kappa = kappa;
    r.p = p;
    if (p.compare(3, 1) > 0) {
        r.tag = RegimeTag::SubCubic;
    } else if (p.compare(3, 1) == 0) {
        r.tag = RegimeTag::Critical3;
        r.rho = kappa;  // r/eps^3 -> kappa
    } else if (p.compare(1, 1) > 0) {
        r.tag = RegimeTag::CubicToLinear;
    } else if (p.compare(1, 1) == 0) {
        r.tag = RegimeTag::Critical1;
        r.rho = kappa;  // r/eps -> kappa
    } else if (p.compare(1, 3) > 0) {
        r.tag = RegimeTag::LinearToCubeRoot;
    } else if (p.compare(1, 3) == 0) {
        r.tag = RegimeTag::CriticalThird;
        r.rho = kappa * kappa * kappa;  // r^3/eps -> kappa^3
    } else {
        r.tag = RegimeTag::SuperCubeRoot;
    }
    return r;
}

std::vector<int> constraint_set(const RegimeSpec& regime) {
    switch (regime.tag) {
        case RegimeTag::SubCubic:
        case RegimeTag::Critical3: return {};
        case RegimeTag::CubicToLinear:
        case RegimeTag::Critical1: return {kTraceZeta2, kTraceZeta3};
        case RegimeTag::LinearToCubeRoot:
        case RegimeTag::CriticalThird: return {kTraceZeta2, kTraceZeta3, kTraceZeta1};
        default:
            return {kTraceZeta2, kTraceZeta3, kTraceZeta1, kTraceTwist, kTraceZeta2Prime,
                    kTraceZeta3Prime};
    }
}

Eigen::Matrix3d corrector_eval(const RegimeSpec& regime, const CapacitarySet& set,
                               const Eigen::Matrix<double, 6, 1>& trace, double eps,
                               double r_eps, const Eigen::Vector3d& z) {
    if (!regime.critical() || !set.inside(z)) return Eigen::Matrix3d::Zero();
    switch (regime.tag) {
        case RegimeTag::Critical3: {
            if (trace[kTraceZeta2] == 0.0 && trace[kTraceZeta3] == 0.0)
                return Eigen::Matrix3d::Zero();
            const double scale = -1.0 / (eps * eps * r_eps);
            return scale * (trace[kTraceZeta2] * set.strain(CapacitarySet::kPhi2, z) +
                            trace[kTraceZeta3] * set.strain(CapacitarySet::kPhi3, z));
        }
        case RegimeTag::Critical1: {
            if (trace[kTraceZeta1] == 0.0) return Eigen::Matrix3d::Zero();
            return (-trace[kTraceZeta1] / (eps * r_eps)) * set.strain(CapacitarySet::kPhiHat1, z);
        }
        default: {  // CriticalThird
            if (trace[kTraceTwist] == 0.0 && trace[kTraceZeta2Prime] == 0.0 &&
                trace[kTraceZeta3Prime] == 0.0)
                return Eigen::Matrix3d::Zero();
            const double scale = -1.0 / eps;
            return scale * (trace[kTraceTwist] * set.strain(CapacitarySet::kPsiHat1, z) +
                            trace[kTraceZeta2Prime] * set.strain(CapacitarySet::kPsiHat2, z) +
                            trace[kTraceZeta3Prime] * set.strain(CapacitarySet::kPsiHat3, z));
        }
    }
}

}  // namespace patchbeam
