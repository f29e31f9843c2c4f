#pragma once

// Candidate eigenvalue spectra for mirror-symmetric chains and the
// transfer conditions (PST spacing, FST phase solution) they must satisfy.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "dome/error.hpp"

namespace dome {

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Eigenvalues in units of the rate J, together with J itself (rad/s).
template <typename Scalar = double>
class Spectrum {
public:
    Spectrum() = default;

    Spectrum(Vec<Scalar> values, double rate_J = 1.0) : values_(std::move(values)), rate_(rate_J) {
        if (values_.size() < 1) throw ValidationError("Spectrum: empty eigenvalue list");
        if (!(rate_ > 0.0) || !std::isfinite(rate_))
            throw ValidationError("Spectrum: rate J must be positive and finite");
        for (Eigen::Index s = 0; s < values_.size(); ++s) {
            if (!std::isfinite(static_cast<double>(values_[s])))
                throw ValidationError("Spectrum: non-finite eigenvalue");
            if (s > 0 && !(values_[s] > values_[s - 1]))
                throw ValidationError("Spectrum: eigenvalues must be strictly increasing (index " +
                                      std::to_string(s) + ")");
        }
    }

    static Spectrum from_list(const std::vector<double>& values, double rate_J = 1.0) {
        Vec<Scalar> v(static_cast<Eigen::Index>(values.size()));
        for (std::size_t i = 0; i < values.size(); ++i) v[static_cast<Eigen::Index>(i)] = Scalar(values[i]);
        return Spectrum(std::move(v), rate_J);
    }

    const Vec<Scalar>& values() const noexcept { return values_; }
    Scalar operator[](Eigen::Index s) const { return values_[s]; }
    double rate() const noexcept { return rate_; }
    int size() const noexcept { return static_cast<int>(values_.size()); }

    template <typename Other>
    Spectrum<Other> cast() const {
        return Spectrum<Other>(values_.template cast<Other>(), rate_);
    }

private:
    Vec<Scalar> values_;
    double rate_ = 1.0;
};

// Phase triple of e^{-iH tau}|1> = e^{i phi}(sin(theta)|1> + e^{i psi} cos(theta)|N>).
struct FstPhase {
    double theta = 0.0;  // [0, pi/2]; 0 is PST
    double psi = 0.0;
    double phi = 0.0;
};

enum class TransferCapability { PstAndFst, PstOnly, PeriodicOnly, Invalid };

inline const char* to_string(TransferCapability c) {
    switch (c) {
        case TransferCapability::PstAndFst: return "PstAndFst";
        case TransferCapability::PstOnly: return "PstOnly";
        case TransferCapability::PeriodicOnly: return "PeriodicOnly";
        case TransferCapability::Invalid: return "Invalid";
    }
    return "Invalid";
}

/// lambda_s = s - (N+1)/2 + (s-2)(s-1) m/2, s = 1..N, in units of J.
template <typename Scalar = double>
Spectrum<Scalar> dome_spectrum(int N, long m, double J = 1.0) {
    if (N < 2) throw ValidationError("dome_spectrum: N must be >= 2, got " + std::to_string(N));
    if (m < 0) throw ValidationError("dome_spectrum: m must be non-negative");
    Vec<Scalar> v(N);
    const Scalar half_n1 = Scalar(N + 1) / Scalar(2);
    for (int s = 1; s <= N; ++s) {
        // (s-2)(s-1) is always even, so the quadratic term is an exact integer.
        const long quad = static_cast<long>(s - 2) * (s - 1) / 2 * m;
        v[s - 1] = Scalar(s) - half_n1 + Scalar(quad);
    }
    return Spectrum<Scalar>(std::move(v), J);
}

namespace detail {
inline constexpr double kSpacingTol = 1e-9;
inline constexpr double kPhaseTol = 1e-9;
}  // namespace detail

// True iff every adjacent gap times tau is an odd multiple of pi.
// tau is measured in units of 1/J (i.e. it is J*t).
template <typename Scalar>
bool check_pst_spacing(const Spectrum<Scalar>& spec, double tau) {
    if (!(tau > 0.0)) return false;
    const auto& v = spec.values();
    for (Eigen::Index s = 0; s + 1 < v.size(); ++s) {
        const double x = static_cast<double>(v[s + 1] - v[s]) * tau / std::numbers::pi;
        const double r = x - 2.0 * std::floor(x / 2.0);  // x mod 2 in [0, 2)
        if (!(std::abs(r - 1.0) < detail::kSpacingTol)) return false;
    }
    return true;
}

inline double wrap_angle(double a) {
    a = std::remainder(a, 2.0 * std::numbers::pi);
    if (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
    return a;
}

// Solves e^{-i lambda_s tau} = e^{i phi}(sin theta + e^{i psi} cos theta (-1)^{N+s})
// for all s, assuming the mirror sign pattern of the end-site polynomial.
// The two residue classes of (-1)^{N+s} give sum/difference equations for
// u = e^{i phi} sin theta and v = e^{i(phi+psi)} cos theta; every constraint is
// then re-checked. tau is in units of 1/J.
template <typename Scalar>
std::optional<FstPhase> solve_fst_phase(const Spectrum<Scalar>& spec, double tau) {
    using C = std::complex<double>;
    const int N = spec.size();
    if (N < 2 || !(tau > 0.0)) return std::nullopt;

    std::vector<C> z(N);
    for (int s = 1; s <= N; ++s)
        z[s - 1] = std::exp(C(0.0, -static_cast<double>(spec[s - 1]) * tau));

    auto sign = [N](int s) { return ((N + s) % 2 == 0) ? 1.0 : -1.0; };
    C plus{0.0, 0.0}, minus{0.0, 0.0};
    int n_plus = 0, n_minus = 0;
    for (int s = 1; s <= N; ++s) {
        if (sign(s) > 0) { plus += z[s - 1]; ++n_plus; }
        else { minus += z[s - 1]; ++n_minus; }
    }
    plus /= double(n_plus);
    minus /= double(n_minus);

    const C u = 0.5 * (plus + minus);
    const C v = 0.5 * (plus - minus);
    const double su = std::abs(u), cv = std::abs(v);
    if (std::abs(su * su + cv * cv - 1.0) > 1e-7) return std::nullopt;

    FstPhase out;
    out.theta = std::atan2(su, cv);
    if (su < detail::kPhaseTol) {
        out.theta = 0.0;
        out.psi = 0.0;
        out.phi = std::arg(v);
    } else if (cv < detail::kPhaseTol) {
        out.theta = std::numbers::pi / 2;
        out.psi = 0.0;
        out.phi = std::arg(u);
    } else {
        out.phi = std::arg(u);
        out.psi = wrap_angle(std::arg(v) - out.phi);
    }

    const C ephi = std::polar(1.0, out.phi);
    const C epsi = std::polar(1.0, out.psi);
    for (int s = 1; s <= N; ++s) {
        const C model = ephi * (std::sin(out.theta) + epsi * std::cos(out.theta) * sign(s));
        if (std::abs(model - z[s - 1]) > 1e-8) return std::nullopt;
    }
    return out;
}

inline TransferCapability classify_m(long m) {
    if (m < 0) return TransferCapability::Invalid;
    if (m == 0) return TransferCapability::PstOnly;  // line model
    if (m % 2 == 1) return TransferCapability::PeriodicOnly;
    if (m % 4 == 2) return TransferCapability::PstAndFst;
    return TransferCapability::PstOnly;
}

}  // namespace dome
