#pragma once

// Coupling budgets and cascaded transfer planning. Rates are angular
// frequencies (rad/s), durations in seconds.

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "dome/error.hpp"

namespace dome {

enum class ChainKind { Line, Dome };
enum class CascadeMode { PST, FST };

const char* to_string(ChainKind k);
const char* to_string(CascadeMode m);
ChainKind chain_kind_from_string(const std::string& s);
CascadeMode cascade_mode_from_string(const std::string& s);

struct CouplingBudget {
    double J_max_bound = 0.0;
    double J_min = 0.0;

    void validate() const;  // J_max_bound >= J_min > 0
    double ratio() const { return J_max_bound / J_min; }
};

struct MaxCoupling {
    double exact = 0.0;
    double asymptotic = 0.0;  // N J / 4 (line), m N^2 J / 8 (dome)
};

/// Largest coupling of an N-site chain at rate J. The line model ignores m.
MaxCoupling max_coupling(ChainKind kind, int N, long m, double J = 1.0);

/// Large-N estimate of the total time of k equal segments of N/k sites each
/// at the coupling bound, without switching overhead.
double asymptotic_total(ChainKind kind, int N, int k, long m, double J_max_bound, CascadeMode mode);

struct CascadeSegment {
    int first_site = 1;  // 1-based, shared with the previous segment's last site
    int sites = 2;
    double J_sub = 0.0;
    double duration = 0.0;
    double asymptotic_duration = 0.0;
    bool fractional = false;  // first FST segment runs for half a PST time
};

struct CascadePlan {
    ChainKind kind = ChainKind::Line;
    CascadeMode mode = CascadeMode::PST;
    int N = 0;
    long m = 0;
    CouplingBudget budget;
    double switch_overhead = 0.0;  // added once per segment boundary
    std::vector<CascadeSegment> segments;
    double total = 0.0;             // sum of durations plus overheads
    double total_asymptotic = 0.0;

    int k() const { return static_cast<int>(segments.size()); }
    double max_segment_coupling() const;  // exact, rad/s
    // N x N excitation block with only segment i (0-based) switched on.
    Eigen::MatrixXd segment_hamiltonian(int i) const;
};

/// Splits N-1 bonds over k segments, remainder to the earliest ones. Throws
/// NumericalError with where() = 1-based limiting segment when J_sub < J_min.
CascadePlan plan_cascade(int N, int k, const CouplingBudget& budget, ChainKind kind, long m,
                         CascadeMode mode = CascadeMode::PST, double switch_overhead = 0.0);

/// Smallest k in 1..N-1 for which plan_cascade succeeds.
CascadePlan plan_cascade_min_k(int N, const CouplingBudget& budget, ChainKind kind, long m,
                               CascadeMode mode = CascadeMode::PST, double switch_overhead = 0.0);

struct FeasibleSize {
    int exact = 0;       // largest N with exact max coupling at J_min <= J_max_bound
    int asymptotic = 0;  // floor(4 J_max / J_min) or floor(sqrt(8 J_max / (m J_min)))
};

FeasibleSize feasible_N(const CouplingBudget& budget, ChainKind kind, long m);

}  // namespace dome
