#include "dome/cascade.hpp"

#include <cmath>
#include <numbers>

#include "dome/models.hpp"

namespace dome {

const char* to_string(ChainKind k) { return k == ChainKind::Line ? "line" : "dome"; }
const char* to_string(CascadeMode m) { return m == CascadeMode::PST ? "pst" : "fst"; }

ChainKind chain_kind_from_string(const std::string& s) {
    if (s == "line" || s == "Line") return ChainKind::Line;
    if (s == "dome" || s == "Dome") return ChainKind::Dome;
    throw ValidationError("unknown model '" + s + "'");
}

CascadeMode cascade_mode_from_string(const std::string& s) {
    if (s == "pst" || s == "PST") return CascadeMode::PST;
    if (s == "fst" || s == "FST") return CascadeMode::FST;
    throw ValidationError("unknown cascade mode '" + s + "'");
}

void CouplingBudget::validate() const {
    if (!(J_min > 0.0) || !std::isfinite(J_min) || !std::isfinite(J_max_bound))
        throw ValidationError("budget: J_min must be positive and finite");
    if (J_max_bound < J_min) throw ValidationError("budget: J_max_bound must be >= J_min");
}

namespace {

long effective_m(ChainKind kind, long m) { return kind == ChainKind::Line ? 0 : m; }

double unit_max_coupling(ChainKind kind, int N, long m) {
    return dome_hamiltonian<double>({N, effective_m(kind, m), 1.0}).couplings.maxCoeff();
}

// Single-chain PST time at the budget, N-site asymptotic formula.
double asymptotic_pst_time(ChainKind kind, double n, long m, double J_max) {
    const long me = effective_m(kind, m);
    if (me == 0) return std::numbers::pi * n / (4.0 * J_max);
    return std::numbers::pi * double(me) * n * n / (8.0 * J_max);
}

}  // namespace

double asymptotic_total(ChainKind kind, int N, int k, long m, double J_max_bound, CascadeMode mode) {
    if (N < 2 || k < 1) throw ValidationError("asymptotic_total: need N >= 2 and k >= 1");
    const double per = asymptotic_pst_time(kind, double(N) / k, m, J_max_bound);
    return per * (mode == CascadeMode::FST ? k - 0.5 : double(k));
}

MaxCoupling max_coupling(ChainKind kind, int N, long m, double J) {
    if (N < 2) throw ValidationError("max_coupling: N must be >= 2");
    if (kind == ChainKind::Dome && m < 0) throw ValidationError("max_coupling: m must be >= 0");
    MaxCoupling out;
    out.exact = J * unit_max_coupling(kind, N, m);
    const long me = effective_m(kind, m);
    out.asymptotic = me == 0 ? N * J / 4.0 : double(me) * N * N * J / 8.0;
    return out;
}

double CascadePlan::max_segment_coupling() const {
    double best = 0.0;
    for (const auto& s : segments) best = std::max(best, max_coupling(kind, s.sites, m, s.J_sub).exact);
    return best;
}

Eigen::MatrixXd CascadePlan::segment_hamiltonian(int i) const {
    if (i < 0 || i >= k()) throw ValidationError("segment index out of range");
    const auto& s = segments[i];
    const auto h = dome_hamiltonian<double>({s.sites, effective_m(kind, m), 1.0});
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(N, N);
    out.block(s.first_site - 1, s.first_site - 1, s.sites, s.sites) = s.J_sub * h.dense();
    return out;
}

CascadePlan plan_cascade(int N, int k, const CouplingBudget& budget, ChainKind kind, long m, CascadeMode mode,
                         double switch_overhead) {
    budget.validate();
    if (N < 2) throw ValidationError("plan_cascade: N must be >= 2");
    if (k < 1 || k > N - 1) throw ValidationError("plan_cascade: k must lie in 1..N-1");
    if (!(switch_overhead >= 0.0)) throw ValidationError("plan_cascade: switch overhead must be >= 0");
    const long me = effective_m(kind, m);
    if (me < 0) throw ValidationError("plan_cascade: m must be >= 0");
    if (me % 2 == 1) throw ValidationError("plan_cascade: odd m has no perfect transfer");
    if (mode == CascadeMode::FST && classify_m(me) != TransferCapability::PstAndFst)
        throw ValidationError("plan_cascade: FST needs m = 2 mod 4");

    CascadePlan plan;
    plan.kind = kind;
    plan.mode = mode;
    plan.N = N;
    plan.m = me;
    plan.budget = budget;
    plan.switch_overhead = switch_overhead;

    const int bonds = N - 1, base = bonds / k, extra = bonds % k;
    const double per_segment_asym = asymptotic_pst_time(kind, double(N) / k, me, budget.J_max_bound);
    int first = 1;
    for (int i = 0; i < k; ++i) {
        CascadeSegment s;
        s.first_site = first;
        s.sites = base + (i < extra ? 1 : 0) + 1;
        s.J_sub = budget.J_max_bound / unit_max_coupling(kind, s.sites, me);
        if (s.J_sub < budget.J_min)
            throw NumericalError("plan_cascade: segment " + std::to_string(i + 1) + " (" + std::to_string(s.sites) +
                                     " sites) needs J_sub below J_min",
                                 i + 1);
        s.fractional = mode == CascadeMode::FST && i == 0;
        s.duration = std::numbers::pi / s.J_sub * (s.fractional ? 0.5 : 1.0);
        s.asymptotic_duration = per_segment_asym * (s.fractional ? 0.5 : 1.0);
        plan.total += s.duration;
        plan.total_asymptotic += s.asymptotic_duration;
        plan.segments.push_back(s);
        first += s.sites - 1;
    }
    plan.total += switch_overhead * (k - 1);
    plan.total_asymptotic += switch_overhead * (k - 1);
    return plan;
}

CascadePlan plan_cascade_min_k(int N, const CouplingBudget& budget, ChainKind kind, long m, CascadeMode mode,
                               double switch_overhead) {
    if (N < 2) throw ValidationError("plan_cascade: N must be >= 2");
    for (int k = 1; k < N - 1; ++k) {
        try {
            return plan_cascade(N, k, budget, kind, m, mode, switch_overhead);
        } catch (const NumericalError&) {
        }
    }
    return plan_cascade(N, N - 1, budget, kind, m, mode, switch_overhead);
}

FeasibleSize feasible_N(const CouplingBudget& budget, ChainKind kind, long m) {
    budget.validate();
    const long me = effective_m(kind, m);
    if (me < 0) throw ValidationError("feasible_N: m must be >= 0");
    const double r = budget.ratio();

    FeasibleSize out;
    out.asymptotic = me == 0 ? int(std::floor(4.0 * r)) : int(std::floor(std::sqrt(8.0 * r / double(me))));
    // Exact max coupling grows monotonically with N.
    if (out.asymptotic > 100000) throw ValidationError("feasible_N: budget ratio too large to search");
    int n = 1;
    while (unit_max_coupling(kind, n + 1, me) <= r) ++n;
    out.exact = n;
    return out;
}

}  // namespace dome
