#include "dome/noise.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

#include "dome/metrics.hpp"

namespace dome {

const char* to_string(DisorderTarget t) {
    switch (t) {
        case DisorderTarget::MiddleFrequencies: return "middle_frequencies";
        case DisorderTarget::EdgeFrequencies: return "edge_frequencies";
        case DisorderTarget::Couplings: return "couplings";
        case DisorderTarget::All: return "all";
    }
    return "all";
}

DisorderTarget disorder_target_from_string(const std::string& s) {
    if (s == "middle_frequencies" || s == "middles") return DisorderTarget::MiddleFrequencies;
    if (s == "edge_frequencies" || s == "edges") return DisorderTarget::EdgeFrequencies;
    if (s == "couplings") return DisorderTarget::Couplings;
    if (s == "all") return DisorderTarget::All;
    throw ValidationError("unknown disorder target '" + s + "'");
}

const char* to_string(Metric m) { return m == Metric::BellAtQuarterT ? "bell" : "qpt"; }

Metric metric_from_string(const std::string& s) {
    if (s == "bell" || s == "entanglement") return Metric::BellAtQuarterT;
    if (s == "qpt" || s == "transfer") return Metric::QptAtHalfT;
    throw ValidationError("unknown metric '" + s + "'");
}

void DisorderConfig::validate() const {
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ValidationError("disorder sigma must be >= 0");
    if (samples < 1) throw ValidationError("disorder samples must be >= 1");
}

// ------------------------------------------------------------------ RNG

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// (0, 1]
double to_unit(std::uint64_t x) { return double((x >> 11) + 1) * 0x1.0p-53; }

}  // namespace

double standard_normal(std::uint64_t seed, std::uint64_t sample, std::uint64_t parameter) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ sample);
    h = splitmix64(h ^ (parameter * 0xD1B54A32D192ED03ULL));
    const double u1 = to_unit(splitmix64(h));
    const double u2 = to_unit(splitmix64(h + 1));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// ------------------------------------------------------------------ disorder

namespace {

bool hits_frequency(DisorderTarget t, bool edge) {
    switch (t) {
        case DisorderTarget::All: return true;
        case DisorderTarget::EdgeFrequencies: return edge;
        case DisorderTarget::MiddleFrequencies: return !edge;
        case DisorderTarget::Couplings: return false;
    }
    return false;
}

bool hits_coupling(DisorderTarget t) { return t == DisorderTarget::Couplings || t == DisorderTarget::All; }

}  // namespace

TridiagonalHamiltonian<double> perturb(const TridiagonalHamiltonian<double>& h, const DisorderConfig& cfg,
                                       int draw_index) {
    cfg.validate();
    if (draw_index < 0 || draw_index >= cfg.samples) throw ValidationError("perturb: draw index out of range");
    auto out = h;
    if (cfg.sigma == 0.0) return out;
    const int n = h.size();
    const auto draw = static_cast<std::uint64_t>(draw_index);
    for (int i = 0; i < n; ++i)
        if (hits_frequency(cfg.target, i == 0 || i == n - 1))
            out.omegas[i] += cfg.sigma * standard_normal(cfg.seed, draw, static_cast<std::uint64_t>(i));
    if (hits_coupling(cfg.target))
        for (int i = 0; i + 1 < n; ++i)
            out.couplings[i] += cfg.sigma * standard_normal(cfg.seed, draw, static_cast<std::uint64_t>(n + i));
    return out;
}

LatticeHamiltonian LatticeHamiltonian::from_grid(const Grid2D& g) {
    LatticeHamiltonian l;
    l.rows = g.rows;
    l.cols = g.cols;
    l.site_omega = g.frequency_table();
    l.coupling_x.resize(g.rows, std::max(g.cols - 1, 0));
    l.coupling_y.resize(std::max(g.rows - 1, 0), g.cols);
    for (int r = 0; r < g.rows; ++r)
        for (int c = 0; c + 1 < g.cols; ++c) l.coupling_x(r, c) = g.coupling_x[c];
    for (int r = 0; r + 1 < g.rows; ++r)
        for (int c = 0; c < g.cols; ++c) l.coupling_y(r, c) = g.coupling_y[r];
    return l;
}

Eigen::MatrixXd LatticeHamiltonian::matrix() const {
    const int d = rows * cols;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(d, d);
    auto idx = [this](int r, int c) { return r * cols + c; };
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            h(idx(r, c), idx(r, c)) = site_omega(r, c);
            if (c + 1 < cols) h(idx(r, c), idx(r, c + 1)) = h(idx(r, c + 1), idx(r, c)) = coupling_x(r, c);
            if (r + 1 < rows) h(idx(r, c), idx(r + 1, c)) = h(idx(r + 1, c), idx(r, c)) = coupling_y(r, c);
        }
    }
    return h;
}

bool LatticeHamiltonian::is_corner(int r, int c) const {
    return (r == 0 || r == rows - 1) && (c == 0 || c == cols - 1);
}

LatticeHamiltonian perturb(const LatticeHamiltonian& h, const DisorderConfig& cfg, int draw_index) {
    cfg.validate();
    if (draw_index < 0 || draw_index >= cfg.samples) throw ValidationError("perturb: draw index out of range");
    auto out = h;
    if (cfg.sigma == 0.0) return out;
    const auto draw = static_cast<std::uint64_t>(draw_index);
    const std::uint64_t d = static_cast<std::uint64_t>(h.rows) * h.cols;
    for (int r = 0; r < h.rows; ++r)
        for (int c = 0; c < h.cols; ++c)
            if (hits_frequency(cfg.target, h.is_corner(r, c)))
                out.site_omega(r, c) +=
                    cfg.sigma * standard_normal(cfg.seed, draw, static_cast<std::uint64_t>(r * h.cols + c));
    if (hits_coupling(cfg.target)) {
        std::uint64_t p = d;
        for (int r = 0; r < h.rows; ++r)
            for (int c = 0; c + 1 < h.cols; ++c) out.coupling_x(r, c) += cfg.sigma * standard_normal(cfg.seed, draw, p++);
        for (int r = 0; r + 1 < h.rows; ++r)
            for (int c = 0; c < h.cols; ++c) out.coupling_y(r, c) += cfg.sigma * standard_normal(cfg.seed, draw, p++);
    }
    return out;
}

// ------------------------------------------------------------------ models

Model with_m(const Model& model, long m) {
    if (const auto* c = std::get_if<ChainModel>(&model)) return ChainModel{c->N, m};
    const auto& g = std::get<GridModel>(model);
    return GridModel{g.rows, g.cols, m, m};
}

long model_m(const Model& model) {
    if (const auto* c = std::get_if<ChainModel>(&model)) return c->m;
    return std::get<GridModel>(model).m_x;
}

void validate_for_metric(const Model& model, Metric metric) {
    if (const auto* c = std::get_if<ChainModel>(&model)) {
        if (c->N < 2) throw ValidationError("chain model needs N >= 2");
        if (metric == Metric::BellAtQuarterT && classify_m(c->m) != TransferCapability::PstAndFst)
            throw ValidationError("Bell metric needs an FST-capable m (2, 6, 10, ...), got m=" + std::to_string(c->m));
        if (metric == Metric::QptAtHalfT && c->m % 2 == 1)
            throw ValidationError("QPT metric needs a PST-capable (even) m");
        return;
    }
    const auto& g = std::get<GridModel>(model);
    if (g.rows < 2 || g.cols < 2) throw ValidationError("grid model needs rows, cols >= 2");
    for (long m : {g.m_x, g.m_y}) {
        if (metric == Metric::BellAtQuarterT && classify_m(m) != TransferCapability::PstAndFst)
            throw ValidationError("W metric needs FST-capable m_x and m_y");
        if (metric == Metric::QptAtHalfT && m % 2 == 1) throw ValidationError("QPT metric needs even m_x and m_y");
    }
}

Eigen::MatrixXd model_hamiltonian(const Model& model) {
    if (const auto* c = std::get_if<ChainModel>(&model)) return dome_hamiltonian<double>({c->N, c->m, 1.0}).dense();
    const auto& g = std::get<GridModel>(model);
    return single_excitation_matrix(grid_2d(g.rows, g.cols, g.m_x, g.m_y));
}

double evaluate_metric(const Model& model, const Eigen::MatrixXd& hamiltonian, Metric metric,
                       const DecoherenceConfig& deco) {
    const double period = 2.0 * std::numbers::pi;  // units of 1/J
    const int d = static_cast<int>(hamiltonian.rows());
    const auto* chain = std::get_if<ChainModel>(&model);

    if (metric == Metric::QptAtHalfT) {
        QptContext ctx{hamiltonian, deco, period / 2.0, 1, d};
        return simulate_qpt(ctx).fidelity;
    }

    const double t = period / 4.0;
    Eigen::MatrixXcd rho;
    if (deco.closed()) {
        const Eigen::VectorXcd psi = ClosedPropagator(hamiltonian).apply(QuantumState::site(d, 1).amplitudes(), t);
        rho = psi * psi.adjoint();
    } else {
        const Eigen::MatrixXcd rho0 = DensityMatrix::pure(QuantumState::site(d, 1)).matrix();
        rho = LindbladPropagator(hamiltonian, deco).evolve(rho0, t);
    }
    if (chain) return bell_fidelity(reduce_to_pair(rho, 1, d), ideal_end_phase(chain->N));

    const auto& g = std::get<GridModel>(model);
    const std::vector<int> corners = {1, g.cols, (g.rows - 1) * g.cols + 1, d};
    return w_fidelity(reduce_to_sites(rho, corners), ideal_w_state(g.rows, g.cols));
}

// ------------------------------------------------------------------ sweeps

double pairwise_sum(std::span<const double> values) {
    if (values.size() <= 8) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

namespace {

template <typename Fn>
void parallel_for(int count, int threads, Fn&& fn) {
    threads = std::clamp(threads, 1, std::max(count, 1));
    if (threads == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (int i = next++; i < count; i = next++) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace

SweepPoint sweep_coherent(const Model& model, const DisorderConfig& cfg, Metric metric, const DecoherenceConfig& deco,
                          int threads) {
    cfg.validate();
    validate_for_metric(model, metric);

    std::vector<double> values(cfg.samples, 0.0);
    std::vector<char> ok(cfg.samples, 0);

    parallel_for(cfg.samples, threads, [&](int k) {
        Eigen::MatrixXd h;
        if (const auto* c = std::get_if<ChainModel>(&model)) {
            h = perturb(dome_hamiltonian<double>({c->N, c->m, 1.0}), cfg, k).dense();
        } else {
            const auto& g = std::get<GridModel>(model);
            h = perturb(LatticeHamiltonian::from_grid(grid_2d(g.rows, g.cols, g.m_x, g.m_y)), cfg, k).matrix();
        }
        try {
            values[k] = evaluate_metric(model, h, metric, deco);
            ok[k] = std::isfinite(values[k]) ? 1 : 0;
        } catch (const NumericalError&) {
            ok[k] = 0;
        }
    });

    std::vector<double> good;
    good.reserve(values.size());
    for (int k = 0; k < cfg.samples; ++k)
        if (ok[k]) good.push_back(values[k]);

    SweepPoint p;
    p.axis = cfg.sigma;
    p.m = model_m(model);
    p.samples = static_cast<int>(good.size());
    p.failures = cfg.samples - p.samples;
    if (good.empty()) return p;
    p.mean = pairwise_sum(good) / double(good.size());
    if (good.size() > 1) {
        std::vector<double> sq(good.size());
        for (std::size_t i = 0; i < good.size(); ++i) sq[i] = (good[i] - p.mean) * (good[i] - p.mean);
        p.std = std::sqrt(pairwise_sum(sq) / double(good.size() - 1));
    }
    return p;
}

SweepResult sweep_sigma(const Model& model, const std::vector<long>& m_values, DisorderTarget target,
                        const std::vector<double>& sigmas, int samples, std::uint64_t seed, Metric metric,
                        int threads) {
    SweepResult out;
    out.axis_name = "sigma_over_J";
    for (long m : m_values) {
        for (double sigma : sigmas) {
            const DisorderConfig cfg{target, sigma, samples, seed};
            out.points.push_back(sweep_coherent(with_m(model, m), cfg, metric, {}, threads));
        }
    }
    return out;
}

DecoherenceScan sweep_decoherence(const Model& model, Metric metric, const std::vector<long>& m_values,
                                  DecoherenceAxis axis, const std::vector<double>& axis_us, double fixed_us,
                                  double period_ns, int threads) {
    if (m_values.empty() || axis_us.empty()) throw ValidationError("sweep_decoherence: empty grid");
    if (!(period_ns > 0.0) || !(fixed_us > 0.0)) throw ValidationError("sweep_decoherence: times must be positive");
    const double rate = 2.0 * std::numbers::pi / (period_ns * 1e-9);

    DecoherenceScan scan;
    scan.axis = axis;
    scan.fixed_us = fixed_us;
    scan.m_values = m_values;
    scan.axis_us = axis_us;
    const int nm = static_cast<int>(m_values.size());
    const int nx = static_cast<int>(axis_us.size());
    scan.fidelity.resize(nm, nx);

    for (long m : m_values) validate_for_metric(with_m(model, m), metric);

    parallel_for(nm * nx, threads, [&](int k) {
        const int i = k / nx, j = k % nx;
        const Model mdl = with_m(model, m_values[i]);
        const double t1_us = axis == DecoherenceAxis::T1 ? axis_us[j] : fixed_us;
        const double tphi_us = axis == DecoherenceAxis::Tphi ? axis_us[j] : fixed_us;
        const auto deco = DecoherenceConfig::from_physical(t1_us * 1e-6, tphi_us * 1e-6, rate);
        scan.fidelity(i, j) = evaluate_metric(mdl, model_hamiltonian(mdl), metric, deco);
    });

    scan.gain = scan.fidelity.rowwise() - scan.fidelity.row(0);
    return scan;
}

}  // namespace dome
