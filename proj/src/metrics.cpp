#include "dome/metrics.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <string>

namespace dome {

namespace {

void check_sites(const std::vector<int>& sites, int d) {
    if (sites.empty()) throw ValidationError("reduce: no sites given");
    for (std::size_t i = 0; i < sites.size(); ++i) {
        if (sites[i] < 1 || sites[i] > d)
            throw ValidationError("reduce: site " + std::to_string(sites[i]) + " out of range");
        for (std::size_t j = 0; j < i; ++j)
            if (sites[i] == sites[j]) throw ValidationError("reduce: repeated site");
    }
}

const std::array<Eigen::Matrix2cd, 4>& paulis() {
    static const std::array<Eigen::Matrix2cd, 4> p = [] {
        std::array<Eigen::Matrix2cd, 4> out;
        const Complex i(0.0, 1.0);
        out[0] << 1, 0, 0, 1;
        out[1] << 0, 1, 1, 0;
        out[2] << 0, -i, i, 0;
        out[3] << 1, 0, 0, -1;
        return out;
    }();
    return p;
}

}  // namespace

Eigen::MatrixXcd reduce_to_sites(const Eigen::MatrixXcd& rho, const std::vector<int>& sites) {
    const int d = static_cast<int>(rho.rows()) - 1;
    check_sites(sites, d);
    const int k = static_cast<int>(sites.size());
    const Eigen::Index dim = Eigen::Index(1) << k;

    // Reduced configurations with at most one excitation: "none" or site p up.
    auto index_of = [k](int p) { return Eigen::Index(1) << (k - 1 - p); };

    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
    std::vector<bool> kept(d + 1, false);
    for (int s : sites) kept[s] = true;

    Complex none = rho(0, 0);
    for (int n = 1; n <= d; ++n)
        if (!kept[n]) none += rho(n, n);
    out(0, 0) = none;
    for (int p = 0; p < k; ++p) {
        const Eigen::Index ip = index_of(p);
        out(ip, 0) = rho(sites[p], 0);
        out(0, ip) = rho(0, sites[p]);
        for (int q = 0; q < k; ++q) out(ip, index_of(q)) = rho(sites[p], sites[q]);
    }
    return out;
}

Eigen::MatrixXcd reduce_to_sites(const QuantumState& psi, const std::vector<int>& sites) {
    return reduce_to_sites(Eigen::MatrixXcd(psi.amplitudes() * psi.amplitudes().adjoint()), sites);
}

Eigen::Matrix4cd reduce_to_pair(const Eigen::MatrixXcd& rho, int site_a, int site_b) {
    return reduce_to_sites(rho, {site_a, site_b});
}

Eigen::Matrix4cd reduce_to_pair(const QuantumState& psi, int site_a, int site_b) {
    return reduce_to_sites(psi, {site_a, site_b});
}

Complex ideal_end_phase(int N) { return Complex(0.0, (N % 2 == 1) ? 1.0 : -1.0); }

Eigen::Vector4cd bell_state(Complex relative_phase) {
    // index = 2*bit(near) + bit(far); up = 1
    Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
    v[2] = 1.0 / std::numbers::sqrt2;
    v[1] = relative_phase / std::abs(relative_phase) / std::numbers::sqrt2;
    return v;
}

double bell_fidelity(const Eigen::Matrix4cd& rho_pair, Complex relative_phase) {
    const Eigen::Vector4cd psi = bell_state(relative_phase);
    return std::real(psi.dot(rho_pair * psi));
}

std::array<int, 4> corner_sites(const Grid2D& g) {
    return {g.site(1, 1), g.site(1, g.cols), g.site(g.rows, 1), g.site(g.rows, g.cols)};
}

Eigen::VectorXcd ideal_w_state(int rows, int cols) {
    // corner k up -> index 2^{3-k}
    const Complex px = ideal_end_phase(cols), py = ideal_end_phase(rows);
    Eigen::VectorXcd w = Eigen::VectorXcd::Zero(16);
    w[8] = 0.5;
    w[4] = 0.5 * px;
    w[2] = 0.5 * py;
    w[1] = 0.5 * px * py;
    return w;
}

double w_fidelity(const Eigen::MatrixXcd& rho_corners, const Eigen::VectorXcd& target) {
    if (rho_corners.rows() != 16 || target.size() != 16) throw ValidationError("w_fidelity: expects a 16x16 state");
    return std::real(target.dot(rho_corners * target)) / target.squaredNorm();
}

// ------------------------------------------------------------ tomography

std::array<Eigen::Matrix2cd, 4> qpt_input_states() {
    const Complex i(0.0, 1.0);
    const double h = 1.0 / std::numbers::sqrt2;
    const std::array<Eigen::Vector2cd, 4> kets = {
        Eigen::Vector2cd(1.0, 0.0), Eigen::Vector2cd(0.0, 1.0), Eigen::Vector2cd(h, h), Eigen::Vector2cd(h, i * h)};
    std::array<Eigen::Matrix2cd, 4> out;
    for (int j = 0; j < 4; ++j) out[j] = kets[j] * kets[j].adjoint();
    return out;
}

Eigen::Matrix2cd tomograph_qubit(const Eigen::Matrix2cd& rho) {
    const auto& p = paulis();
    const double q = std::numbers::pi / 4.0;
    const Complex i(0.0, 1.0);
    // exp(-i pi/4 P) = cos(pi/4) I - i sin(pi/4) P
    const std::array<Eigen::Matrix2cd, 3> rotations = {
        p[0], std::cos(q) * p[0] - i * std::sin(q) * p[1], std::cos(q) * p[0] - i * std::sin(q) * p[2]};

    Eigen::Matrix3d design;
    Eigen::Vector3d measured;
    for (int r = 0; r < 3; ++r) {
        const Eigen::Matrix2cd rotated = rotations[r] * rho * rotations[r].adjoint();
        measured[r] = std::real(rotated(0, 0)) - std::real(rotated(1, 1));
        const Eigen::Matrix2cd observable = rotations[r].adjoint() * p[3] * rotations[r];
        for (int k = 0; k < 3; ++k) design(r, k) = 0.5 * std::real((observable * p[k + 1]).trace());
    }
    const Eigen::Vector3d bloch = design.fullPivLu().solve(measured);
    return 0.5 * (p[0] + bloch[0] * p[1] + bloch[1] * p[2] + bloch[2] * p[3]);
}

QptResult reconstruct_process(const std::array<Eigen::Matrix2cd, 4>& outputs) {
    const auto& e = paulis();
    const auto inputs = qpt_input_states();

    // sum_mn chi_mn E_m rho_j E_n^dag = outputs_j, 16 equations in 16 unknowns.
    Eigen::Matrix<Complex, 16, 16> a;
    Eigen::Matrix<Complex, 16, 1> b;
    for (int j = 0; j < 4; ++j) {
        for (int m = 0; m < 4; ++m) {
            for (int n = 0; n < 4; ++n) {
                const Eigen::Matrix2cd term = e[m] * inputs[j] * e[n].adjoint();
                for (int r = 0; r < 2; ++r)
                    for (int c = 0; c < 2; ++c) a(4 * j + 2 * r + c, 4 * m + n) = term(r, c);
            }
        }
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) b(4 * j + 2 * r + c) = outputs[j](r, c);
    }
    const Eigen::Matrix<Complex, 16, 1> x = a.fullPivLu().solve(b);

    QptResult res;
    for (int m = 0; m < 4; ++m)
        for (int n = 0; n < 4; ++n) res.chi(m, n) = x(4 * m + n);

    res.fidelity = std::real(res.chi(0, 0));
    res.hermiticity_residual = (res.chi - res.chi.adjoint()).cwiseAbs().maxCoeff();
    Eigen::Matrix2cd tp = Eigen::Matrix2cd::Zero();
    for (int m = 0; m < 4; ++m)
        for (int n = 0; n < 4; ++n) tp += res.chi(m, n) * e[n].adjoint() * e[m];
    res.trace_residual = (tp - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff();
    const Eigen::Matrix4cd herm = 0.5 * (res.chi + res.chi.adjoint());
    res.min_eigenvalue = Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd>(herm, Eigen::EigenvaluesOnly).eigenvalues()[0];
    return res;
}

std::vector<QptResult> simulate_qpt(const QptContext& ctx, const std::vector<double>& times) {
    const int d = static_cast<int>(ctx.hamiltonian.rows());
    if (ctx.source < 1 || ctx.source > d || ctx.target < 1 || ctx.target > d)
        throw ValidationError("simulate_qpt: source/target out of range");

    // Input qubit state a|down> + b|up> maps onto a|vac> + b|source>.
    const Complex i(0.0, 1.0);
    const double h = 1.0 / std::numbers::sqrt2;
    const std::array<std::pair<Complex, Complex>, 4> amps = {
        std::pair<Complex, Complex>{1.0, 0.0}, {0.0, 1.0}, {h, h}, {h, i * h}};

    std::vector<std::array<Eigen::Matrix2cd, 4>> outputs(times.size());
    std::vector<Eigen::VectorXcd> psis;
    for (const auto& [a, b] : amps) {
        Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(d + 1);
        psi[0] = a;
        psi[ctx.source] = b;
        psis.push_back(std::move(psi));
    }
    if (ctx.decoherence.closed()) {
        ClosedPropagator prop(ctx.hamiltonian);
        for (std::size_t k = 0; k < times.size(); ++k) {
            for (int j = 0; j < 4; ++j) {
                const Eigen::VectorXcd out = prop.apply(psis[j], times[k]);
                outputs[k][j] = reduce_to_sites(Eigen::MatrixXcd(out * out.adjoint()), {ctx.target});
            }
        }
    } else {
        LindbladPropagator prop(ctx.hamiltonian, ctx.decoherence);
        std::vector<Eigen::MatrixXcd> rho0s;
        for (const auto& psi : psis) rho0s.push_back(psi * psi.adjoint());
        const auto evolved = prop.evolve_batch(rho0s, times);
        for (std::size_t k = 0; k < times.size(); ++k)
            for (int j = 0; j < 4; ++j) outputs[k][j] = reduce_to_sites(evolved[k][j], {ctx.target});
    }

    std::vector<QptResult> results;
    results.reserve(times.size());
    for (auto& out : outputs) {
        for (auto& rho : out) rho = tomograph_qubit(rho);
        results.push_back(reconstruct_process(out));
    }
    return results;
}

QptResult simulate_qpt(const QptContext& ctx) { return simulate_qpt(ctx, {ctx.t_end}).front(); }

}  // namespace dome
