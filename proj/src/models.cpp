#include "dome/models.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <limits>

namespace dome {

Grid2D grid_2d(int rows, int cols, long m_x, long m_y, double J) {
    if (rows < 1 || cols < 1 || rows * cols < 2)
        throw ValidationError("grid_2d: need rows, cols >= 1 and at least two sites");
    if (m_x < 0 || m_y < 0) throw ValidationError("grid_2d: m_x and m_y must be non-negative");
    if (!(J > 0.0)) throw ValidationError("grid_2d: rate must be positive");

    Grid2D g;
    g.rows = rows;
    g.cols = cols;
    g.m_x = m_x;
    g.m_y = m_y;
    g.rate = J;
    const auto x = dome_chain<double>(cols, m_x, J);
    const auto y = dome_chain<double>(rows, m_y, J);
    g.omega_x = x.omegas;
    g.coupling_x = x.couplings;
    g.omega_y = y.omegas;
    g.coupling_y = y.couplings;
    return g;
}

Eigen::MatrixXd Grid2D::frequency_table() const {
    Eigen::MatrixXd t(rows, cols);
    for (int r = 1; r <= rows; ++r)
        for (int c = 1; c <= cols; ++c) t(r - 1, c - 1) = frequency(r, c);
    return t;
}

Eigen::MatrixXd single_excitation_matrix(const Grid2D& g) {
    const int d = g.sites();
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(d, d);
    for (int r = 1; r <= g.rows; ++r) {
        for (int c = 1; c <= g.cols; ++c) {
            const int i = g.site(r, c) - 1;
            h(i, i) = g.frequency(r, c);
            if (c < g.cols) {
                const int j = g.site(r, c + 1) - 1;
                h(i, j) = h(j, i) = g.coupling_x[c - 1];
            }
            if (r < g.rows) {
                const int j = g.site(r + 1, c) - 1;
                h(i, j) = h(j, i) = g.coupling_y[r - 1];
            }
        }
    }
    return h;
}

bool lines_match_dome(const Grid2D& g, double tol) {
    const auto x = dome_chain<double>(g.cols, g.m_x, g.rate);
    const auto y = dome_chain<double>(g.rows, g.m_y, g.rate);
    const Eigen::MatrixXd f = g.frequency_table();
    for (int r = 0; r < g.rows; ++r) {
        const double offset = f(r, 0) - x.omegas[0];
        for (int c = 0; c < g.cols; ++c)
            if (std::abs(f(r, c) - offset - x.omegas[c]) > tol) return false;
    }
    for (int c = 0; c < g.cols; ++c) {
        const double offset = f(0, c) - y.omegas[0];
        for (int r = 0; r < g.rows; ++r)
            if (std::abs(f(r, c) - offset - y.omegas[r]) > tol) return false;
    }
    auto same = [tol](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        return a.size() == b.size() && (a.size() == 0 || (a - b).cwiseAbs().maxCoeff() <= tol);
    };
    return same(g.coupling_x, x.couplings) && same(g.coupling_y, y.couplings);
}

EffectiveTwoSite schrieffer_wolff_reduce(const TridiagonalHamiltonian<double>& h) {
    const int n = h.size();
    if (n < 3) throw ValidationError("schrieffer_wolff_reduce: need N >= 3");
    const Eigen::MatrixXd full = h.dense();
    const int q = n - 2;

    const Eigen::MatrixXd middle = full.block(1, 1, q, q);
    Eigen::MatrixXd v(2, q);  // edge rows {1, N} against middle sites
    v.row(0) = full.block(0, 1, 1, q);
    v.row(1) = full.block(n - 1, 1, 1, q);
    const Eigen::Vector2d edge(full(0, 0), full(n - 1, n - 1));

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(middle);
    const Eigen::VectorXd eps = es.eigenvalues();
    const Eigen::MatrixXd vt = v * es.eigenvectors();  // coupling to middle eigenstates

    EffectiveTwoSite out;
    out.gap = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 2; ++i)
        for (int k = 0; k < q; ++k) out.gap = std::min(out.gap, std::abs(edge[i] - eps[k]));
    out.coupling_norm = Eigen::JacobiSVD<Eigen::MatrixXd>(v).singularValues()(0);
    if (!(2.0 * out.coupling_norm < out.gap))
        throw NumericalError("schrieffer_wolff_reduce: perturbative gap condition fails (2|V| = " +
                             std::to_string(2.0 * out.coupling_norm) +
                             ", gap = " + std::to_string(out.gap) + ")");

    Eigen::Matrix2d heff = Eigen::Matrix2d::Zero();
    heff.diagonal() = edge;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < q; ++k)
                heff(i, j) += 0.5 * vt(i, k) * vt(j, k) * (1.0 / (edge[i] - eps[k]) + 1.0 / (edge[j] - eps[k]));

    out.omega1_eff = heff(0, 0);
    out.omegaN_eff = heff(1, 1);
    out.J_eff = heff(0, 1);
    return out;
}

}  // namespace dome
