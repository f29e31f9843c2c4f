#pragma once

// Quasi-static Gaussian parameter disorder and Monte-Carlo fidelity sweeps.
//
// Every draw is a pure function of (seed, sample index, parameter index), so
// a sweep gives bit-identical results regardless of thread count.

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "dome/dynamics.hpp"
#include "dome/inverse_eigen.hpp"
#include "dome/models.hpp"

namespace dome {

enum class DisorderTarget { MiddleFrequencies, EdgeFrequencies, Couplings, All };

const char* to_string(DisorderTarget t);
DisorderTarget disorder_target_from_string(const std::string& s);

struct DisorderConfig {
    DisorderTarget target = DisorderTarget::All;
    double sigma = 0.0;  // units of J
    int samples = 100;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Standard normal variate keyed by (seed, sample, parameter).
double standard_normal(std::uint64_t seed, std::uint64_t sample, std::uint64_t parameter);

// Explicit lattice parameters; a perturbed Grid2D no longer factorizes.
struct LatticeHamiltonian {
    int rows = 0, cols = 0;
    Eigen::MatrixXd site_omega;  // rows x cols
    Eigen::MatrixXd coupling_x;  // rows x (cols-1), bond (r,c)-(r,c+1)
    Eigen::MatrixXd coupling_y;  // (rows-1) x cols, bond (r,c)-(r+1,c)

    static LatticeHamiltonian from_grid(const Grid2D& g);
    Eigen::MatrixXd matrix() const;
    bool is_corner(int r, int c) const;  // 0-based
};

// Parameter indices: frequencies first (site order), then couplings (bond order).
TridiagonalHamiltonian<double> perturb(const TridiagonalHamiltonian<double>& h, const DisorderConfig& cfg,
                                       int draw_index);
LatticeHamiltonian perturb(const LatticeHamiltonian& h, const DisorderConfig& cfg, int draw_index);

enum class Metric { BellAtQuarterT, QptAtHalfT };

const char* to_string(Metric m);
Metric metric_from_string(const std::string& s);

struct ChainModel {
    int N = 5;
    long m = 2;
};

struct GridModel {
    int rows = 3, cols = 4;
    long m_x = 2, m_y = 2;
};

using Model = std::variant<ChainModel, GridModel>;

Model with_m(const Model& model, long m);
long model_m(const Model& model);
void validate_for_metric(const Model& model, Metric metric);

/// Fidelity of one noise-free or perturbed instance. For chains the Bell
/// metric is the end-pair Bell fidelity at T/4; for grids it is the
/// four-corner W fidelity. The QPT metric transfers site 1 -> last site at T/2.
double evaluate_metric(const Model& model, const Eigen::MatrixXd& hamiltonian, Metric metric,
                       const DecoherenceConfig& deco = {});

/// Noise-free excitation-block Hamiltonian of a model, units of J.
Eigen::MatrixXd model_hamiltonian(const Model& model);

struct SweepPoint {
    double axis = 0.0;
    long m = 0;
    double mean = 0.0;
    double std = 0.0;  // sample standard deviation
    int samples = 0;   // successful samples
    int failures = 0;
};

struct SweepResult {
    std::string axis_name;
    std::vector<SweepPoint> points;
};

/// Pairwise (cascade) summation; order-insensitive to ~1 ulp per level.
double pairwise_sum(std::span<const double> values);

/// Monte-Carlo mean/std of the metric under disorder `cfg`.
SweepPoint sweep_coherent(const Model& model, const DisorderConfig& cfg, Metric metric,
                          const DecoherenceConfig& deco = {}, int threads = 1);

/// sweep_coherent over a sigma grid for each m; axis_name "sigma_over_J".
SweepResult sweep_sigma(const Model& model, const std::vector<long>& m_values, DisorderTarget target,
                        const std::vector<double>& sigmas, int samples, std::uint64_t seed, Metric metric,
                        int threads = 1);

enum class DecoherenceAxis { T1, Tphi };

struct DecoherenceScan {
    DecoherenceAxis axis = DecoherenceAxis::T1;
    double fixed_us = 0.0;             // the other coherence time
    std::vector<long> m_values;
    std::vector<double> axis_us;
    Eigen::MatrixXd fidelity;          // m x axis
    Eigen::MatrixXd gain;              // fidelity(m, x) - fidelity(m_values[0], x)
};

/// Deterministic (m, T1) or (m, T_phi) fidelity grid at evolution period
/// `period_ns`; all coherence times in microseconds.
DecoherenceScan sweep_decoherence(const Model& model, Metric metric, const std::vector<long>& m_values,
                                  DecoherenceAxis axis, const std::vector<double>& axis_us, double fixed_us,
                                  double period_ns = 200.0, int threads = 1);

}  // namespace dome
