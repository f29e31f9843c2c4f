#include "dome/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "CLI11.hpp"
#include "dome/cascade.hpp"
#include "dome/dynamics.hpp"
#include "dome/inverse_eigen.hpp"
#include "dome/metrics.hpp"
#include "dome/models.hpp"
#include "dome/noise.hpp"
#include "dome/spectrum.hpp"

namespace dome::cli {

using nlohmann::json;

std::string format_number(double x) {
    if (x == 0.0) x = 0.0;  // drop the sign of -0
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc()) return "nan";
    return std::string(buf, end);
}

void write_atomic(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".partial";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << text;
        out.flush();
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

namespace {

// Config object with a closed key set and typed accessors.
class Config {
public:
    Config(const json& j, std::initializer_list<const char*> allowed) : j_(j) {
        if (!j.is_object()) throw ValidationError("config must be a JSON object");
        for (const auto& [key, value] : j.items()) {
            (void)value;
            const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
            if (!known) throw ValidationError("unknown config key '" + key + "'");
        }
    }

    bool has(const char* key) const { return j_.contains(key) && !j_.at(key).is_null(); }

    template <typename T>
    T get(const char* key) const {
        if (!has(key)) throw ValidationError(std::string("missing config key '") + key + "'");
        return convert<T>(j_.at(key), key);
    }

    template <typename T>
    T get(const char* key, T fallback) const {
        return has(key) ? get<T>(key) : fallback;
    }

    template <typename T>
    std::optional<T> opt(const char* key) const {
        if (!has(key)) return std::nullopt;
        return get<T>(key);
    }

    template <typename T>
    std::vector<T> list(const char* key) const {
        if (!has(key)) throw ValidationError(std::string("missing config key '") + key + "'");
        const json& a = j_.at(key);
        if (!a.is_array() || a.empty()) throw ValidationError(std::string("'") + key + "' must be a non-empty array");
        std::vector<T> out;
        for (const auto& v : a) out.push_back(convert<T>(v, key));
        return out;
    }

private:
    template <typename T>
    static T convert(const json& v, const char* key) {
        if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) throw ValidationError(std::string("'") + key + "' must be a string");
            return v.get<std::string>();
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer()) throw ValidationError(std::string("'") + key + "' must be an integer");
            return v.get<T>();
        } else {
            if (!v.is_number()) throw ValidationError(std::string("'") + key + "' must be a number");
            const T x = v.get<T>();
            if (!std::isfinite(x)) throw ValidationError(std::string("'") + key + "' must be finite");
            return x;
        }
    }

    const json& j_;
};

std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
    out += '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            if (!std::isnan(row[i])) out += format_number(row[i]);  // NaN = empty cell
        }
        out += '\n';
    }
    return out;
}

json table_json(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
    json r = json::array();
    for (const auto& row : rows) {
        json o = json::object();
        for (std::size_t i = 0; i < row.size(); ++i) o[header[i]] = std::isnan(row[i]) ? json(nullptr) : json(row[i]);
        r.push_back(std::move(o));
    }
    return r;
}

template <typename Derived>
json to_json(const Eigen::DenseBase<Derived>& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(double(v.derived()(i)));
    return a;
}

double mhz_to_rad_s(double mhz) { return 2.0 * std::numbers::pi * mhz * 1e6; }
double rad_s_to_mhz(double w) { return w / (2.0 * std::numbers::pi * 1e6); }

// Chain {N, m} or grid {rows, cols, m | m_x, m_y}.
Model read_model(const Config& c, long default_m) {
    const std::string kind = c.get<std::string>("model", "chain");
    if (kind == "chain") {
        const int N = c.get<int>("N");
        const long m = c.get<long>("m", default_m);
        if (N < 2) throw ValidationError("N must be >= 2");
        if (m < 0) throw ValidationError("m must be >= 0");
        return ChainModel{N, m};
    }
    if (kind == "grid") {
        const int rows = c.get<int>("rows"), cols = c.get<int>("cols");
        const long m = c.get<long>("m", default_m);
        const long mx = c.get<long>("m_x", m), my = c.get<long>("m_y", m);
        if (rows < 2 || cols < 2) throw ValidationError("grid needs rows, cols >= 2");
        if (mx < 0 || my < 0) throw ValidationError("m must be >= 0");
        return GridModel{rows, cols, mx, my};
    }
    throw ValidationError("model must be 'chain' or 'grid'");
}

Format resolve(const RunSettings& run, Format fallback) { return run.format.value_or(fallback); }

}  // namespace

// ------------------------------------------------------------------ synth

Artifact cmd_synth(const json& cfg, const RunSettings& run) {
    const Config c(cfg, {"N", "m", "J_MHz", "spectrum"});
    const auto J_MHz = c.opt<double>("J_MHz");
    if (J_MHz && !(*J_MHz > 0.0)) throw ValidationError("J_MHz must be positive");

    Spectrum<double> spec;
    json extra = json::object();
    if (c.has("spectrum")) {
        if (c.has("N") || c.has("m")) throw ValidationError("give either 'spectrum' or 'N'/'m', not both");
        spec = Spectrum<double>::from_list(c.list<double>("spectrum"));
    } else {
        const int N = c.get<int>("N");
        const long m = c.get<long>("m", 0);
        if (N < 2) throw ValidationError("N must be >= 2, got " + std::to_string(N));
        if (m < 0) throw ValidationError("m must be >= 0");
        spec = dome_spectrum<double>(N, m);
        extra["m"] = m;
        extra["capability"] = to_string(classify_m(m));
    }
    const auto h = reconstruct(spec);
    const auto ws = compute_weights(spec);
    const auto basis = h.size() > 1 ? eigenvectors(h, ws) : EigenBasis<double>{Mat<double>::Ones(1, 1), ws.values};

    const int n = h.size();
    const double scale = J_MHz.value_or(1.0);
    const std::string unit = J_MHz ? "_MHz" : "_over_J";

    Artifact a;
    if (resolve(run, Format::Csv) == Format::Csv) {
        std::vector<std::string> header = {"index", "omega" + unit, "coupling" + unit, "lambda" + unit, "weight"};
        for (int s = 1; s <= n; ++s) header.push_back("v" + std::to_string(s));
        std::vector<std::vector<double>> rows;
        for (int i = 0; i < n; ++i) {
            std::vector<double> r = {double(i + 1), scale * h.omegas[i], i + 1 < n ? scale * h.couplings[i] : NAN,
                                     scale * spec.values()[i], ws.weights[i]};
            for (int s = 0; s < n; ++s) r.push_back(basis.W(s, i));
            rows.push_back(std::move(r));
        }
        a.body = csv(header, rows);
        return a;
    }
    json out = {{"units", J_MHz ? "MHz" : "J"}, {"N", n}};
    if (J_MHz) out["J_MHz"] = *J_MHz;
    out.update(extra);
    out["omegas"] = to_json(scale * h.omegas);
    out["couplings"] = to_json(scale * h.couplings);
    out["spectrum"] = to_json(scale * spec.values());
    out["weights"] = to_json(ws.weights);
    json vecs = json::array();
    for (int s = 0; s < n; ++s) vecs.push_back(to_json(basis.W.row(s)));
    out["eigenvectors"] = vecs;
    a.body = out.dump(2) + "\n";
    a.extension = "json";
    return a;
}

// ------------------------------------------------------------------ evolve

Artifact cmd_evolve(const json& cfg, const RunSettings& run) {
    const Config c(cfg, {"model", "N", "m", "rows", "cols", "m_x", "m_y", "periods", "samples_per_period", "T1_us",
                         "Tphi_us", "period_ns"});
    const Model model = read_model(c, 0);
    const int S = c.get<int>("samples_per_period", 400);
    if (S < 4 || S % 4 != 0) throw ValidationError("samples_per_period must be a positive multiple of 4");
    const double periods = c.get<double>("periods", 1.0);
    const double steps_real = periods * S;
    const long steps = std::lround(steps_real);
    if (!(periods > 0.0) || std::abs(steps_real - double(steps)) > 1e-9 || steps > 10'000'000)
        throw ValidationError("periods * samples_per_period must be a positive integer");

    DecoherenceConfig deco;
    const auto t1 = c.opt<double>("T1_us"), tphi = c.opt<double>("Tphi_us");
    const double period_ns = c.get<double>("period_ns", 200.0);
    if (!(period_ns > 0.0)) throw ValidationError("period_ns must be positive");
    if ((t1 && !(*t1 > 0.0)) || (tphi && !(*tphi > 0.0))) throw ValidationError("T1_us and Tphi_us must be positive");
    if (t1 || tphi) {
        const double rate = 2.0 * std::numbers::pi / (period_ns * 1e-9);
        deco = DecoherenceConfig::from_physical(t1 ? std::optional(*t1 * 1e-6) : std::nullopt,
                                                tphi ? std::optional(*tphi * 1e-6) : std::nullopt, rate);
    }

    const Eigen::MatrixXd H = model_hamiltonian(model);
    const int D = static_cast<int>(H.rows());
    std::vector<double> times;
    for (long k = 0; k <= steps; ++k) times.push_back(2.0 * std::numbers::pi * double(k) / S);

    std::vector<Eigen::MatrixXcd> rhos;
    const QuantumState psi0 = QuantumState::site(D, 1);
    if (deco.closed()) {
        const auto traj = evolve_closed(H, psi0, times);
        for (const auto& psi : traj.states) rhos.push_back(psi * psi.adjoint());
    } else {
        rhos = evolve_lindblad(H, DensityMatrix::pure(psi0), times, deco).densities;
    }
    const auto qpt = simulate_qpt(QptContext{H, deco, 0.0, 1, D}, times);

    const auto* chain = std::get_if<ChainModel>(&model);
    std::vector<int> corners;
    Eigen::VectorXcd w_target;
    if (!chain) {
        const auto& g = std::get<GridModel>(model);
        corners = {1, g.cols, (g.rows - 1) * g.cols + 1, D};
        w_target = ideal_w_state(g.rows, g.cols);
    }

    std::vector<std::string> header = {"t_over_T", "P_vac"};
    for (int n = 1; n <= D; ++n) header.push_back("P_" + std::to_string(n));
    header.push_back(chain ? "F_bell" : "F_W");
    header.push_back("F_qpt");

    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < times.size(); ++k) {
        std::vector<double> r = {double(k) / S};
        for (int n = 0; n <= D; ++n) r.push_back(std::real(rhos[k](n, n)));
        r.push_back(chain ? bell_fidelity(reduce_to_pair(rhos[k], 1, D), ideal_end_phase(chain->N))
                          : w_fidelity(reduce_to_sites(rhos[k], corners), w_target));
        r.push_back(qpt[k].fidelity);
        rows.push_back(std::move(r));
    }

    Artifact a;
    if (resolve(run, Format::Csv) == Format::Csv) {
        a.body = csv(header, rows);
    } else {
        a.body = json{{"columns", header}, {"rows", table_json(header, rows)}}.dump(2) + "\n";
        a.extension = "json";
    }
    return a;
}

// ------------------------------------------------------------------ sweep

Artifact cmd_sweep(const json& cfg, const RunSettings& run) {
    const Config c(cfg, {"kind", "model", "N", "rows", "cols", "m_values", "metric", "target", "sigmas", "samples",
                         "seed", "axis", "axis_us", "fixed_us", "period_ns"});
    const std::string kind = c.get<std::string>("kind", "disorder");
    const auto m_values = c.list<long>("m_values");
    const Model model = read_model(c, m_values.front());
    const Metric metric = metric_from_string(c.get<std::string>("metric", "bell"));
    if (run.threads < 1) throw ValidationError("threads must be >= 1");

    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    json echo = {{"command", "sweep"}, {"config", cfg}};

    if (kind == "disorder") {
        const auto target = disorder_target_from_string(c.get<std::string>("target", "all"));
        const auto sigmas = c.list<double>("sigmas");
        const int samples = c.get<int>("samples", 100);
        const std::uint64_t seed = run.seed.value_or(c.get<std::uint64_t>("seed", 0));
        echo["seed"] = seed;
        const auto res = sweep_sigma(model, m_values, target, sigmas, samples, seed, metric, run.threads);
        header = {"m", "sigma_over_J", "mean", "std", "samples", "failures"};
        for (const auto& p : res.points)
            rows.push_back({double(p.m), p.axis, p.mean, p.std, double(p.samples), double(p.failures)});
    } else if (kind == "decoherence") {
        const std::string axis_name = c.get<std::string>("axis");
        DecoherenceAxis axis;
        if (axis_name == "T1") axis = DecoherenceAxis::T1;
        else if (axis_name == "Tphi") axis = DecoherenceAxis::Tphi;
        else throw ValidationError("axis must be 'T1' or 'Tphi'");
        const auto axis_us = c.list<double>("axis_us");
        for (double x : axis_us)
            if (!(x > 0.0)) throw ValidationError("axis_us values must be positive");
        const auto scan = sweep_decoherence(model, metric, m_values, axis, axis_us, c.get<double>("fixed_us"),
                                            c.get<double>("period_ns", 200.0), run.threads);
        header = {"m", "T1_us", "Tphi_us", "fidelity", "gain"};
        for (std::size_t i = 0; i < m_values.size(); ++i)
            for (std::size_t j = 0; j < axis_us.size(); ++j) {
                const double t1 = axis == DecoherenceAxis::T1 ? axis_us[j] : scan.fixed_us;
                const double tp = axis == DecoherenceAxis::Tphi ? axis_us[j] : scan.fixed_us;
                rows.push_back({double(m_values[i]), t1, tp, scan.fidelity(i, j), scan.gain(i, j)});
            }
    } else {
        throw ValidationError("sweep kind must be 'disorder' or 'decoherence'");
    }

    Artifact a;
    a.sidecar = echo.dump(2) + "\n";
    if (resolve(run, Format::Csv) == Format::Csv) {
        a.body = csv(header, rows);
    } else {
        a.body = json{{"kind", kind}, {"metric", to_string(metric)}, {"points", table_json(header, rows)}}.dump(2) + "\n";
        a.extension = "json";
    }
    return a;
}

// ------------------------------------------------------------------ cascade

Artifact cmd_cascade(const json& cfg, const RunSettings& run) {
    const Config c(cfg, {"model", "N", "m", "k", "mode", "J_max_MHz", "J_min_MHz", "switch_overhead_ns"});
    const ChainKind kind = chain_kind_from_string(c.get<std::string>("model"));
    const int N = c.get<int>("N");
    const long m = kind == ChainKind::Dome ? c.get<long>("m") : c.get<long>("m", 0);
    const CascadeMode mode = cascade_mode_from_string(c.get<std::string>("mode", "pst"));
    const CouplingBudget budget{mhz_to_rad_s(c.get<double>("J_max_MHz")), mhz_to_rad_s(c.get<double>("J_min_MHz"))};
    const double overhead = c.get<double>("switch_overhead_ns", 0.0) * 1e-9;

    const auto plan = c.has("k") ? plan_cascade(N, c.get<int>("k"), budget, kind, m, mode, overhead)
                                 : plan_cascade_min_k(N, budget, kind, m, mode, overhead);

    std::vector<std::string> header = {"segment", "first_site", "last_site", "sites", "fst", "J_sub_MHz",
                                       "duration_ns"};
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < plan.k(); ++i) {
        const auto& s = plan.segments[i];
        rows.push_back({double(i + 1), double(s.first_site), double(s.first_site + s.sites - 1), double(s.sites),
                        s.fractional ? 1.0 : 0.0, rad_s_to_mhz(s.J_sub), s.duration * 1e9});
    }

    Artifact a;
    if (resolve(run, Format::Json) == Format::Csv) {
        a.body = csv(header, rows);
        return a;
    }
    json feasible = nullptr;
    try {
        const auto f = feasible_N(budget, kind, m);
        feasible = {{"exact", f.exact}, {"asymptotic", f.asymptotic}};
    } catch (const ValidationError&) {
    }
    const double single = asymptotic_total(kind, N, 1, plan.m, budget.J_max_bound, mode);
    json out = {{"model", to_string(kind)},
                {"mode", to_string(mode)},
                {"N", N},
                {"m", plan.m},
                {"k", plan.k()},
                {"J_max_MHz", rad_s_to_mhz(budget.J_max_bound)},
                {"J_min_MHz", rad_s_to_mhz(budget.J_min)},
                {"feasible_N", feasible},
                {"max_segment_coupling_MHz", rad_s_to_mhz(plan.max_segment_coupling())},
                {"segments", table_json(header, rows)},
                {"total_ns", plan.total * 1e9},
                {"total_asymptotic_ns", plan.total_asymptotic * 1e9},
                {"single_chain_asymptotic_ns", single * 1e9},
                {"asymptotic_ratio_vs_single", plan.total_asymptotic / single}};
    a.body = out.dump(2) + "\n";
    a.extension = "json";
    return a;
}

// ------------------------------------------------------------------ entry point

namespace {

void report_error(const char* kind, const std::string& message, int where = -1) {
    json e = {{"error", kind}, {"message", message}};
    if (where >= 0) e["where"] = where;
    std::cerr << e.dump() << "\n";
}

json load_config(const std::string& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config '" + path + "'");
    json cfg;
    try {
        cfg = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError("config is not valid JSON: " + std::string(e.what()));
    }
    if (!cfg.is_object()) throw ValidationError("config must be a JSON object");
    for (const auto& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) throw ValidationError("--set expects key=value, got '" + kv + "'");
        const std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
        try {
            cfg[key] = json::parse(value);
        } catch (const json::parse_error&) {
            cfg[key] = value;
        }
    }
    return cfg;
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"Dome-model Hamiltonian synthesis, dynamics, fidelity sweeps and cascade planning"};
    app.require_subcommand(1);

    std::string config_path, output, format;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    int threads = 1;
    app.add_option("--seed", seed, "RNG seed (overrides the config)");
    app.add_option("--threads", threads, "worker threads for sweeps")->check(CLI::Range(1, 1024));
    app.add_option("--format", format, "output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--output,-o", output, "output file (default: $DOME_OUTPUT_DIR/<command>.<ext>)");
    app.add_option("--set", overrides, "config override key=value (value parsed as JSON)");

    const std::pair<const char*, const char*> commands[] = {
        {"synth", "reconstruct a Hamiltonian from a spectrum or (N, m)"},
        {"evolve", "populations and fidelities over time"},
        {"sweep", "Monte-Carlo disorder or decoherence sweep"},
        {"cascade", "cascaded transfer plan under a coupling budget"}};
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->fallthrough();
        sub->add_option("config", config_path, "JSON config file")->required();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        report_error("validation", e.what());
        return 2;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        RunSettings rs;
        rs.seed = seed;
        rs.threads = threads;
        if (format == "csv") rs.format = Format::Csv;
        if (format == "json") rs.format = Format::Json;

        const json cfg = load_config(config_path, overrides);
        Artifact a;
        if (command == "synth") a = cmd_synth(cfg, rs);
        else if (command == "evolve") a = cmd_evolve(cfg, rs);
        else if (command == "sweep") a = cmd_sweep(cfg, rs);
        else a = cmd_cascade(cfg, rs);

        std::filesystem::path path = output;
        if (output.empty()) {
            const char* dir = std::getenv("DOME_OUTPUT_DIR");
            path = std::filesystem::path(dir && *dir ? dir : ".") / (command + "." + a.extension);
        }
        if (a.sidecar) {
            auto side = path;
            side.replace_extension(".config.json");
            write_atomic(side, *a.sidecar);
        }
        write_atomic(path, a.body);
        std::cout << path.string() << "\n";
        return 0;
    } catch (const ValidationError& e) {
        report_error("validation", e.what());
        return 2;
    } catch (const NumericalError& e) {
        report_error("numerical", e.what(), e.where());
        return 3;
    } catch (const std::exception& e) {
        report_error("io", e.what());
        return 1;
    }
}

}  // namespace dome::cli
