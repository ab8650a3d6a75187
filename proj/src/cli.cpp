#include "wavetank/cli.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

namespace wavetank {

namespace fs = std::filesystem;

namespace {

constexpr double pi = std::numbers::pi;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string short_fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// One line of key=value pairs in results.txt, mirrored into summary.txt.
class Record {
public:
    explicit Record(const std::string& name) { add("record", name); }

    Record& add(const std::string& key, double v) { return push(key, fmt(v), short_fmt(v)); }
    Record& add(const std::string& key, int v) { return push(key, std::to_string(v), std::to_string(v)); }
    Record& add(const std::string& key, bool v) { return push(key, v ? "1" : "0", v ? "yes" : "no"); }
    Record& add(const std::string& key, const std::string& v) { return push(key, v, v); }
    Record& add(const std::string& key, const char* v) { return add(key, std::string(v)); }

    std::string line() const {
        std::string s;
        for (std::size_t i = 0; i < exact_.size(); ++i) s += (i ? " " : "") + exact_[i].first + "=" + exact_[i].second;
        return s;
    }

    std::string pretty() const {
        std::string s = "[" + readable_[0].second + "]\n";
        for (std::size_t i = 1; i < readable_.size(); ++i) s += "  " + readable_[i].first + " = " + readable_[i].second + "\n";
        return s;
    }

private:
    Record& push(const std::string& key, std::string exact, std::string readable) {
        exact_.emplace_back(key, std::move(exact));
        readable_.emplace_back(key, std::move(readable));
        return *this;
    }
    std::vector<std::pair<std::string, std::string>> exact_, readable_;
};

struct Outcome {
    std::vector<Record> records;
    bool pass = true;
};

void write_results(const fs::path& dir, const Outcome& out) {
    fs::create_directories(dir);
    std::ofstream res(dir / "results.txt");
    res << "schema=1\n";
    for (const auto& r : out.records) res << r.line() << "\n";
    std::ofstream sum(dir / "summary.txt");
    sum << "overall: " << (out.pass ? "PASS" : "FAIL") << "\n";
    for (const auto& r : out.records) sum << r.pretty();
}

void write_series(const fs::path& file, const std::string& columns, const std::vector<std::vector<double>>& rows) {
    fs::create_directories(file.parent_path());
    std::ofstream f(file);
    f << "# columns: " << columns << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) f << (i ? " " : "") << fmt(row[i]);
        f << "\n";
    }
}

void write_trajectory(const fs::path& file, const Trajectory& tr) {
    std::vector<std::vector<double>> rows;
    for (const auto& s : tr.diagnostics)
        rows.push_back({s.t, s.H, s.wall_theta, s.m, s.m_prime, s.mean_eta, s.max_grad_eta,
                        static_cast<double>(s.elliptic_iterations)});
    write_series(file, "t H wall_theta m m_prime mean_eta max_grad_eta elliptic_iterations", rows);
}

Record config_record(const RunConfig& c) {
    Record r("config");
    r.add("kind", kind_name(c.kind))
        .add("d", c.tank.d)
        .add("L1", c.tank.L1)
        .add("L2", c.tank.L2)
        .add("h", c.tank.h)
        .add("g", c.tank.g)
        .add("n1", c.tank.n1)
        .add("n2", c.tank.n2)
        .add("nz", c.tank.nz)
        .add("dt", c.tank.dt)
        .add("dealias", c.tank.dealias)
        .add("seed", std::to_string(c.seed));
    return r;
}

InitialDataSpec initial_spec(const RunConfig& c, int N, std::uint64_t seed) {
    if (!c.random_initial) return c.initial;
    InitialDataSpec spec = random_initial_data(N, c.tank.d, c.initial.c, c.initial.kappa, c.initial.beta, seed);
    spec.envelope = c.initial.envelope;
    return spec;
}

Outcome run_simulate(const RunConfig& c, const fs::path& dir) {
    Grid grid(c.tank);
    DtnSolver solver(grid);
    const SurfaceState s0 = make_initial_data(initial_spec(c, c.initial.N, c.seed), grid);
    const Trajectory tr = integrate(solver, s0, c.resolved_steps(), c.tank.dt, {std::max(1, c.resolved_steps())});
    const double H0 = tr.diagnostics.front().H;
    double drift = 0.0;
    for (const auto& s : tr.diagnostics) drift = std::max(drift, std::abs(s.H - H0));
    const double rel = H0 > 0.0 ? drift / H0 : drift;
    Outcome out;
    out.pass = rel <= c.tol.energy;
    out.records.push_back(config_record(c));
    Record r("simulate");
    r.add("steps", tr.steps())
        .add("T", tr.duration())
        .add("H0", H0)
        .add("H_final", tr.diagnostics.back().H)
        .add("max_energy_drift", drift)
        .add("relative_energy_drift", rel)
        .add("tol_energy", c.tol.energy)
        .add("pass", out.pass);
    out.records.push_back(r);
    write_trajectory(dir / "series.dat", tr);
    return out;
}

Outcome run_pohozaev(const RunConfig& c, const fs::path&) {
    Grid grid(c.tank);
    DtnSolver solver(grid);
    const SurfaceState s0 = make_initial_data(initial_spec(c, c.initial.N, c.seed), grid);
    const PohozaevReport p = pohozaev(solver, s0.eta, s0.psi);
    Outcome out;
    out.pass = p.relative() <= c.tol.pohozaev;
    out.records.push_back(config_record(c));
    Record r("pohozaev");
    r.add("lhs", p.lhs)
        .add("wall_bottom", p.wall_bottom)
        .add("bulk", p.bulk)
        .add("surface", p.surface)
        .add("residual", p.residual)
        .add("reference_scale", p.reference_scale)
        .add("relative_residual", p.relative())
        .add("tol_pohozaev", c.tol.pohozaev)
        .add("pass", out.pass);
    out.records.push_back(r);
    return out;
}

Record identity_record(const IdentityReport& id, double tol) {
    Record r("main_identity");
    r.add("d", id.d)
        .add("T", id.T)
        .add("H", id.H)
        .add("BT", id.BT)
        .add("TH_half", id.TH_half)
        .add("P", id.P)
        .add("I1", id.I1)
        .add("I2", id.I2)
        .add("I3", id.I3)
        .add("residual", id.residual)
        .add("reference_scale", id.reference_scale)
        .add("relative_residual", id.relative())
        .add("tol_identity", tol)
        .add("pass", id.relative() <= tol);
    return r;
}

void write_residual(const fs::path& file, const Trajectory& tr) {
    std::vector<std::vector<double>> rows;
    for (const auto& p : running_residual(tr)) rows.push_back({p[0], p[1]});
    write_series(file, "t accumulated_residual", rows);
}

Outcome run_main_identity(const RunConfig& c, const fs::path& dir) {
    Grid grid(c.tank);
    DtnSolver solver(grid);
    const SurfaceState s0 = make_initial_data(initial_spec(c, c.initial.N, c.seed), grid);
    const Trajectory tr = integrate(solver, s0, c.resolved_steps(), c.tank.dt, {std::max(1, c.resolved_steps())});
    const IdentityReport id = main_identity(tr);
    const CornerCheck corner = corner_check(tr);
    Outcome out;
    out.pass = id.relative() <= c.tol.identity;
    out.records.push_back(config_record(c));
    out.records.push_back(identity_record(id, c.tol.identity));
    Record cr("corner");
    cr.add("max_relative", corner.max_relative).add("worst_step", corner.worst_step);
    out.records.push_back(cr);
    write_trajectory(dir / "series.dat", tr);
    write_residual(dir / "residual.dat", tr);
    return out;
}

Outcome run_scan(const RunConfig& c, const fs::path& dir) {
    const std::size_t count = c.scan_N.size();
    std::vector<ObservabilityReport> reports(count);
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                const int N = c.scan_N[i];
                InitialDataSpec spec = initial_spec(c, N, c.seed + static_cast<std::uint64_t>(N));
                spec.N = N;
                reports[i] = run_experiment(spec, c.tank, {c.K0, c.tol.identity});
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t nthreads = std::min<std::size_t>(static_cast<std::size_t>(c.jobs), count);
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < nthreads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    Outcome out;
    out.records.push_back(config_record(c));
    std::vector<std::vector<double>> rows;
    bool monotone = true;
    for (std::size_t i = 0; i < count; ++i) {
        const auto& r = reports[i];
        if (i > 0 && c.scan_N[i] > c.scan_N[i - 1] && !(r.T_used > reports[i - 1].T_used)) monotone = false;
        Record rec("experiment");
        rec.add("N", r.N)
            .add("H", r.H)
            .add("A_target", r.A_target)
            .add("A_measured", r.A_measured)
            .add("B_measured", r.B_measured)
            .add("T_used", r.T_used)
            .add("steps", r.steps)
            .add("BT", r.BT)
            .add("margin", r.margin)
            .add("identity_residual", r.identity.residual)
            .add("identity_reference_scale", r.identity.reference_scale)
            .add("lower_bound", r.corollary.lower_bound)
            .add("T_required", r.corollary.T_required)
            .add("max_corner_trace", r.max_corner_trace)
            .add("hypothesis_met", r.hypothesis_met)
            .add("pass", r.pass);
        out.records.push_back(rec);
        out.pass = out.pass && r.pass;
        rows.push_back({static_cast<double>(r.N), r.A_target, r.A_measured, r.B_measured, r.T_used, r.H, r.BT,
                        r.margin, r.pass ? 1.0 : 0.0});

        const fs::path sub = dir / ("N" + std::to_string(r.N));
        Outcome single;
        single.pass = r.pass;
        single.records = {rec, identity_record(r.identity, c.tol.identity)};
        write_results(sub, single);
        write_trajectory(sub / "series.dat", r.trajectory);
        write_residual(sub / "residual.dat", r.trajectory);
    }
    Record scan("scan");
    scan.add("runs", static_cast<int>(count)).add("T_used_monotone", monotone).add("K0", c.K0);
    out.records.push_back(scan);
    out.pass = out.pass && monotone;
    write_series(dir / "scan.dat", "N A_target A_measured B_measured T_used H BT margin pass", rows);
    return out;
}

Outcome run_dispersion(const RunConfig& c, const fs::path& dir) {
    const DispersionReport d =
        measure_dispersion(c.tank, c.dispersion_n, c.dispersion_m, c.dispersion_amplitude, c.dispersion_periods);
    Outcome out;
    out.pass = d.relative_error <= c.tol.dispersion;
    out.records.push_back(config_record(c));
    Record r("dispersion");
    r.add("n", c.dispersion_n)
        .add("m", c.dispersion_m)
        .add("k", d.k)
        .add("omega_linear", d.omega_linear)
        .add("omega_measured", d.omega_measured)
        .add("relative_error", d.relative_error)
        .add("tol_dispersion", c.tol.dispersion)
        .add("pass", out.pass);
    out.records.push_back(r);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < d.t.size(); ++i) rows.push_back({d.t[i], d.amplitude[i]});
    write_series(dir / "series.dat", "t modal_amplitude", rows);
    return out;
}

// Strict YAML access: every key must be known, every value well typed.
class Section {
public:
    Section(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {
        if (node_ && !node_.IsNull() && !node_.IsMap()) throw ConfigError(where("") + "must be a mapping");
    }

    template <class T>
    void get(const std::string& key, T& out) {
        seen_.insert(key);
        if (!node_ || !node_.IsMap() || !node_[key]) return;
        try {
            out = node_[key].template as<T>();
        } catch (const YAML::Exception&) {
            throw ConfigError(where(key) + "has the wrong type");
        }
    }

    YAML::Node child(const std::string& key) {
        seen_.insert(key);
        return node_ && node_.IsMap() ? node_[key] : YAML::Node();
    }

    std::string where(const std::string& key) const {
        std::string p = path_.empty() ? key : (key.empty() ? path_ : path_ + "." + key);
        return "config: " + (p.empty() ? std::string("document") : p) + " ";
    }

    void finish() const {
        if (!node_ || !node_.IsMap()) return;
        for (const auto& kv : node_) {
            const std::string k = kv.first.as<std::string>();
            if (!seen_.count(k)) throw ConfigError(where(k) + "is not a recognized field");
        }
    }

private:
    YAML::Node node_;
    std::string path_;
    std::set<std::string> seen_;
};

}  // namespace

Kind parse_kind(const std::string& name) {
    if (name == "simulate") return Kind::Simulate;
    if (name == "pohozaev") return Kind::Pohozaev;
    if (name == "main-identity") return Kind::MainIdentity;
    if (name == "observability-scan") return Kind::ObservabilityScan;
    if (name == "dispersion") return Kind::Dispersion;
    throw ConfigError("config: unknown kind '" + name + "'");
}

std::string kind_name(Kind kind) {
    switch (kind) {
        case Kind::Simulate: return "simulate";
        case Kind::Pohozaev: return "pohozaev";
        case Kind::MainIdentity: return "main-identity";
        case Kind::ObservabilityScan: return "observability-scan";
        case Kind::Dispersion: return "dispersion";
    }
    return "?";
}

int RunConfig::resolved_steps() const {
    if (!T) return steps;
    return static_cast<int>(std::lround(*T / tank.dt));
}

void RunConfig::validate() const {
    try {
        tank.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: tank: ") + e.what());
    }
    if (jobs < 1) throw ConfigError("config: jobs must be >= 1");
    if (!(tol.energy > 0.0) || !(tol.identity > 0.0) || !(tol.pohozaev > 0.0) || !(tol.dispersion > 0.0))
        throw ConfigError("config: tolerances must be positive");
    if (output.empty()) throw ConfigError("config: output must not be empty");
    if (kind == Kind::Simulate || kind == Kind::MainIdentity) {
        if (T) {
            const double n = *T / tank.dt;
            if (!(*T > 0.0) || std::abs(n - std::round(n)) > 1e-9 * std::max(1.0, n))
                throw ConfigError("config: run.T must be a positive whole number of dt");
        } else if (steps <= 0) {
            throw ConfigError("config: run.steps (or run.T) is required and must be positive");
        }
        if (kind == Kind::MainIdentity && resolved_steps() % 2 != 0)
            throw ConfigError("config: main-identity needs an even number of steps");
    }
    if (kind == Kind::ObservabilityScan) {
        if (scan_N.empty()) throw ConfigError("config: scan.N must not be empty");
        for (int N : scan_N)
            if (N < 0) throw ConfigError("config: scan.N entries must be >= 0");
        if (!(K0 > 0.0)) throw ConfigError("config: scan.K0 must be positive");
        if (!random_initial) throw ConfigError("config: observability-scan needs initial.random: true");
    }
    if (kind == Kind::Dispersion) {
        if (dispersion_n < 0 || dispersion_m < 0 || dispersion_n + dispersion_m == 0)
            throw ConfigError("config: dispersion mode must be nonzero");
        if (tank.d == 1 && dispersion_m != 0) throw ConfigError("config: dispersion.m must be 0 in d = 1");
        if (!(dispersion_amplitude > 0.0) || !(dispersion_periods > 0.0))
            throw ConfigError("config: dispersion amplitude and periods must be positive");
    }
    try {
        if (random_initial) {
            InitialDataSpec probe = initial;
            probe.modes.clear();
            probe.validate(tank.d);
        } else {
            initial.validate(tank.d);
        }
        if (kind != Kind::ObservabilityScan && kind != Kind::Dispersion) {
            Grid grid(tank);
            make_initial_data(initial_spec(*this, initial.N, seed), grid);
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

RunConfig load_config(const std::string& path) {
    YAML::Node root;
    try {
        root = YAML::LoadFile(path);
    } catch (const YAML::BadFile&) {
        throw ConfigError("config: cannot read " + path);
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("config: parse error: ") + e.what());
    }
    RunConfig c;
    Section top(root, "");
    std::string kind = "simulate";
    top.get("kind", kind);
    c.kind = parse_kind(kind);
    top.get("output", c.output);
    top.get("jobs", c.jobs);
    top.get("seed", c.seed);

    Section tank(top.child("tank"), "tank");
    tank.get("d", c.tank.d);
    tank.get("L1", c.tank.L1);
    tank.get("L2", c.tank.L2);
    tank.get("h", c.tank.h);
    tank.get("g", c.tank.g);
    tank.get("n1", c.tank.n1);
    tank.get("n2", c.tank.n2);
    tank.get("nz", c.tank.nz);
    tank.get("dt", c.tank.dt);
    tank.get("dealias", c.tank.dealias);
    tank.finish();

    Section init(top.child("initial"), "initial");
    init.get("N", c.initial.N);
    init.get("c", c.initial.c);
    init.get("kappa", c.initial.kappa);
    init.get("beta", c.initial.beta);
    init.get("random", c.random_initial);
    std::string envelope = "one";
    init.get("envelope", envelope);
    if (envelope == "one") c.initial.envelope = Envelope::One;
    else if (envelope == "bump") c.initial.envelope = Envelope::Bump;
    else throw ConfigError("config: initial.envelope must be 'one' or 'bump'");
    const YAML::Node modes = init.child("modes");
    if (modes && !modes.IsNull()) {
        if (!modes.IsSequence()) throw ConfigError("config: initial.modes must be a list");
        for (std::size_t i = 0; i < modes.size(); ++i) {
            Section m(modes[i], "initial.modes[" + std::to_string(i) + "]");
            Mode md;
            m.get("n", md.n);
            m.get("m", md.m);
            m.get("a1", md.a1);
            m.get("a2", md.a2);
            m.finish();
            c.initial.modes.push_back(md);
        }
    }
    init.finish();

    Section run(top.child("run"), "run");
    run.get("steps", c.steps);
    double T = 0.0;
    const YAML::Node tnode = run.child("T");
    const bool hasT = tnode && !tnode.IsNull();
    run.get("T", T);
    if (hasT) c.T = T;
    run.finish();

    Section scan(top.child("scan"), "scan");
    scan.get("N", c.scan_N);
    scan.get("K0", c.K0);
    scan.finish();

    Section disp(top.child("dispersion"), "dispersion");
    disp.get("n", c.dispersion_n);
    disp.get("m", c.dispersion_m);
    disp.get("amplitude", c.dispersion_amplitude);
    disp.get("periods", c.dispersion_periods);
    disp.finish();

    Section tol(top.child("tolerances"), "tolerances");
    tol.get("energy", c.tol.energy);
    tol.get("identity", c.tol.identity);
    tol.get("pohozaev", c.tol.pohozaev);
    tol.get("dispersion", c.tol.dispersion);
    tol.finish();

    top.finish();
    return c;
}

int run(const RunConfig& config, std::ostream& log) {
    config.validate();
    const fs::path dir(config.output);
    Outcome out;
    try {
        switch (config.kind) {
            case Kind::Simulate: out = run_simulate(config, dir); break;
            case Kind::Pohozaev: out = run_pohozaev(config, dir); break;
            case Kind::MainIdentity: out = run_main_identity(config, dir); break;
            case Kind::ObservabilityScan: out = run_scan(config, dir); break;
            case Kind::Dispersion: out = run_dispersion(config, dir); break;
        }
    } catch (const NumericalError& e) {
        log << "numerical failure in stage '" << e.stage() << "': " << e.what() << "\n";
        return 3;
    }
    write_results(dir, out);
    for (const auto& r : out.records) log << r.pretty();
    log << "overall: " << (out.pass ? "PASS" : "FAIL") << "\n";
    return out.pass ? 0 : 1;
}

double measure_frequency(const std::vector<double>& t, const std::vector<double>& s) {
    std::vector<double> crossings;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        if (s[i] == 0.0 && (crossings.empty() || crossings.back() != t[i])) crossings.push_back(t[i]);
        else if (s[i] * s[i + 1] < 0.0) crossings.push_back(t[i] + (t[i + 1] - t[i]) * s[i] / (s[i] - s[i + 1]));
    }
    if (crossings.size() < 2) return NAN;
    return pi * static_cast<double>(crossings.size() - 1) / (crossings.back() - crossings.front());
}

DispersionReport measure_dispersion(const TankConfig& cfg, int n, int m, double amplitude, double periods) {
    Grid grid(cfg);
    DtnSolver solver(grid);
    const int d = grid.dim();
    const Field mode = grid.sample([&](double x1, double x2) {
        return std::cos(pi * n * x1 / cfg.L1) * (d == 2 ? std::cos(pi * m * x2 / cfg.L2) : 1.0);
    });
    const double norm = inner(grid, mode, mode);
    DispersionReport r;
    r.k = std::hypot(pi * n / cfg.L1, d == 2 ? pi * m / cfg.L2 : 0.0);
    r.omega_linear = std::sqrt(cfg.g * r.k * std::tanh(r.k * cfg.h));
    const double period = 2.0 * pi / r.omega_linear;
    const int per_period = std::max(100, static_cast<int>(std::ceil(period / cfg.dt)));
    const double dt = period / per_period;
    const int steps = static_cast<int>(std::ceil(periods * per_period));

    SurfaceState s{amplitude * cfg.h * mode, grid.zeros(), 0.0};
    for (int k = 0;; ++k) {
        r.t.push_back(s.t);
        r.amplitude.push_back(inner(grid, s.eta, mode) / norm);
        if (k == steps) break;
        s = step(solver, s, dt);
    }
    r.omega_measured = measure_frequency(r.t, r.amplitude);
    r.relative_error = std::abs(r.omega_measured - r.omega_linear) / r.omega_linear;
    return r;
}

}  // namespace wavetank
