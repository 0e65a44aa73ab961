#ifndef TORUSNS_IO_HPP
#define TORUSNS_IO_HPP

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <random>
#include <string>

#include "torusns/solver.hpp"

namespace torusns {

using json = nlohmann::json;

/// Fixed float formatting for deterministic CSV/JSON bytes.
inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12e", v);
    return buf;
}

inline const char* repr_name(Repr r) { return r == Repr::physical ? "physical" : "spectral"; }

inline Repr repr_from_name(const std::string& s) {
    if (s == "physical") return Repr::physical;
    if (s == "spectral") return Repr::spectral;
    throw std::invalid_argument("unknown representation: " + s);
}

// ---------------------------------------------------------------------------
// FormField serialization. Header: {n, degree, res, repr}; components in
// lexicographic increasing multi-index order, each a row-major lattice of
// complex values (re, im pairs).
// ---------------------------------------------------------------------------

inline json field_to_json(const FormField& u) {
    json j;
    j["format"] = "form-field";
    j["n"] = u.grid().dim();
    j["degree"] = u.degree();
    j["res"] = u.grid().res();
    j["repr"] = repr_name(u.repr());
    j["component_order"] = "lexicographic-increasing-multi-indices";
    json comps = json::array();
    for (int c = 0; c < u.ncomp(); ++c) {
        json comp = json::array();
        for (const auto& z : u.comp(c)) comp.push_back({z.real(), z.imag()});
        comps.push_back(std::move(comp));
    }
    j["components"] = std::move(comps);
    return j;
}

inline FormField field_from_json(const json& j) {
    if (j.at("format") != "form-field") throw std::invalid_argument("not a form-field document");
    Grid g(j.at("res").get<std::vector<int>>());
    if (j.at("n").get<int>() != g.dim()) throw std::invalid_argument("form-field: n/res mismatch");
    FormField u(g, j.at("degree").get<int>(), repr_from_name(j.at("repr").get<std::string>()));
    const auto& comps = j.at("components");
    if (comps.size() != static_cast<size_t>(u.ncomp()))
        throw std::invalid_argument("form-field: wrong component count");
    for (int c = 0; c < u.ncomp(); ++c) {
        const auto& comp = comps[static_cast<size_t>(c)];
        if (comp.size() != g.size()) throw std::invalid_argument("form-field: wrong lattice size");
        for (size_t p = 0; p < g.size(); ++p)
            u.comp(c)[p] = {comp[p][0].get<double>(), comp[p][1].get<double>()};
    }
    return u;
}

inline constexpr char field_magic[4] = {'T', 'N', 'S', 'F'};

inline void write_field_binary(const FormField& u, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.write(field_magic, 4);
    auto put_i32 = [&](int32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); };
    put_i32(1); // version
    put_i32(u.grid().dim());
    put_i32(u.degree());
    put_i32(u.repr() == Repr::physical ? 0 : 1);
    for (int a = 0; a < u.grid().dim(); ++a) put_i32(u.grid().res(a));
    for (int c = 0; c < u.ncomp(); ++c)
        out.write(reinterpret_cast<const char*>(u.comp(c).data()),
                  static_cast<std::streamsize>(u.grid().size() * sizeof(std::complex<double>)));
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline FormField read_field_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::string(magic, 4) != std::string(field_magic, 4))
        throw std::runtime_error("bad field file magic: " + path);
    auto get_i32 = [&]() {
        int32_t v = 0;
        in.read(reinterpret_cast<char*>(&v), 4);
        return v;
    };
    const int version = get_i32();
    if (version != 1) throw std::runtime_error("unsupported field file version");
    const int n = get_i32();
    const int degree = get_i32();
    const int repr = get_i32();
    std::vector<int> res(static_cast<size_t>(n));
    for (int a = 0; a < n; ++a) res[static_cast<size_t>(a)] = get_i32();
    FormField u(Grid(res), degree, repr == 0 ? Repr::physical : Repr::spectral);
    for (int c = 0; c < u.ncomp(); ++c)
        in.read(reinterpret_cast<char*>(u.comp(c).data()),
                static_cast<std::streamsize>(u.grid().size() * sizeof(std::complex<double>)));
    if (!in) throw std::runtime_error("truncated field file: " + path);
    return u;
}

inline json spacetime_to_json(const SpaceTimeField& u) {
    json j;
    j["format"] = "space-time-field";
    j["horizon"] = u.horizon();
    j["steps"] = u.steps();
    json frames = json::array();
    for (int m = 0; m <= u.steps(); ++m) frames.push_back(field_to_json(u.frame(m)));
    j["frames"] = std::move(frames);
    return j;
}

inline SpaceTimeField spacetime_from_json(const json& j) {
    if (j.at("format") != "space-time-field")
        throw std::invalid_argument("not a space-time-field document");
    const int steps = j.at("steps").get<int>();
    const double horizon = j.at("horizon").get<double>();
    const auto& frames = j.at("frames");
    if (frames.size() != static_cast<size_t>(steps) + 1)
        throw std::invalid_argument("space-time-field: frame count mismatch");
    int m = 0;
    return SpaceTimeField::sample(horizon, steps, [&](double) {
        return field_from_json(frames[static_cast<size_t>(m++)]);
    });
}

// ---------------------------------------------------------------------------
// Custom bilinear table: JSON lists of (out, in1, in2, coeff).
// ---------------------------------------------------------------------------

inline json bilinear_to_json(const BilinearSpec& spec) {
    json j;
    auto table = [](const std::vector<BilinearEntry>& t) {
        json arr = json::array();
        for (const auto& e : t)
            arr.push_back({{"out", e.out_index}, {"in1", e.in1_index}, {"in2", e.in2_index},
                           {"coeff", e.coeff}});
        return arr;
    };
    if (spec.m1_table) j["m1"] = table(*spec.m1_table);
    if (spec.m2_table) j["m2"] = table(*spec.m2_table);
    j["c1"] = spec.c1;
    j["c2"] = spec.c2;
    return j;
}

inline BilinearSpec bilinear_from_json(const json& j) {
    BilinearSpec spec;
    auto table = [](const json& arr) {
        std::vector<BilinearEntry> t;
        for (const auto& e : arr)
            t.push_back({e.at("out").get<int>(), e.at("in1").get<int>(), e.at("in2").get<int>(),
                         e.at("coeff").get<double>()});
        return t;
    };
    if (j.contains("m1")) spec.m1_table = table(j.at("m1"));
    if (j.contains("m2")) spec.m2_table = table(j.at("m2"));
    if (j.contains("c1")) spec.c1 = j.at("c1").get<double>();
    if (j.contains("c2")) spec.c2 = j.at("c2").get<double>();
    return spec;
}

// ---------------------------------------------------------------------------
// Solver config and problem bundles.
// ---------------------------------------------------------------------------

inline json solver_config_to_json(const SolverConfig& cfg) {
    json j;
    j["mu"] = cfg.mu;
    j["horizon"] = cfg.horizon;
    j["steps"] = cfg.steps;
    j["tol_fixed_point"] = cfg.tol_fixed_point;
    j["tol_linear"] = cfg.tol_linear;
    j["max_iter"] = cfg.max_iter;
    j["method"] = cfg.method == SolveMethod::picard ? "picard" : "newton";
    j["relaxation"] = cfg.relaxation;
    j["auto_project"] = cfg.auto_project;
    return j;
}

inline SolverConfig solver_config_from_json(const json& j) {
    SolverConfig cfg;
    if (j.contains("mu")) cfg.mu = j.at("mu").get<double>();
    if (j.contains("horizon")) cfg.horizon = j.at("horizon").get<double>();
    if (j.contains("steps")) cfg.steps = j.at("steps").get<int>();
    if (j.contains("tol_fixed_point")) cfg.tol_fixed_point = j.at("tol_fixed_point").get<double>();
    if (j.contains("tol_linear")) cfg.tol_linear = j.at("tol_linear").get<double>();
    if (j.contains("max_iter")) cfg.max_iter = j.at("max_iter").get<int>();
    if (j.contains("relaxation")) cfg.relaxation = j.at("relaxation").get<double>();
    if (j.contains("auto_project")) cfg.auto_project = j.at("auto_project").get<bool>();
    if (j.contains("method")) {
        const std::string m = j.at("method").get<std::string>();
        if (m == "picard")
            cfg.method = SolveMethod::picard;
        else if (m == "newton")
            cfg.method = SolveMethod::newton;
        else
            throw std::invalid_argument("unknown solver method: " + m);
    }
    if (j.contains("bilinear")) cfg.bilinear = bilinear_from_json(j.at("bilinear"));
    cfg.validate();
    return cfg;
}

/// The decaying planar vortex velocity field, z-independent when embedded in
/// a 3-torus: u = F(t)(sin cos, -cos sin, 0), F = exp(-8 pi^2 mu t).
inline FormField taylor_green_velocity(const Grid& g, double mu, double t) {
    FormField u(g, 1, Repr::physical);
    const double amp = std::exp(-2.0 * two_pi * two_pi * mu * t);
    for (size_t p = 0; p < g.size(); ++p) {
        const auto idx = g.unflat(p);
        const double x = g.coord(0, idx[0]);
        const double y = g.coord(1, idx[1]);
        u.comp(0)[p] = amp * std::sin(two_pi * x) * std::cos(two_pi * y);
        u.comp(1)[p] = -amp * std::cos(two_pi * x) * std::sin(two_pi * y);
    }
    return u;
}

/// Its pressure (mean-free): p = (F(t)^2 / 4)(cos 4 pi x + cos 4 pi y).
inline FormField taylor_green_pressure(const Grid& g, double mu, double t) {
    FormField p(g, 0, Repr::physical);
    const double amp = std::exp(-4.0 * two_pi * two_pi * mu * t) / 4.0;
    for (size_t q = 0; q < g.size(); ++q) {
        const auto idx = g.unflat(q);
        const double x = g.coord(0, idx[0]);
        const double y = g.coord(1, idx[1]);
        p.comp(0)[q] = amp * (std::cos(2 * two_pi * x) + std::cos(2 * two_pi * y));
    }
    return p;
}

/// Builds a field from an inline descriptor:
///   {"type": "zero"} | {"type": "file", "path": ...}
/// | {"type": "random_solenoidal", "amplitude": a, "kmax": k}
/// | {"type": "taylor_green", "mu": m, "time": t}
/// File paths are resolved relative to base_dir.
inline FormField field_from_descriptor(const json& j, const Grid& g, int degree,
                                       std::mt19937_64& rng, const std::string& base_dir) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "zero") return FormField(g, degree, Repr::spectral);
    if (type == "file") {
        std::string path = j.at("path").get<std::string>();
        if (!path.empty() && path.front() != '/' && !base_dir.empty())
            path = base_dir + "/" + path;
        FormField u = path.size() > 5 && path.substr(path.size() - 5) == ".json"
                          ? field_from_json(json::parse(std::ifstream(path)))
                          : read_field_binary(path);
        if (u.grid() != g || u.degree() != degree)
            throw std::invalid_argument("field file does not match problem grid/degree: " + path);
        return u;
    }
    if (type == "random_solenoidal") {
        const double amp = j.value("amplitude", 1.0);
        const int kmax = j.value("kmax", -1);
        return leray_projection(remove_mean(random_band_limited(g, degree, rng, kmax, amp)));
    }
    if (type == "taylor_green") {
        if (degree != 1) throw std::invalid_argument("taylor_green descriptor needs degree 1");
        return taylor_green_velocity(g, j.value("mu", 0.1), j.value("time", 0.0));
    }
    throw std::invalid_argument("unknown field descriptor type: " + type);
}

struct ProblemBundle {
    Grid grid;
    int degree = 1;
    SolverConfig config;
    FormField u0;
    SpaceTimeField f;
};

/// Problem bundle descriptor: grid, degree, solver config, and descriptors
/// for u0 and f. A forcing descriptor is sampled once and held constant in
/// time unless it is a space-time-field file.
inline ProblemBundle problem_from_json(const json& j, uint64_t seed,
                                       const std::string& base_dir = "") {
    ProblemBundle b;
    b.grid = Grid(j.at("res").get<std::vector<int>>());
    b.degree = j.value("degree", 1);
    b.config = j.contains("solver") ? solver_config_from_json(j.at("solver")) : SolverConfig{};
    std::mt19937_64 rng(seed);
    b.u0 = field_from_descriptor(j.at("u0"), b.grid, b.degree, rng, base_dir);
    const auto& fd = j.at("f");
    if (fd.at("type") == "spacetime_file") {
        std::string path = fd.at("path").get<std::string>();
        if (!path.empty() && path.front() != '/' && !base_dir.empty())
            path = base_dir + "/" + path;
        b.f = spacetime_from_json(json::parse(std::ifstream(path)));
    } else {
        const FormField snapshot = field_from_descriptor(fd, b.grid, b.degree, rng, base_dir);
        b.f = SpaceTimeField::sample(b.config.horizon, b.config.steps,
                                     [&](double) { return snapshot; });
    }
    return b;
}

// ---------------------------------------------------------------------------
// Report emission.
// ---------------------------------------------------------------------------

inline json solve_report_to_json(const SolveReport& rep) {
    json j;
    j["converged"] = rep.converged;
    j["iterations"] = rep.iterations;
    j["final_residual"] = format_double(rep.final_residual);
    j["message"] = rep.message;
    json hist = json::array();
    for (double r : rep.residual_history) hist.push_back(format_double(r));
    j["residual_history"] = std::move(hist);
    return j;
}

inline void write_text(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << body;
    if (!out) throw std::runtime_error("write failed: " + path);
}

/// CSV table with fixed float formatting: header row then data rows.
inline std::string make_csv(const std::vector<std::string>& header,
                            const std::vector<std::vector<double>>& rows) {
    std::string out;
    for (size_t c = 0; c < header.size(); ++c) {
        if (c) out += ',';
        out += header[c];
    }
    out += '\n';
    for (const auto& row : rows) {
        for (size_t c = 0; c < row.size(); ++c) {
            if (c) out += ',';
            out += format_double(row[c]);
        }
        out += '\n';
    }
    return out;
}

inline std::string residual_csv(const std::vector<ResidualRow>& rows) {
    std::vector<std::vector<double>> data;
    for (const auto& r : rows) data.push_back({r.time, r.momentum, r.div_v, r.div_p, r.initial});
    return make_csv({"time", "momentum_residual", "div_v", "div_p", "initial_error"}, data);
}

inline std::string energy_csv(const std::vector<EnergyLedgerRow>& rows) {
    std::vector<std::vector<double>> data;
    for (const auto& r : rows)
        data.push_back({r.time, r.kinetic, r.dissipation, r.transport, r.work, r.imbalance});
    return make_csv({"time", "kinetic", "dissipation", "transport", "work", "imbalance"}, data);
}

inline std::string stability_csv(const StabilityResult& result) {
    std::vector<std::vector<double>> data;
    for (const auto& r : result.rows)
        data.push_back({r.delta, r.converged ? 1.0 : 0.0, r.datum_change, r.solution_change,
                        r.ratio});
    return make_csv({"delta", "converged", "datum_change", "solution_change", "ratio"}, data);
}

} // namespace torusns

#endif
