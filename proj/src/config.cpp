#include "nanosr/config.hpp"

#include "nanosr/errors.hpp"
#include "nanosr/units.hpp"

#include <toml.hpp>

#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace nanosr {

namespace {

using nlohmann::json;
using LineMap = std::map<std::string, int>;

std::string join(const std::string& prefix, const std::string& key) {
    return prefix.empty() ? key : prefix + "." + key;
}

json to_json(const toml::node& node, const std::string& path, LineMap& lines) {
    lines[path] = static_cast<int>(node.source().begin.line);
    if (const auto* t = node.as_table()) {
        json out = json::object();
        for (const auto& [k, v] : *t) out[std::string(k.str())] = to_json(v, join(path, std::string(k.str())), lines);
        return out;
    }
    if (const auto* a = node.as_array()) {
        json out = json::array();
        for (std::size_t i = 0; i < a->size(); ++i)
            out.push_back(to_json(*a->get(i), path + "[" + std::to_string(i) + "]", lines));
        return out;
    }
    if (const auto* v = node.as_integer()) return v->get();
    if (const auto* v = node.as_floating_point()) return v->get();
    if (const auto* v = node.as_boolean()) return v->get();
    if (const auto* v = node.as_string()) return v->get();
    throw ConfigError(path + ": unsupported TOML value (dates are not accepted)");
}

// Typed access to one table of the document with path/line aware errors.
class Section {
public:
    Section(const json& doc, std::string path, const LineMap& lines)
        : doc_(doc), path_(std::move(path)), lines_(lines) {}

    [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
        const std::string field = join(path_, key);
        std::ostringstream os;
        os << "config error: " << field;
        auto it = lines_.find(field);
        if (it == lines_.end()) it = lines_.find(path_);
        if (it != lines_.end() && it->second > 0) os << " (line " << it->second << ")";
        os << ": " << msg;
        throw ConfigError(os.str());
    }

    bool has(const std::string& key) const { return doc_.is_object() && doc_.contains(key); }
    bool is_array(const std::string& key) const { return has(key) && doc_.at(key).is_array(); }

    void allow(std::initializer_list<const char*> keys) const {
        if (!doc_.is_object()) return;
        const std::set<std::string> ok(keys.begin(), keys.end());
        for (const auto& [k, v] : doc_.items())
            if (!ok.count(k)) fail(k, "unknown field");
    }

    Section sub(const std::string& key) const {
        static const json empty = json::object();
        if (!has(key)) return {empty, join(path_, key), lines_};
        if (!doc_.at(key).is_object()) fail(key, "expected a table");
        return {doc_.at(key), join(path_, key), lines_};
    }

    double number(const std::string& key) const {
        if (!has(key)) fail(key, "required field is missing");
        const auto& v = doc_.at(key);
        if (!v.is_number()) fail(key, "expected a number");
        return v.get<double>();
    }
    double number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }
    std::optional<double> maybe_number(const std::string& key) const {
        return has(key) ? std::optional<double>(number(key)) : std::nullopt;
    }
    double positive(const std::string& key, double fallback) const {
        const double v = number(key, fallback);
        if (!(v > 0.0)) fail(key, "must be positive");
        return v;
    }

    int integer(const std::string& key, int fallback) const {
        if (!has(key)) return fallback;
        const auto& v = doc_.at(key);
        if (!v.is_number_integer()) fail(key, "expected an integer");
        return v.get<int>();
    }

    std::string string(const std::string& key, const std::string& fallback) const {
        if (!has(key)) return fallback;
        const auto& v = doc_.at(key);
        if (!v.is_string()) fail(key, "expected a string");
        return v.get<std::string>();
    }

    std::string choice(const std::string& key, const std::string& fallback,
                       std::initializer_list<const char*> options) const {
        const std::string v = string(key, fallback);
        for (const char* o : options)
            if (v == o) return v;
        std::string list;
        for (const char* o : options) list += (list.empty() ? "" : " | ") + std::string(o);
        fail(key, "'" + v + "' is not one of " + list);
    }

    std::vector<double> numbers(const std::string& key) const {
        const auto& v = doc_.at(key);
        if (!v.is_array()) fail(key, "expected an array of numbers");
        std::vector<double> out;
        for (const auto& x : v) {
            if (!x.is_number()) fail(key, "expected an array of numbers");
            out.push_back(x.get<double>());
        }
        return out;
    }

    Vec3 vec3(const std::string& key, const Vec3& fallback) const {
        if (!has(key)) return fallback;
        const auto v = numbers(key);
        if (v.size() != 3) fail(key, "expected three components");
        return {v[0], v[1], v[2]};
    }

private:
    const json& doc_;
    std::string path_;
    const LineMap& lines_;
};

GeometrySpec parse_geometry(const Section& g) {
    g.allow({"kind", "n_side", "count", "spacing_nm", "center_nm", "start_nm", "direction", "dipole_debye",
             "wavelength_nm", "transition_energy_mev"});
    GeometrySpec out;
    out.kind = g.choice("kind", "square", {"square", "square_fill", "linear"});
    if (out.kind == "square") {
        out.n_side = g.integer("n_side", 3);
        if (out.n_side < 1) g.fail("n_side", "must be >= 1");
    } else {
        out.count = g.integer("count", 1);
        if (out.count < 1) g.fail("count", "must be >= 1");
    }
    out.spacing = g.positive("spacing_nm", 1.0);
    if (out.kind == "linear") {
        out.origin = g.vec3("start_nm", Vec3::Zero());
        out.direction = g.vec3("direction", Vec3::UnitX());
        if (out.direction.norm() == 0.0) g.fail("direction", "must be non-zero");
    } else {
        out.origin = g.vec3("center_nm", Vec3::Zero());
    }
    // scalar: vertical dipole of that magnitude; array: full real vector
    if (g.is_array("dipole_debye"))
        out.dipole = g.vec3("dipole_debye", Vec3::Zero()).cast<std::complex<double>>();
    else
        out.dipole = CVec3(0, 0, g.number("dipole_debye", 4.0));
    if (out.dipole.norm() == 0.0) g.fail("dipole_debye", "must be non-zero");
    if (g.has("wavelength_nm") && g.has("transition_energy_mev"))
        g.fail("wavelength_nm", "give either wavelength_nm or transition_energy_mev, not both");
    if (g.has("transition_energy_mev"))
        out.transition_energy = g.positive("transition_energy_mev", 0.0);
    else
        out.transition_energy = units::energy_from_wavelength(g.positive("wavelength_nm", 660.0));
    return out;
}

CouplingSpec parse_couplings(const Section& c, const std::filesystem::path& base_dir) {
    c.allow({"source", "path", "gamma_self_mev", "omega_self_mev", "gamma_range_nm", "omega_range_nm", "omega_sign",
             "gamma_mev"});
    CouplingSpec out;
    out.source = c.choice("source", "synthetic", {"free_space", "tabulated", "synthetic", "uniform"});
    if (out.source == "tabulated") {
        const std::string p = c.string("path", "");
        if (p.empty()) c.fail("path", "tabulated couplings need a file");
        out.table = std::filesystem::path(p).is_absolute() ? std::filesystem::path(p) : base_dir / p;
        if (!std::filesystem::exists(out.table)) c.fail("path", "file not found: " + out.table.string());
    } else if (out.source == "synthetic") {
        const int sign = c.integer("omega_sign", 1);
        if (sign != 1 && sign != -1) c.fail("omega_sign", "must be +1 or -1");
        out.profile = synthetic_plasmonic_profile(c.number("gamma_self_mev", 7.0), c.number("omega_self_mev", 15.0),
                                                  c.positive("gamma_range_nm", 10.0),
                                                  c.positive("omega_range_nm", 1.0), sign);
        if (out.profile.gamma_self < 0.0) c.fail("gamma_self_mev", "must be >= 0");
    } else if (out.source == "uniform") {
        out.uniform_gamma = c.number("gamma_mev");
        if (out.uniform_gamma < 0.0) c.fail("gamma_mev", "must be >= 0");
    }
    return out;
}

PropagationMode parse_propagation(const Section& p) {
    p.allow({"mode", "detector_nm"});
    if (p.choice("mode", "constant", {"constant", "detector"}) == "constant") return ConstantPropagation{};
    if (!p.has("detector_nm")) p.fail("detector_nm", "required field is missing");
    return FreeSpaceDetector{p.vec3("detector_nm", Vec3::Zero())};
}

DriveSpec parse_drive(const Section& d) {
    d.allow({"amplitude_mev", "amplitudes_mev", "phase_rad", "detuning_mev", "envelope", "t_on_fs", "t_off_fs",
             "center_fs", "fwhm_fs"});
    DriveSpec out;
    const std::complex<double> phase = std::polar(1.0, d.number("phase_rad", 0.0));
    out.amplitude = d.number("amplitude_mev", 0.0) * phase;
    if (d.has("amplitudes_mev"))
        for (double a : d.numbers("amplitudes_mev")) out.amplitudes.push_back(a * phase);
    out.detuning = d.number("detuning_mev", 0.0);
    const std::string env = d.choice("envelope", "continuous", {"continuous", "rectangular", "gaussian"});
    if (env == "rectangular") {
        Rectangular r{d.number("t_on_fs"), d.number("t_off_fs")};
        if (!(r.t_off > r.t_on)) d.fail("t_off_fs", "must exceed t_on_fs");
        out.envelope = r;
    } else if (env == "gaussian") {
        out.envelope = Gaussian{d.number("center_fs"), d.positive("fwhm_fs", 0.0)};
    }
    return out;
}

RunConfig parse_document(const json& doc, const std::filesystem::path& base_dir, const LineMap& lines);

} // namespace

SolverKind parse_solver(const std::string& name) {
    if (name == "exact") return SolverKind::exact;
    if (name == "mf1") return SolverKind::cumulant1;
    if (name == "mf2") return SolverKind::cumulant2;
    throw ConfigError("unknown solver '" + name + "' (expected exact | mf1 | mf2)");
}

namespace {

RunConfig parse_document(const json& doc, const std::filesystem::path& base_dir, const LineMap& lines) {
    const Section root(doc, "", lines);
    if (!doc.is_object()) throw ConfigError("config error: top level must be a table");
    root.allow({"label", "seed", "geometry", "couplings", "propagation", "drive", "run", "analysis", "sweep"});

    RunConfig cfg;
    cfg.label = root.string("label", "scenario");
    if (root.has("seed")) {
        if (!doc.at("seed").is_number_unsigned()) root.fail("seed", "expected a non-negative integer");
        cfg.seed = doc.at("seed").get<std::uint64_t>();
    }
    cfg.geometry = parse_geometry(root.sub("geometry"));
    cfg.couplings = parse_couplings(root.sub("couplings"), base_dir);
    cfg.propagation = parse_propagation(root.sub("propagation"));
    cfg.drive = parse_drive(root.sub("drive"));

    const Section run = root.sub("run");
    run.allow({"solver", "initial", "t_final_fs", "output_dt_fs", "tol_abs", "tol_rel"});
    cfg.solver = parse_solver(run.choice("solver", "mf2", {"exact", "mf1", "mf2"}));
    cfg.initial = run.choice("initial", "ground", {"ground", "inverted"}) == "ground" ? InitialState::ground
                                                                                      : InitialState::inverted;
    cfg.t_final = run.positive("t_final_fs", 500.0);
    cfg.output_dt = run.positive("output_dt_fs", 0.5);
    if (run.has("tol_abs")) cfg.tol_abs = run.positive("tol_abs", 0.0);
    if (run.has("tol_rel")) cfg.tol_rel = run.positive("tol_rel", 0.0);

    const Section an = root.sub("analysis");
    an.allow({"t_start_fs", "t_end_fs"});
    cfg.analysis_start = an.number("t_start_fs", 0.0);
    cfg.analysis_end = an.maybe_number("t_end_fs");
    if (cfg.analysis_end && !(*cfg.analysis_end > cfg.analysis_start)) an.fail("t_end_fs", "must exceed t_start_fs");

    const Section sw = root.sub("sweep");
    sw.allow({"n"});
    if (sw.has("n"))
        for (double v : sw.numbers("n")) {
            if (v != std::floor(v) || v < 1) sw.fail("n", "entries must be positive integers");
            cfg.sweep_n.push_back(static_cast<int>(v));
        }

    const int n = cfg.geometry.size();
    if (!cfg.drive.amplitudes.empty() && static_cast<int>(cfg.drive.amplitudes.size()) != n)
        root.sub("drive").fail("amplitudes_mev", "needs one entry per emitter (" + std::to_string(n) + ")");
    cfg.echo = doc;
    if (cfg.couplings.source == "tabulated") cfg.echo["couplings"]["path"] = cfg.couplings.table.string();
    return cfg;
}

} // namespace

RunConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir) {
    return parse_document(doc, base_dir, LineMap{});
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    const auto base = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");

    if (path.extension() == ".json") {
        json doc;
        try {
            doc = json::parse(buf.str());
        } catch (const json::parse_error& e) {
            throw ConfigError("config error: " + path.string() + ": " + e.what());
        }
        return parse_document(doc, base, LineMap{});
    }

    toml::table table;
    try {
        table = toml::parse(buf.str(), path.string());
    } catch (const toml::parse_error& e) {
        std::ostringstream os;
        os << "config error: " << path.string() << " (line " << e.source().begin.line << "): " << e.description();
        throw ConfigError(os.str());
    }
    LineMap lines;
    const json doc = to_json(table, "", lines);
    return parse_document(doc, base, lines);
}

Ensemble build_ensemble(const RunConfig& cfg, std::optional<int> n_override) {
    const auto& g = cfg.geometry;
    Ensemble e;
    if (g.kind == "linear") {
        e = make_linear_array(n_override.value_or(g.count), g.spacing, g.origin, g.direction.normalized(), g.dipole,
                              g.transition_energy);
    } else if (g.kind == "square" && !n_override) {
        e = make_square_array(g.n_side, g.spacing, g.origin, g.dipole, g.transition_energy);
    } else {
        e = make_square_fill(n_override.value_or(g.count), g.spacing, g.origin, g.dipole, g.transition_energy);
    }
    e.label = cfg.label;
    return e;
}

Scenario build_scenario(const RunConfig& cfg, std::optional<int> n_override) {
    Scenario s;
    s.ensemble = build_ensemble(cfg, n_override);
    const auto n = s.ensemble.size();
    const auto& c = cfg.couplings;
    if (c.source == "free_space") {
        s.couplings = couplings_from_green(s.ensemble, free_space_green);
    } else if (c.source == "tabulated") {
        s.couplings = load_tabulated_green(read_tabulated_green(c.table.string()), s.ensemble);
    } else if (c.source == "synthetic") {
        s.couplings = couplings_from_green(s.ensemble, as_green_evaluator(c.profile, s.ensemble[0].dipole.norm()));
    } else {
        s.couplings = uniform_couplings(n, c.uniform_gamma);
    }
    s.couplings.k_factors = propagation_factors(s.ensemble, cfg.propagation);

    const double carrier = coupling_energy(s.ensemble) - cfg.drive.detuning;
    s.drive = make_uniform_drive(n, carrier, cfg.drive.amplitude, cfg.drive.envelope);
    if (!cfg.drive.amplitudes.empty()) {
        if (cfg.drive.amplitudes.size() != n)
            throw ConfigError("config error: drive.amplitudes_mev needs one entry per emitter");
        s.drive.amplitudes = Eigen::Map<const Eigen::VectorXcd>(cfg.drive.amplitudes.data(), Eigen::Index(n));
    }
    s.t_final = cfg.t_final;
    s.solver = cfg.solver;
    s.initial = cfg.initial;
    return s;
}

} // namespace nanosr
