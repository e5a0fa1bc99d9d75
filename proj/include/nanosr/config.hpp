// config.hpp: Scenario files (TOML or JSON) and their translation into scenarios
#pragma once

#include "nanosr/core_model.hpp"
#include "nanosr/green.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace nanosr {

struct GeometrySpec {
    std::string kind = "square";     ///< square | square_fill | linear
    int n_side = 3;                  ///< square
    int count = 1;                   ///< square_fill, linear
    double spacing = 1.0;            ///< nm
    Vec3 origin = Vec3::Zero();      ///< center (square kinds) or start (linear), nm
    Vec3 direction = Vec3::UnitX();  ///< linear
    CVec3 dipole = CVec3(0, 0, 4);   ///< Debye
    double transition_energy = 0.0;  ///< meV

    int size() const { return kind == "square" ? n_side * n_side : count; }
};

struct CouplingSpec {
    std::string source = "synthetic";  ///< free_space | tabulated | synthetic | uniform
    PlasmonicProfile profile;          ///< synthetic
    std::filesystem::path table;       ///< tabulated, resolved against the config directory
    double uniform_gamma = 0.0;        ///< uniform, meV
};

struct DriveSpec {
    std::complex<double> amplitude = 0.0;           ///< hbar v, same for every emitter, meV
    std::vector<std::complex<double>> amplitudes;   ///< per-emitter override
    double detuning = 0.0;                          ///< E_transition - E_laser, meV
    Envelope envelope = Continuous{};
};

struct RunConfig {
    std::string label = "scenario";
    GeometrySpec geometry;
    CouplingSpec couplings;
    PropagationMode propagation = ConstantPropagation{};
    DriveSpec drive;
    SolverKind solver = SolverKind::cumulant2;
    InitialState initial = InitialState::ground;
    double t_final = 500.0;      ///< fs
    double output_dt = 0.5;      ///< fs
    std::optional<double> tol_abs;
    std::optional<double> tol_rel;
    double analysis_start = 0.0; ///< fs
    std::optional<double> analysis_end;
    std::vector<int> sweep_n;
    std::uint64_t seed = 0;
    nlohmann::json echo;         ///< normalised form of the parsed file
};

/// Reads a .toml or .json scenario file. Throws ConfigError with the line (TOML) and field path.
RunConfig load_config(const std::filesystem::path& path);

/// Interprets an already parsed document. Relative file references resolve against base_dir.
RunConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);

SolverKind parse_solver(const std::string& name);

/// Emitters of the configured geometry; n_override replaces the emitter count (square kinds fill
/// a square lattice row by row).
Ensemble build_ensemble(const RunConfig& cfg, std::optional<int> n_override = std::nullopt);

/// Complete scenario including couplings and propagation factors.
Scenario build_scenario(const RunConfig& cfg, std::optional<int> n_override = std::nullopt);

} // namespace nanosr
