// Orchestration: run configuration, the intact -> snapshot -> damaged-branch
// experiment protocol, JSONL generation logs, versioned JSON snapshots, and
// CSV report exports.
//
// Run directory layout (under an output root):
//   <run_id>/config.json
//   <run_id>/log.jsonl          header line, then one generation per line
//   <run_id>/result.json        termination reason and final optimum
//   <run_id>/snapshots/gen_NNNNNN.json
#pragma once

#include <algorithm>
#include <array>
#include <iomanip>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "finopt/analysis.hpp"
#include "finopt/cmaes.hpp"
#include "finopt/common.hpp"
#include "finopt/fitness.hpp"
#include "finopt/kinematics.hpp"
#include "finopt/plant.hpp"

namespace finopt::harness {

using nlohmann::json;

inline constexpr int kLogSchemaVersion = 1;
inline constexpr const char* kLogSchemaId = "finopt.runlog";

struct RunConfig {
    std::string run_id = "run";
    fitness::Objective objective;
    plant::FinSpec fin;
    plant::FluidSpec fluid;
    plant::NoiseSpec noise;
    plant::DamageState damage;
    kinematics::TrajectoryParams initialization = kinematics::thrust_initialization();
    std::uint64_t optimizer_seed = 1;
    int lambda = 0;             // 0 = default 4 + floor(3 ln n)
    double sigma0 = 0.3;
    int generation_cap = 300;
    plant::EvaluateSettings evaluation;
    int snapshot_every = 1;

    json to_json() const;
    static RunConfig from_json(const json& j);
};

inline json RunConfig::to_json() const {
    json j;
    j["run_id"] = run_id;
    j["objective"] = {
        {"mode", objective.mode == fitness::ObjectiveMode::Thrust ? "thrust" : "side_force"},
        {"f_target", objective.f_target}};
    j["plant"] = {
        {"fin",
         {{"span", fin.span},
          {"chord", fin.chord},
          {"root_offset", fin.root_offset},
          {"n_strips", fin.n_strips},
          {"pitch_lag_tau", fin.pitch_lag_tau}}},
        {"fluid",
         {{"density", fluid.density},
          {"kinematic_viscosity", fluid.kinematic_viscosity},
          {"normal_force_coefficient_scale", fluid.normal_force_coefficient_scale}}},
        {"noise", {{"force_noise_std", noise.force_noise_std}, {"rng_seed", noise.rng_seed}}},
        {"damage",
         {{"intact", damage.intact},
          {"area_loss_fraction", damage.area_loss_fraction},
          {"cp_lateral_offset", damage.cp_lateral_offset}}}};
    j["optimizer"] = {{"seed", optimizer_seed},
                      {"lambda", lambda},
                      {"sigma0", sigma0},
                      {"generation_cap", generation_cap}};
    j["initialization"] = initialization.to_array();
    j["evaluation"] = {{"n_runs", evaluation.n_runs},
                       {"n_cycles", evaluation.n_cycles},
                       {"n_samples", evaluation.n_samples}};
    j["schedule"] = {{"snapshot_every", snapshot_every}};
    return j;
}

inline RunConfig RunConfig::from_json(const json& j) {
    try {
        RunConfig c;
        c.run_id = j.value("run_id", std::string("run"));
        if (j.contains("objective")) {
            const auto& o = j.at("objective");
            const std::string mode = o.value("mode", std::string("thrust"));
            if (mode == "thrust") {
                c.objective.mode = fitness::ObjectiveMode::Thrust;
            } else if (mode == "side_force") {
                c.objective.mode = fitness::ObjectiveMode::SideForce;
            } else {
                throw ConfigError("unknown objective mode: " + mode);
            }
            c.objective.f_target = o.value("f_target", 1.0);
            if (c.objective.f_target <= 0.0)
                throw ConfigError("f_target must be positive");
        }
        if (j.contains("plant")) {
            const auto& p = j.at("plant");
            if (p.contains("fin")) {
                const auto& f = p.at("fin");
                c.fin.span = f.value("span", c.fin.span);
                c.fin.chord = f.value("chord", c.fin.chord);
                c.fin.root_offset = f.value("root_offset", c.fin.root_offset);
                c.fin.n_strips = f.value("n_strips", c.fin.n_strips);
                c.fin.pitch_lag_tau = f.value("pitch_lag_tau", c.fin.pitch_lag_tau);
            }
            if (p.contains("fluid")) {
                const auto& f = p.at("fluid");
                c.fluid.density = f.value("density", c.fluid.density);
                c.fluid.kinematic_viscosity =
                    f.value("kinematic_viscosity", c.fluid.kinematic_viscosity);
                c.fluid.normal_force_coefficient_scale = f.value(
                    "normal_force_coefficient_scale", c.fluid.normal_force_coefficient_scale);
            }
            if (p.contains("noise")) {
                const auto& f = p.at("noise");
                c.noise.force_noise_std = f.value("force_noise_std", c.noise.force_noise_std);
                if (!f.contains("rng_seed"))
                    throw ConfigError("noise.rng_seed must be explicit");
                c.noise.rng_seed = f.at("rng_seed").get<std::uint64_t>();
            } else {
                throw ConfigError("plant.noise with an explicit rng_seed is required");
            }
            if (p.contains("damage")) {
                const auto& f = p.at("damage");
                c.damage.intact = f.value("intact", true);
                if (!c.damage.intact) {
                    const double fraction = f.value("area_loss_fraction", 0.442);
                    c.damage = plant::apply_damage(c.fin, fraction);
                    if (f.contains("cp_lateral_offset"))
                        c.damage.cp_lateral_offset = f.at("cp_lateral_offset").get<double>();
                }
            }
        } else {
            throw ConfigError("plant section is required");
        }
        if (!j.contains("optimizer") || !j.at("optimizer").contains("seed"))
            throw ConfigError("optimizer.seed must be explicit");
        const auto& o = j.at("optimizer");
        c.optimizer_seed = o.at("seed").get<std::uint64_t>();
        c.lambda = o.value("lambda", 0);
        c.sigma0 = o.value("sigma0", 0.3);
        c.generation_cap = o.value("generation_cap", 300);
        if (j.contains("initialization")) {
            if (j.at("initialization").is_string()) {
                const std::string name = j.at("initialization").get<std::string>();
                if (name == "thrust") {
                    c.initialization = kinematics::thrust_initialization();
                } else if (name == "side_force") {
                    c.initialization = kinematics::side_force_initialization();
                } else {
                    throw ConfigError("unknown initialization preset: " + name);
                }
            } else {
                const auto v = j.at("initialization").get<std::vector<double>>();
                if (v.size() != kinematics::kNumParams)
                    throw ConfigError("initialization must have 9 entries");
                std::array<double, kinematics::kNumParams> a{};
                std::copy(v.begin(), v.end(), a.begin());
                c.initialization = kinematics::TrajectoryParams::from_array(a);
            }
        }
        if (j.contains("evaluation")) {
            const auto& e = j.at("evaluation");
            c.evaluation.n_runs = e.value("n_runs", c.evaluation.n_runs);
            c.evaluation.n_cycles = e.value("n_cycles", c.evaluation.n_cycles);
            c.evaluation.n_samples = e.value("n_samples", c.evaluation.n_samples);
        }
        if (c.evaluation.n_runs < 3) throw ConfigError("evaluation.n_runs must be >= 3");
        if (c.evaluation.n_cycles < 4) throw ConfigError("evaluation.n_cycles must be >= 4");
        if (c.evaluation.n_samples < 360)
            throw ConfigError("evaluation.n_samples must be >= 360");
        if (j.contains("schedule"))
            c.snapshot_every = j.at("schedule").value("snapshot_every", 1);
        if (c.snapshot_every < 1) throw ConfigError("snapshot_every must be >= 1");
        if (!kinematics::validate(c.initialization).pass)
            throw ConfigError("initialization violates parameter bounds");
        return c;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
}

// FNV-1a over the canonical (sorted-key) JSON dump.
inline std::string config_hash(const RunConfig& config) {
    const std::string dump = config.to_json().dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : dump) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

struct CandidateLog {
    std::array<double, kinematics::kNumParams> raw{};
    std::array<double, kinematics::kNumParams> params{};
    double fitness = 0.0;
    double closeness = 0.0;
    double efficiency = 0.0;
    double force = 0.0;
    double normal_force = 0.0;
    std::array<double, 3> mean_force{};
    double reynolds = 0.0;
    bool failed = false;  // degenerate evaluation, fitness was substituted
};

struct GenerationRecord {
    int generation = 0;
    std::vector<CandidateLog> candidates;
    std::array<double, kinematics::kNumParams> spread{};  // physical units
    std::array<bool, kinematics::kNumParams> converged{};
    bool overall_converged = false;
    std::size_t best_index = 0;
    double median_fitness = 0.0;
    // retained traces of the best candidate, on the 360-point phi grid
    std::array<std::vector<double>, 4> best_force_trace;
    std::vector<double> best_aoa_trace;
};

inline json to_json(const GenerationRecord& r) {
    json j;
    j["generation"] = r.generation;
    j["spread"] = r.spread;
    j["converged"] = r.converged;
    j["overall_converged"] = r.overall_converged;
    j["best_index"] = r.best_index;
    j["median_fitness"] = r.median_fitness;
    json cands = json::array();
    for (const auto& c : r.candidates) {
        cands.push_back({{"raw", c.raw},
                         {"params", c.params},
                         {"fitness", c.fitness},
                         {"closeness", c.closeness},
                         {"efficiency", c.efficiency},
                         {"force", c.force},
                         {"normal_force", c.normal_force},
                         {"mean_force", c.mean_force},
                         {"reynolds", c.reynolds},
                         {"failed", c.failed}});
    }
    j["candidates"] = cands;
    j["best_force_trace"] = r.best_force_trace;
    j["best_aoa_trace"] = r.best_aoa_trace;
    return j;
}

inline GenerationRecord generation_from_json(const json& j) {
    GenerationRecord r;
    r.generation = j.at("generation").get<int>();
    r.spread = j.at("spread").get<std::array<double, kinematics::kNumParams>>();
    r.converged = j.at("converged").get<std::array<bool, kinematics::kNumParams>>();
    r.overall_converged = j.at("overall_converged").get<bool>();
    r.best_index = j.at("best_index").get<std::size_t>();
    r.median_fitness = j.at("median_fitness").get<double>();
    for (const auto& cj : j.at("candidates")) {
        CandidateLog c;
        c.raw = cj.at("raw").get<std::array<double, kinematics::kNumParams>>();
        c.params = cj.at("params").get<std::array<double, kinematics::kNumParams>>();
        c.fitness = cj.at("fitness").get<double>();
        c.closeness = cj.at("closeness").get<double>();
        c.efficiency = cj.at("efficiency").get<double>();
        c.force = cj.at("force").get<double>();
        c.normal_force = cj.at("normal_force").get<double>();
        c.mean_force = cj.at("mean_force").get<std::array<double, 3>>();
        c.reynolds = cj.at("reynolds").get<double>();
        c.failed = cj.at("failed").get<bool>();
        r.candidates.push_back(c);
    }
    r.best_force_trace =
        j.at("best_force_trace").get<std::array<std::vector<double>, 4>>();
    r.best_aoa_trace = j.at("best_aoa_trace").get<std::vector<double>>();
    return r;
}

struct RunLog {
    std::string run_id;
    std::string hash;
    std::string parent;  // empty unless this is a branch
    int branch_at = -1;  // parent generation the branch resumed from
    std::vector<GenerationRecord> generations;
    std::string termination;  // "converged" or "cap", empty while running
};

namespace fsys = std::filesystem;

struct RunPaths {
    fsys::path dir;
    fsys::path config() const { return dir / "config.json"; }
    fsys::path log() const { return dir / "log.jsonl"; }
    fsys::path result() const { return dir / "result.json"; }
    fsys::path snapshots() const { return dir / "snapshots"; }
    fsys::path snapshot(int generation) const {
        std::ostringstream os;
        os << "gen_" << std::setw(6) << std::setfill('0') << generation << ".json";
        return snapshots() / os.str();
    }
};

inline json read_json_file(const fsys::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    json j;
    in >> j;
    return j;
}

inline void write_json_file(const fsys::path& path, const json& j) {
    std::ofstream out(path);
    out << j.dump(2) << "\n";
}

inline RunLog read_log(const RunPaths& paths) {
    std::ifstream in(paths.log());
    if (!in) throw Error("cannot open " + paths.log().string());
    RunLog log;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const json j = json::parse(line);
        if (!have_header) {
            if (j.value("schema", std::string()) != kLogSchemaId ||
                j.value("version", -1) != kLogSchemaVersion)
                throw SchemaMismatch("unrecognized run log schema");
            log.run_id = j.value("run_id", std::string());
            log.hash = j.value("config_hash", std::string());
            log.parent = j.value("parent", std::string());
            log.branch_at = j.value("branch_at", -1);
            have_header = true;
        } else {
            log.generations.push_back(generation_from_json(j));
        }
    }
    if (fsys::exists(paths.result())) {
        const json r = read_json_file(paths.result());
        log.termination = r.value("termination", std::string());
    }
    return log;
}

// One optimization run: init (or resume / restore), then
// ask -> evaluate x lambda -> fitness -> tell -> converged? until
// convergence or the generation cap.
class Runner {
public:
    Runner(RunConfig config, fsys::path out_root)
        : config_(std::move(config)), paths_{fsys::path(out_root) / config_.run_id} {}

    const RunPaths& paths() const { return paths_; }

    // Fresh run, resuming from the newest snapshot if the directory already
    // holds one (crash-resume contract).
    RunLog run() {
        prepare_directory();
        cmaes::CmaesState state = cmaes::CmaesState::init(
            config_.initialization, config_.optimizer_seed, config_.lambda,
            config_.sigma0);
        RunLog log = resume_or_start(state);
        return loop(state, std::move(log));
    }

    // Branch continuation from a restored optimizer state.
    RunLog run_from_state(cmaes::CmaesState state, const std::string& parent,
                          int branch_at) {
        prepare_directory();
        RunLog log;
        log.run_id = config_.run_id;
        log.hash = config_hash(config_);
        log.parent = parent;
        log.branch_at = branch_at;
        write_header(log);
        write_json_file(paths_.snapshot(state.generation()), state.snapshot());
        return loop(state, std::move(log));
    }

private:
    void prepare_directory() {
        fsys::create_directories(paths_.snapshots());
        write_json_file(paths_.config(), config_.to_json());
    }

    void write_header(const RunLog& log) {
        std::ofstream out(paths_.log(), std::ios::trunc);
        json h = {{"schema", kLogSchemaId},
                  {"version", kLogSchemaVersion},
                  {"run_id", log.run_id},
                  {"config_hash", log.hash}};
        if (!log.parent.empty()) {
            h["parent"] = log.parent;
            h["branch_at"] = log.branch_at;
        }
        out << h.dump() << "\n";
        for (const auto& g : log.generations) out << to_json(g).dump() << "\n";
    }

    RunLog resume_or_start(cmaes::CmaesState& state) {
        RunLog log;
        log.run_id = config_.run_id;
        log.hash = config_hash(config_);
        int resume_gen = -1;
        if (fsys::exists(paths_.snapshots())) {
            for (const auto& entry : fsys::directory_iterator(paths_.snapshots())) {
                const std::string name = entry.path().stem().string();
                if (name.rfind("gen_", 0) == 0)
                    resume_gen = std::max(resume_gen, std::stoi(name.substr(4)));
            }
        }
        if (resume_gen >= 0 && fsys::exists(paths_.log())) {
            state = cmaes::CmaesState::restore(
                read_json_file(paths_.snapshot(resume_gen)));
            RunLog old = read_log(paths_);
            for (auto& g : old.generations)
                if (g.generation < resume_gen) log.generations.push_back(std::move(g));
        }
        write_header(log);
        if (resume_gen < 0)
            write_json_file(paths_.snapshot(0), state.snapshot());
        return log;
    }

    RunLog loop(cmaes::CmaesState& state, RunLog log) {
        std::ofstream out(paths_.log(), std::ios::app);
        std::string termination = "cap";
        while (state.generation() < config_.generation_cap) {
            const int gen = state.generation();
            const auto candidates = state.ask();
            GenerationRecord record;
            record.generation = gen;
            std::vector<double> fitnesses;
            std::vector<std::optional<plant::CycleRecord>> records(candidates.size());
            double worst_finite = 0.0;
            bool any_ok = false;
            for (std::size_t k = 0; k < candidates.size(); ++k) {
                CandidateLog cl;
                cl.params = candidates[k].projected.to_array();
                for (int i = 0; i < cmaes::kDim; ++i)
                    cl.raw[static_cast<std::size_t>(i)] = candidates[k].raw(i);
                try {
                    const std::uint64_t eval_seed =
                        mix_seed(static_cast<std::uint64_t>(gen),
                                 static_cast<std::uint64_t>(k));
                    plant::CycleRecord rec = plant::evaluate(
                        candidates[k].projected, config_.evaluation, config_.fin,
                        config_.fluid, config_.damage, config_.noise, eval_seed);
                    const auto fv = fitness::fitness(rec, config_.objective);
                    cl.fitness = fv.f;
                    cl.closeness = fv.closeness_term;
                    cl.efficiency = fv.efficiency_term;
                    cl.force = fv.force_used;
                    cl.normal_force = fv.normal_force_used;
                    cl.mean_force = rec.mean_force;
                    cl.reynolds = rec.reynolds;
                    records[k] = std::move(rec);
                    worst_finite = any_ok ? std::max(worst_finite, fv.f) : fv.f;
                    any_ok = true;
                } catch (const DegenerateTrajectory&) {
                    cl.failed = true;
                } catch (const DegenerateForce&) {
                    cl.failed = true;
                }
                record.candidates.push_back(std::move(cl));
            }
            if (!any_ok)
                throw AllCandidatesFailed("generation " + std::to_string(gen) +
                                          ": every candidate failed");
            for (auto& cl : record.candidates) {
                if (cl.failed) cl.fitness = worst_finite;
                fitnesses.push_back(cl.fitness);
            }

            state.tell(fitnesses);

            record.best_index = cmaes::select_optimum(fitnesses);
            std::vector<double> sorted = fitnesses;
            std::sort(sorted.begin(), sorted.end());
            record.median_fitness =
                sorted.size() % 2 == 1
                    ? sorted[sorted.size() / 2]
                    : 0.5 * (sorted[sorted.size() / 2 - 1] + sorted[sorted.size() / 2]);
            if (records[record.best_index]) {
                record.best_force_trace = records[record.best_index]->force_trace;
                record.best_aoa_trace = records[record.best_index]->aoa_trace;
            }
            const auto conv = state.converged();
            record.converged = conv.per_parameter;
            record.overall_converged = conv.overall;
            record.spread = state.physical_spread();

            out << to_json(record).dump() << "\n";
            out.flush();
            log.generations.push_back(std::move(record));

            if (state.generation() % config_.snapshot_every == 0 || conv.overall ||
                state.generation() >= config_.generation_cap)
                write_json_file(paths_.snapshot(state.generation()), state.snapshot());

            if (conv.overall) {
                termination = "converged";
                break;
            }
        }
        log.termination = termination;
        const auto& final_gen = log.generations.back();
        json result = {{"termination", termination},
                       {"final_generation", final_gen.generation},
                       {"optimum",
                        {{"candidate_index", final_gen.best_index},
                         {"params", final_gen.candidates[final_gen.best_index].params},
                         {"fitness", final_gen.candidates[final_gen.best_index].fitness},
                         {"closeness", final_gen.candidates[final_gen.best_index].closeness},
                         {"force", final_gen.candidates[final_gen.best_index].force}}}};
        write_json_file(paths_.result(), result);
        return log;
    }

    RunConfig config_;
    RunPaths paths_;
};

inline RunLog run(const RunConfig& config, const fsys::path& out_root) {
    return Runner(config, out_root).run();
}

// Restores the parent snapshot at `at_generation` once per branch, swaps in
// the new damage state and a branch-specific evaluation seed, and resumes.
// Branches never touch parent artifacts.
inline std::vector<RunLog> branch(const fsys::path& parent_dir, int at_generation,
                                  const plant::DamageState& new_damage,
                                  const std::vector<std::uint64_t>& seeds,
                                  const fsys::path& out_root) {
    const RunPaths parent_paths{parent_dir};
    if (!fsys::exists(parent_paths.snapshot(at_generation)))
        throw MissingSnapshot("no snapshot at generation " +
                              std::to_string(at_generation) + " in " +
                              parent_dir.string());
    const RunConfig parent_config =
        RunConfig::from_json(read_json_file(parent_paths.config()));
    const json snapshot = read_json_file(parent_paths.snapshot(at_generation));

    std::vector<RunLog> logs;
    for (std::size_t b = 0; b < seeds.size(); ++b) {
        RunConfig cfg = parent_config;
        cfg.run_id = parent_config.run_id + "-branch" + std::to_string(b + 1);
        cfg.damage = new_damage;
        cfg.noise.rng_seed = seeds[b];
        Runner runner(cfg, out_root);
        logs.push_back(runner.run_from_state(cmaes::CmaesState::restore(snapshot),
                                             parent_config.run_id, at_generation));
    }
    return logs;
}

// --- CSV report bundle ------------------------------------------------------

inline std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        out += c;
        if (c == '"') out += '"';
    }
    out += '"';
    return out;
}

inline std::string fmt(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

struct LoadedRun {
    RunConfig config;
    RunLog log;
    cmaes::Matrix final_covariance;
};

inline LoadedRun load_run(const fsys::path& run_dir) {
    const RunPaths paths{run_dir};
    LoadedRun r;
    r.config = RunConfig::from_json(read_json_file(paths.config()));
    r.log = read_log(paths);
    if (r.log.generations.empty()) throw Error("empty run log: " + run_dir.string());
    const int final_state_gen = r.log.generations.back().generation + 1;
    fsys::path snap = paths.snapshot(final_state_gen);
    if (!fsys::exists(snap)) snap = paths.snapshot(r.log.generations.back().generation);
    if (!fsys::exists(snap))
        throw MissingSnapshot("no final snapshot for " + run_dir.string());
    r.final_covariance = cmaes::CmaesState::restore(read_json_file(snap)).covariance();
    return r;
}

inline const CandidateLog& optimum_of(const RunLog& log) {
    const auto& g = log.generations.back();
    return g.candidates[g.best_index];
}

// Writes the report bundle: per-run optimization paths, the converged-optimum
// table, Fourier spectra of the optimum traces, PCA sensitivity, and (when
// more than one run is given) the adaptation classification of every later
// run against the first.
inline void report(const std::vector<fsys::path>& run_dirs, const fsys::path& out_dir) {
    if (run_dirs.empty()) throw Error("report: no runs given");
    fsys::create_directories(out_dir);
    std::vector<LoadedRun> runs;
    for (const auto& d : run_dirs) runs.push_back(load_run(d));

    {
        std::ofstream out(out_dir / "paths.csv");
        out << "run,generation,candidate,fitness,median_fitness,force,"
               "stroke_angle,frequency\n";
        for (const auto& r : runs)
            for (const auto& g : r.log.generations)
                for (std::size_t k = 0; k < g.candidates.size(); ++k) {
                    const auto& c = g.candidates[k];
                    out << csv_escape(r.log.run_id) << ',' << g.generation << ','
                        << k << ',' << fmt(c.fitness) << ',' << fmt(g.median_fitness)
                        << ',' << fmt(c.force) << ',' << fmt(c.params[0]) << ','
                        << fmt(c.params[8]) << "\n";
                }
    }
    {
        std::ofstream out(out_dir / "optimum.csv");
        out << "run";
        for (const auto& b : kinematics::param_bounds()) out << ',' << b.name;
        out << ",closeness,fitness,force,reynolds\n";
        for (const auto& r : runs) {
            const auto& c = optimum_of(r.log);
            out << csv_escape(r.log.run_id);
            for (double v : c.params) out << ',' << fmt(v);
            // signed closeness as in the converged-optima table: (F_target-|F|)/F_target
            const double signed_closeness =
                (r.config.objective.f_target - std::abs(c.force)) /
                r.config.objective.f_target;
            out << ',' << fmt(signed_closeness) << ',' << fmt(c.fitness) << ','
                << fmt(c.force) << ',' << fmt(c.reynolds) << "\n";
        }
    }
    {
        std::ofstream out(out_dir / "fourier.csv");
        out << "run,signal,mode,amplitude,phase_deg\n";
        for (const auto& r : runs) {
            const auto& g = r.log.generations.back();
            if (g.best_aoa_trace.empty()) continue;
            std::vector<std::pair<std::string, std::vector<double>>> signals;
            if (r.config.objective.mode == fitness::ObjectiveMode::Thrust) {
                signals.emplace_back("Fz", g.best_force_trace[2]);
            } else {
                // side-force spectra are reported in the resultant frame
                plant::CycleRecord rec;
                rec.mean_force = optimum_of(r.log).mean_force;
                rec.force_trace = g.best_force_trace;
                rec.aoa_trace = g.best_aoa_trace;
                const auto rotated = analysis::rotate_to_resultant({rec});
                signals.emplace_back("Fx*", rotated[0].record.force_trace[0]);
                signals.emplace_back("Fy*", rotated[0].record.force_trace[1]);
            }
            signals.emplace_back("AOA", g.best_aoa_trace);
            for (const auto& [name, trace] : signals) {
                const auto spectrum = analysis::fourier(trace, 5);
                for (const auto& m : spectrum.modes)
                    out << csv_escape(r.log.run_id) << ',' << name << ',' << m.k
                        << ',' << fmt(m.amplitude) << ',' << fmt(m.phase_deg) << "\n";
            }
        }
    }
    {
        std::ofstream out(out_dir / "sensitivity.csv");
        out << "run,kind,index,name,value\n";
        for (const auto& r : runs) {
            const auto rep = analysis::sensitivity(r.final_covariance);
            for (std::size_t i = 0; i < rep.scree.size(); ++i)
                out << csv_escape(r.log.run_id) << ",scree," << (i + 1) << ",,"
                    << fmt(rep.scree[i]) << "\n";
            const auto& bounds = kinematics::param_bounds();
            for (std::size_t i = 0; i < rep.normalized_radii.size(); ++i)
                out << csv_escape(r.log.run_id) << ",normalized_radius," << (i + 1)
                    << ',' << bounds[i].name << ',' << fmt(rep.normalized_radii[i])
                    << "\n";
        }
    }
    if (runs.size() > 1) {
        std::ofstream out(out_dir / "classification.csv");
        out << "run";
        for (const auto& b : kinematics::param_bounds()) out << ',' << b.name;
        out << "\n";
        const auto intact = kinematics::TrajectoryParams::from_array(
            optimum_of(runs.front().log).params);
        for (std::size_t r = 1; r < runs.size(); ++r) {
            const auto adapted = kinematics::TrajectoryParams::from_array(
                optimum_of(runs[r].log).params);
            const auto cls = analysis::classify_adaptation(intact, adapted);
            out << csv_escape(runs[r].log.run_id);
            for (const auto a : cls) out << ',' << analysis::to_string(a);
            out << "\n";
        }
    }
}

}  // namespace finopt::harness
