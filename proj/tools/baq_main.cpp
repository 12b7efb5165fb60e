// Command-line front end: wires config files into the library modules and
// writes deterministic CSV/JSON outputs plus a manifest of hashes per run.
// Exit codes: 0 ok, 2 config error, 3 numerical failure, 4 infeasible request.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "baq/atomic.hpp"
#include "baq/calib.hpp"
#include "baq/compiler.hpp"
#include "baq/config.hpp"
#include "baq/noise.hpp"
#include "baq/protocols.hpp"
#include "baq/rng.hpp"
#include "baq/select.hpp"
#include "baq/sim.hpp"
#include "baq/spam.hpp"
#include "baq/util.hpp"

using baq::ConfigError;
using baq::format12;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "1.0.0";
constexpr double kPi = 3.141592653589793238462643383279502884;

// All JSON numbers pass through the same 12-significant-digit rendering as
// the CSV cells, so reruns byte-match regardless of accumulated low bits.
double r12(double x) { return std::stod(format12(x)); }

struct OutDir {
    std::filesystem::path dir;
    std::vector<std::pair<std::string, std::string>> hashes;

    explicit OutDir(const std::string& path) : dir(path) {
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec) throw ConfigError("cannot create output directory " + path);
    }
    void write(const std::string& name, const std::string& content) {
        std::ofstream f(dir / name, std::ios::binary);
        if (!f) throw ConfigError("cannot write " + (dir / name).string());
        f << content;
        f.close();
        hashes.emplace_back(name, baq::sha256_hex(content));
        std::cout << "wrote " << (dir / name).string() << "\n";
    }
};

std::vector<std::string> g_argv;

void write_manifest(OutDir& out, const std::string& sub, std::uint64_t seed,
                    const json& config) {
    json m;
    m["tool"] = "baq";
    m["version"] = kVersion;
    m["subcommand"] = sub;
    m["command"] = g_argv;
    m["seed"] = seed;
    m["config"] = config;
    json outs = json::object();
    for (const auto& [name, hash] : out.hashes) outs[name] = hash;
    m["outputs"] = outs;
    std::ofstream f(out.dir / "manifest.json", std::ios::binary);
    if (!f) throw ConfigError("cannot write manifest in " + out.dir.string());
    f << m.dump(2) << "\n";
    std::cout << "wrote " << (out.dir / "manifest.json").string() << "\n";
}

// ---- config loading -------------------------------------------------------

std::string resolve(const std::string& flag, const std::string& name) {
    return flag.empty() ? baq::default_config_path(name) : flag;
}

struct Loaded {
    baq::AtomicConstants constants;
    baq::NoiseParams noise;
    baq::StrengthConfig strengths;
    json snapshot = json::object();
};

json constants_json(const baq::AtomicConstants& c, const std::string& path) {
    json j;
    j["path"] = path;
    j["sha256"] = baq::sha256_file_hex(path);
    j["s12.A_MHz"] = r12(c.s12.A_MHz);
    j["s12.gJ"] = r12(c.s12.gJ);
    j["d52.A_MHz"] = r12(c.d52.A_MHz);
    j["d52.B_MHz"] = r12(c.d52.B_MHz);
    j["d52.C_MHz"] = r12(c.d52.C_MHz);
    j["d52.gJ"] = r12(c.d52.gJ);
    j["gI"] = r12(c.gI);
    j["muB_MHz_per_G"] = r12(c.muB_MHz_per_G);
    j["field_G"] = r12(c.field_G);
    j["freq_offset_MHz"] = r12(c.freq_offset_MHz);
    j["d52.lifetime_s"] = r12(c.d52_lifetime_s);
    j["trap.nu_MHz"] = {r12(c.nu_x_MHz), r12(c.nu_y_MHz), r12(c.nu_z_MHz)};
    j["trap.lamb_dicke"] = r12(c.lamb_dicke);
    j["trap.nbar"] = r12(c.nbar);
    return j;
}

json noise_json(const baq::NoiseParams& p, const std::string& path) {
    json j;
    j["path"] = path;
    j["sha256"] = baq::sha256_file_hex(path);
    j["b.enable"] = p.enable_B;
    j["b.fwhm_G"] = r12(p.fwhm_B_G);
    j["laser.enable"] = p.enable_laser;
    j["laser.gauss_fwhm_Hz"] = r12(p.voigt_G_fwhm_Hz);
    j["laser.cauchy_fwhm_Hz"] = r12(p.voigt_L_fwhm_Hz);
    j["clock.enable"] = p.enable_clock;
    j["clock.fwhm_Hz"] = r12(p.fwhm_f_Hz);
    j["pulse_cal.enable"] = p.enable_pulse_cal;
    j["pulse_cal.fwhm"] = r12(p.fwhm_tau_cal);
    j["pulse_drift.enable"] = p.enable_pulse_drift;
    j["pulse_drift.fwhm"] = r12(p.fwhm_tau_drift);
    j["line.enable"] = p.enable_line;
    j["line.A60_G"] = r12(p.line.A60_G);
    j["line.A180_G"] = r12(p.line.A180_G);
    return j;
}

json strengths_json(const baq::StrengthConfig& s, const std::string& path) {
    json j;
    j["path"] = path;
    j["sha256"] = baq::sha256_file_hex(path);
    json w = json::array(), ref = json::array(), ovr = json::array();
    for (int q = 0; q < 5; ++q) {
        w.push_back(r12(s.w_q[static_cast<std::size_t>(q)]));
        ref.push_back(r12(s.ref_pi_time_us[static_cast<std::size_t>(q)]));
        ovr.push_back(s.ref_override[static_cast<std::size_t>(q)]);
    }
    j["w_q"] = w;
    j["ref_pi_time_us"] = ref;
    j["ref_override"] = ovr;
    return j;
}

Loaded load_configs(const std::string& constants_flag, const std::string& noise_flag,
                    const std::string& strengths_flag) {
    Loaded L;
    const std::string cp = resolve(constants_flag, "constants_ba137.conf");
    L.constants = baq::AtomicConstants::from_file(cp);
    L.snapshot["constants"] = constants_json(L.constants, cp);
    const std::string np = resolve(noise_flag, "noise_table1.conf");
    L.noise = baq::NoiseParams::from_file(np);
    L.snapshot["noise"] = noise_json(L.noise, np);
    const std::string sp = resolve(strengths_flag, "strengths_default.conf");
    L.strengths = baq::strength_config_from_file(baq::KeyValueFile::parse_file(sp));
    L.snapshot["strengths"] = strengths_json(L.strengths, sp);
    return L;
}

// ---- encoding / circuit JSON schemas ---------------------------------------

json encoding_to_json(const baq::Encoding& enc) {
    json j;
    j["d"] = enc.d();
    j["star_center"] = enc.star_center;
    json states = json::array();
    for (const baq::Level& lv : enc.states) {
        json s;
        s["manifold"] = std::string(1, lv.manifold);
        s["F"] = lv.F;
        s["m"] = lv.m;
        s["id"] = lv.id;
        states.push_back(s);
    }
    j["states"] = states;
    json edges = json::array();
    for (const baq::Encoding::Edge& e : enc.edges) {
        json je;
        je["a"] = e.a;
        je["b"] = e.b;
        je["freq_MHz"] = r12(e.freq_MHz);
        je["sens_MHz_per_G"] = r12(e.sens_MHz_per_G);
        je["pi_time_us"] = r12(e.pi_time_us);
        je["transition_id"] = e.transition_id;
        edges.push_back(je);
    }
    j["edges"] = edges;
    j["readout_order"] = enc.readout_order;
    return j;
}

json load_json_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open " + path);
    json j;
    try {
        f >> j;
    } catch (const std::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return j;
}

baq::Encoding encoding_from_json(const json& j, const baq::LevelTable& levels) {
    try {
        baq::Encoding enc;
        enc.star_center = j.at("star_center").get<int>();
        for (const json& s : j.at("states")) {
            const std::string manifold = s.at("manifold").get<std::string>();
            if (manifold != "S" && manifold != "D")
                throw ConfigError("encoding state manifold must be S or D");
            enc.states.push_back(
                levels.find(manifold[0], s.at("F").get<int>(), s.at("m").get<int>()));
        }
        for (const json& e : j.at("edges")) {
            baq::Encoding::Edge edge;
            edge.a = e.at("a").get<int>();
            edge.b = e.at("b").get<int>();
            edge.freq_MHz = e.at("freq_MHz").get<double>();
            edge.sens_MHz_per_G = e.at("sens_MHz_per_G").get<double>();
            edge.pi_time_us = e.at("pi_time_us").get<double>();
            edge.transition_id = e.at("transition_id").get<std::string>();
            enc.edges.push_back(std::move(edge));
        }
        if (j.contains("readout_order"))
            enc.readout_order = j.at("readout_order").get<std::vector<int>>();
        return enc;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("encoding file: ") + e.what());
    }
}

json items_to_json(const std::vector<baq::CircuitItem>& items) {
    json arr = json::array();
    for (const baq::CircuitItem& item : items) {
        json j;
        if (std::holds_alternative<baq::GivensStep>(item)) {
            const auto& g = std::get<baq::GivensStep>(item);
            j["type"] = "pulse";
            j["leaf"] = g.leaf;
            j["theta"] = r12(g.theta);
            j["phi"] = r12(g.phi);
        } else {
            const auto& p = std::get<baq::PhaseLayer>(item);
            j["type"] = "vz";
            json phases = json::array();
            for (double ph : p.phases) phases.push_back(r12(ph));
            j["phases"] = phases;
        }
        arr.push_back(j);
    }
    return arr;
}

std::vector<baq::CircuitItem> items_from_json(const json& arr) {
    std::vector<baq::CircuitItem> items;
    try {
        for (const json& j : arr) {
            const std::string type = j.at("type").get<std::string>();
            if (type == "pulse") {
                baq::GivensStep g;
                g.leaf = j.at("leaf").get<int>();
                g.theta = j.at("theta").get<double>();
                g.phi = j.at("phi").get<double>();
                items.emplace_back(g);
            } else if (type == "vz") {
                baq::PhaseLayer p;
                p.phases = j.at("phases").get<std::vector<double>>();
                items.emplace_back(p);
            } else {
                throw ConfigError("circuit item type must be pulse or vz");
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("circuit file: ") + e.what());
    }
    return items;
}

// Compiler coordinates put the hub at 0; physically it sits at star_center
// with the leaves occupying the remaining slots in ascending order.
std::vector<int> compiler_slots(const baq::Encoding& enc) {
    std::vector<int> slots;
    slots.push_back(enc.star_center);
    for (int k = 0; k < enc.d(); ++k)
        if (k != enc.star_center) slots.push_back(k);
    return slots;
}

baq::Encoding auto_encoding(int d, const Loaded& L, const baq::LevelTable& levels,
                            int threads) {
    const baq::PairGraph g = baq::build_pair_graph(levels, L.constants, L.strengths);
    baq::SearchOptions so;
    so.threads = threads;
    baq::StateSet set = baq::search_star_sets(std::min(d, 17), g, L.noise, so);
    if (d > 17) set = baq::extend_set_greedy(set, d, g, L.noise);
    return baq::encoding_from_state_set(set, levels, L.constants, g, L.strengths);
}

baq::Encoding encoding_for(const std::string& enc_path, int d, const Loaded& L,
                           const baq::LevelTable& levels, int threads) {
    if (enc_path.empty()) return auto_encoding(d, L, levels, threads);
    const baq::Encoding enc = encoding_from_json(load_json_file(enc_path), levels);
    if (enc.d() < d)
        throw ConfigError("encoding file holds " + std::to_string(enc.d()) +
                          " states, need " + std::to_string(d));
    return enc;
}

// ---- subcommands ------------------------------------------------------------

struct CommonFlags {
    std::string out = "out";
    std::string constants, noise, strengths;
    std::uint64_t seed = 1;
    int threads = 1;
};

void add_common(CLI::App* sub, CommonFlags& f, bool with_seed = true) {
    sub->add_option("--out", f.out, "output directory");
    sub->add_option("--constants", f.constants, "structure constants config");
    sub->add_option("--noise", f.noise, "noise widths config");
    sub->add_option("--strengths", f.strengths, "transition strength config");
    if (with_seed) sub->add_option("--seed", f.seed, "master RNG seed");
    sub->add_option("--threads", f.threads, "worker threads")->check(CLI::PositiveNumber);
}

void run_levels(const CommonFlags& f, double B) {
    Loaded L = load_configs(f.constants, f.noise, f.strengths);
    const double field = std::isnan(B) ? L.constants.field_G : B;
    const baq::LevelTable t = baq::solve_structure(L.constants, field);
    std::ostringstream csv;
    csv << "manifold,F,m,E_MHz,dEdB_MHz_per_G,id\n";
    auto emit = [&](const baq::Level& lv) {
        csv << lv.manifold << "," << lv.F << "," << lv.m << "," << format12(lv.E_MHz) << ","
            << format12(lv.dEdB_MHz_per_G) << "," << lv.id << "\n";
    };
    for (const baq::Level& lv : t.s12) emit(lv);
    for (const baq::Level& lv : t.d52) emit(lv);
    OutDir out(f.out);
    out.write("levels.csv", csv.str());
    L.snapshot["field_G"] = r12(field);
    write_manifest(out, "levels", 0, L.snapshot);
}

void run_transitions(const CommonFlags& f, double B, bool sidebands) {
    Loaded L = load_configs(f.constants, f.noise, f.strengths);
    const double field = std::isnan(B) ? L.constants.field_G : B;
    const baq::LevelTable t = baq::solve_structure(L.constants, field);
    std::vector<baq::Transition> table = baq::transition_table(t, L.constants, L.strengths);
    if (sidebands) table = baq::augment_sidebands(table, L.constants);
    std::ostringstream csv;
    csv << "lower,upper,delta_m,freq_MHz,sens_MHz_per_G,rel_strength,pi_time_us,"
           "is_sideband,sideband_shift_MHz\n";
    for (const baq::Transition& tr : table) {
        const std::size_t cut = tr.id.find('>');
        csv << tr.id.substr(0, cut) << "," << tr.id.substr(cut + 1) << "," << tr.dm << ","
            << format12(tr.freq_MHz) << "," << format12(tr.sens_MHz_per_G) << ","
            << format12(tr.rel_strength) << "," << format12(tr.pi_time_us) << ","
            << (tr.is_sideband ? 1 : 0) << "," << format12(tr.sideband_shift_MHz) << "\n";
    }
    OutDir out(f.out);
    out.write("transitions.csv", csv.str());
    L.snapshot["field_G"] = r12(field);
    L.snapshot["sidebands"] = sidebands;
    write_manifest(out, "transitions", 0, L.snapshot);
}

void run_calibrate(const CommonFlags& f, std::size_t cycles, baq::TripletConfig tc) {
    Loaded L = load_configs(f.constants, f.noise, f.strengths);
    const std::vector<double> resid = baq::triplet_residuals_Hz(tc, L.noise, cycles, f.seed);
    std::ostringstream csv;
    csv << "cycle,residual_Hz\n";
    for (std::size_t i = 0; i < resid.size(); ++i)
        csv << i << "," << format12(resid[i]) << "\n";
    json summary;
    summary["cycles"] = cycles;
    summary["shots_per_point"] = tc.shots_per_point;
    summary["tau_us"] = r12(tc.ramsey.tau_us);
    summary["T2star_us"] = r12(tc.ramsey.T2star_us);
    summary["residual_sigma_Hz"] = r12(baq::sample_stddev(resid));
    summary["single_point_sigma_Hz"] = r12(baq::detuning_sigma_Hz(
        0.5, tc.shots_per_point, tc.ramsey.tau_us, tc.ramsey.T2star_us));
    OutDir out(f.out);
    out.write("calibration.csv", csv.str());
    out.write("calibration.json", summary.dump(2) + "\n");
    write_manifest(out, "calibrate-sim", f.seed, L.snapshot);
}

void run_noise(const CommonFlags& f, std::size_t samples, bool emit_samples) {
    Loaded L = load_configs(f.constants, f.noise, f.strengths);
    std::vector<double> dB, dL, df, dcal, ddrift;
    dB.reserve(samples);
    for (std::size_t s = 0; s < samples; ++s) {
        const baq::NoiseRealization r = baq::sample_shot(L.noise, f.seed, s);
        dB.push_back(r.dB_G);
        dL.push_back(r.dL_Hz);
        df.push_back(r.df_Hz);
        dcal.push_back(r.dtau_cal);
        ddrift.push_back(r.dtau_drift);
    }
    auto fwhm_gauss = [](const std::vector<double>& xs) {
        return baq::kFwhmToSigma * baq::sample_stddev(xs);
    };
    json stats;
    stats["samples"] = samples;
    stats["b"] = {{"fwhm_G", r12(L.noise.fwhm_B_G)}, {"empirical_fwhm_G", r12(fwhm_gauss(dB))}};
    stats["clock"] = {{"fwhm_Hz", r12(L.noise.fwhm_f_Hz)},
                      {"empirical_fwhm_Hz", r12(fwhm_gauss(df))}};
    stats["pulse_cal"] = {{"fwhm", r12(L.noise.fwhm_tau_cal)},
                          {"empirical_fwhm", r12(fwhm_gauss(dcal))}};
    stats["pulse_drift"] = {{"fwhm", r12(L.noise.fwhm_tau_drift)},
                            {"empirical_fwhm", r12(fwhm_gauss(ddrift))}};
    stats["laser"] = {{"gauss_fwhm_Hz", r12(L.noise.voigt_G_fwhm_Hz)},
                      {"cauchy_fwhm_Hz", r12(L.noise.voigt_L_fwhm_Hz)},
                      {"empirical_iqr_Hz", r12(baq::iqr(dL))},
                      {"kielkopf_fwhm_Hz", r12(baq::voigt_fwhm_kielkopf(
                                               L.noise.voigt_G_fwhm_Hz,
                                               L.noise.voigt_L_fwhm_Hz))}};
    stats["line"] = {{"value_at_t0_G", r12(L.noise.line.value(0.0))},
                     {"integral_1s_Gs", r12(L.noise.line.integral(1.0))}};
    OutDir out(f.out);
    if (emit_samples) {
        std::ostringstream csv;
        csv << "shot,dB_G,dL_Hz,df_Hz,dtau_cal,dtau_drift\n";
        for (std::size_t s = 0; s < samples; ++s)
            csv << s << "," << format12(dB[s]) << "," << format12(dL[s]) << ","
                << format12(df[s]) << "," << format12(dcal[s]) << "," << format12(ddrift[s])
                << "\n";
        out.write("noise_samples.csv", csv.str());
    }
    out.write("noise_stats.json", stats.dump(2) + "\n");
    write_manifest(out, "noise", f.seed, L.snapshot);
}

void run_compile(const CommonFlags& f, const std::string& target, int n,
                 std::uint64_t secret, bool fast, double epsilon, int d,
                 const std::string& unitary_path) {
    baq::OptimizeOptions oo;
    oo.seed = f.seed;
    baq::NamedCircuit nc;
    if (target == "hadamard2" || target == "hadamard3") {
        nc = baq::build_named_circuit(target == "hadamard2" ? "H2" : "H3", 0, 0, true, oo);
    } else if (target == "superposition") {
        nc = baq::build_named_circuit("superposition", d, 0, true, oo);
    } else if (target == "bv") {
        nc = baq::build_named_circuit("bv", n, secret, fast, oo);
    } else if (target == "cccnot") {
        nc = baq::build_named_circuit("cccnot", 0, 0, true, oo);
    } else if (target == "random" || target == "file") {
        Eigen::MatrixXcd U;
        if (target == "random") {
            std::mt19937_64 rng(f.seed);
            std::normal_distribution<double> gauss;
            Eigen::MatrixXcd G(d, d);
            for (int r = 0; r < d; ++r)
                for (int c2 = 0; c2 < d; ++c2) {
                    const double re = gauss(rng), im = gauss(rng);
                    G(r, c2) = baq::Cx(re, im);
                }
            Eigen::HouseholderQR<Eigen::MatrixXcd> qr(G);
            U = qr.householderQ();
            const Eigen::MatrixXcd R =
                qr.matrixQR().triangularView<Eigen::Upper>();
            for (int c2 = 0; c2 < d; ++c2) {
                const baq::Cx rd = R(c2, c2);
                U.col(c2) *= rd / std::abs(rd);
            }
        } else {
            if (unitary_path.empty()) throw ConfigError("--target file needs --unitary");
            std::ifstream uf(unitary_path);
            if (!uf) throw ConfigError("cannot open " + unitary_path);
            std::vector<std::vector<double>> rows;
            std::string lineb;
            while (std::getline(uf, lineb)) {
                if (lineb.empty() || lineb[0] == '#') continue;
                std::vector<double> vals;
                std::stringstream ss(lineb);
                std::string cell;
                while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
                rows.push_back(std::move(vals));
            }
            const int dd = static_cast<int>(rows.size());
            if (dd < 2) throw ConfigError("unitary file needs at least 2 rows");
            U.resize(dd, dd);
            for (int r = 0; r < dd; ++r) {
                if (static_cast<int>(rows[static_cast<std::size_t>(r)].size()) != 2 * dd)
                    throw ConfigError("unitary rows need 2*d cells (re,im pairs)");
                for (int c2 = 0; c2 < dd; ++c2)
                    U(r, c2) = baq::Cx(rows[static_cast<std::size_t>(r)][2 * c2],
                                       rows[static_cast<std::size_t>(r)][2 * c2 + 1]);
            }
        }
        const baq::CompiledCircuit cc = baq::compile_unitary(U, epsilon, oo);
        nc.d = static_cast<int>(U.rows());
        nc.items.emplace_back(baq::PhaseLayer{cc.vz_phases});
        for (const baq::GivensStep& g : cc.steps) nc.items.emplace_back(g);
        nc.description = target == "random" ? "random unitary" : ("unitary from " + unitary_path);
        nc.report = cc.report;
    } else {
        throw ConfigError("unknown compile target " + target);
    }

    json circuit;
    circuit["target"] = target;
    circuit["d"] = nc.d;
    circuit["hub_logical"] = nc.hub_logical;
    circuit["description"] = nc.description;
    circuit["initial"] = 0;
    circuit["items"] = items_to_json(nc.items);
    json report;
    report["target"] = target;
    report["d"] = nc.d;
    report["epsilon"] = r12(epsilon);
    report["algorithm_steps"] = nc.report.algorithm_steps;
    report["fused_steps"] = nc.report.fused_steps;
    report["final_steps"] = nc.report.final_steps;
    report["cost"] = r12(nc.report.cost);
    std::size_t pulses = 0;
    for (const baq::CircuitItem& it : nc.items)
        if (std::holds_alternative<baq::GivensStep>(it)) ++pulses;
    report["pulse_count"] = pulses;
    OutDir out(f.out);
    out.write("circuit.json", circuit.dump(2) + "\n");
    out.write("report.json", report.dump(2) + "\n");
    json cfg;
    cfg["epsilon"] = r12(epsilon);
    write_manifest(out, "compile", f.seed, cfg);
}

void run_simulate(const CommonFlags& f, const std::string& enc_path,
                  const std::string& circuit_path, std::size_t shots, bool ideal,
                  double gap_us, bool binomial) {
    Loaded L = load_configs(f.constants, f.noise, f.strengths);
    const baq::LevelTable levels = baq::solve_structure(L.constants, L.constants.field_G);
    const baq::Encoding enc = encoding_from_json(load_json_file(enc_path), levels);
    const json cj = load_json_file(circuit_path);
    int cd = 0, hub_logical = 0, initial = 0;
    std::vector<baq::CircuitItem> items;
    try {
        cd = cj.at("d").get<int>();
        hub_logical = cj.value("hub_logical", 0);
        initial = cj.value("initial", 0);
        items = items_from_json(cj.at("items"));
    } catch (const json::exception& e) {
        throw ConfigError(std::string("circuit file: ") + e.what());
    }
    if (cd != enc.d())
        throw ConfigError("circuit dimension " + std::to_string(cd) +
                          " does not match encoding d=" + std::to_string(enc.d()));
    baq::PulseSequence seq = baq::circuit_to_sequence(enc, items, ideal, gap_us);
    const std::vector<int> slots = compiler_slots(enc);
    const std::vector<int> perm = baq::hub_relabeling(cd, hub_logical);
    if (initial < 0 || initial >= cd) throw ConfigError("initial state outside 0..d-1");
    seq.initial_state = slots[static_cast<std::size_t>(perm[static_cast<std::size_t>(initial)])];

    std::vector<double> pop(static_cast<std::size_t>(cd), 0.0), lo(pop), hi(pop);
    if (shots == 0) {
        const baq::VectorXc psi =
            baq::run_sequence(seq, baq::NoiseParams::quiet(), baq::NoiseRealization{});
        for (int x = 0; x < cd; ++x) {
            const int s = slots[static_cast<std::size_t>(perm[static_cast<std::size_t>(x)])];
            pop[static_cast<std::size_t>(x)] = std::norm(psi[s]);
            lo[static_cast<std::size_t>(x)] = hi[static_cast<std::size_t>(x)] =
                pop[static_cast<std::size_t>(x)];
        }
    } else {
        baq::MonteCarloOptions mo;
        mo.shots = shots;
        mo.seed = f.seed;
        mo.threads = f.threads;
        mo.binomial_sampling = binomial;
        const baq::MonteCarloResult mc = baq::monte_carlo(seq, L.noise, mo);
        for (int x = 0; x < cd; ++x) {
            const std::size_t s = static_cast<std::size_t>(
                slots[static_cast<std::size_t>(perm[static_cast<std::size_t>(x)])]);
            pop[static_cast<std::size_t>(x)] = mc.mean_population[s];
            lo[static_cast<std::size_t>(x)] = mc.wilson_lo[s];
            hi[static_cast<std::size_t>(x)] = mc.wilson_hi[s];
        }
    }
    std::ostringstream csv;
    csv << "label,population,wilson_lo,wilson_hi\n";
    for (int x = 0; x < cd; ++x)
        csv << x << "," << format12(pop[static_cast<std::size_t>(x)]) << ","
            << format12(lo[static_cast<std::size_t>(x)]) << ","
            << format12(hi[static_cast<std::size_t>(x)]) << "\n";
    json run;
    run["shots"] = shots;
    run["end_us"] = r12(seq.end_us());
    run["items"] = items.size();
    OutDir out(f.out);
    out.write("populations.csv", csv.str());
    out.write("run.json", run.dump(2) + "\n");
    write_manifest(out, "simulate", f.seed, L.snapshot);
}

void run_ramsey(const CommonFlags& f, int d, int points, bool scan, int d_min, int d_max,
                int shots, const std::string& enc_path, double wait_us, bool ideal) {
    Loaded L = load_configs(f.constants, f.noise, f.strengths);
    OutDir out(f.out);
    if (!scan) {
        std::ostringstream csv;
        csv << "phi";
        for (int k = 0; k < d; ++k) csv << ",p" << k;
        csv << "\n";
        for (int i = 0; i < points; ++i) {
            const double phi = 2.0 * kPi * i / points;
            csv << format12(phi);
            const std::vector<double> pops = baq::ramsey_ideal_populations(d, phi);
            for (double p : pops) csv << "," << format12(p);
            csv << "\n";
        }
        out.write("ramsey_ideal.csv", csv.str());
        json cfg = L.snapshot;
        cfg["d"] = d;
        write_manifest(out, "ramsey", 0, cfg);
        return;
    }
    const baq::LevelTable levels = baq::solve_structure(L.constants, L.constants.field_G);
    const baq::Encoding enc = encoding_for(enc_path, d_max, L, levels, f.threads);
    std::vector<int> dims;
    for (int dd = d_min; dd <= d_max; ++dd) dims.push_back(dd);
    baq::ContrastScanOptions co;
    co.shots = shots;
    co.seed = f.seed;
    co.threads = f.threads;
    co.wait_us = wait_us;
    co.ideal_pulses = ideal;
    const std::vector<baq::ContrastPoint> pts = baq::contrast_scan(enc, L.noise, dims, co);
    std::ostringstream csv;
    csv << "d,p0_peak,peak_lo,peak_hi,p0_ref,ref_lo,ref_hi,contrast,ideal\n";
    std::vector<double> xs, ys;
    for (const baq::ContrastPoint& p : pts) {
        csv << p.d << "," << format12(p.p0_peak) << "," << format12(p.peak_lo) << ","
            << format12(p.peak_hi) << "," << format12(p.p0_ref) << "," << format12(p.ref_lo)
            << "," << format12(p.ref_hi) << "," << format12(p.contrast) << ","
            << format12(p.ideal) << "\n";
        xs.push_back(p.d);
        ys.push_back(p.contrast);
    }
    const baq::SpearmanResult sr = baq::spearman(xs, ys);
    json summary;
    summary["d_min"] = d_min;
    summary["d_max"] = d_max;
    summary["shots"] = shots;
    summary["spearman_rho"] = r12(sr.rho);
    summary["spearman_p"] = r12(sr.p_value);
    out.write("contrast_scan.csv", csv.str());
    out.write("contrast_summary.json", summary.dump(2) + "\n");
    write_manifest(out, "ramsey", f.seed, L.snapshot);
}

void run_bv(const CommonFlags& f, int n, std::uint64_t secret, bool fast, std::size_t shots,
            const std::string& enc_path, bool ideal) {
    Loaded L = load_configs(f.constants, f.noise, f.strengths);
    const baq::LevelTable levels = baq::solve_structure(L.constants, L.constants.field_G);
    const baq::Encoding enc = encoding_for(enc_path, 1 << n, L, levels, f.threads);
    baq::BvOptions bo;
    bo.fast_superposition = fast;
    bo.shots = static_cast<int>(shots);
    bo.seed = f.seed;
    bo.threads = f.threads;
    bo.ideal_pulses = ideal;
    bo.compile_opts.seed = f.seed;
    const baq::BvResult res = baq::bernstein_vazirani(enc, L.noise, n, secret, bo);
    json j;
    j["n"] = res.n;
    j["secret"] = res.secret;
    j["fast"] = fast;
    j["shots"] = shots;
    j["success"] = r12(res.success);
    j["pulse_count"] = res.pulse_count;
    json pops = json::array();
    for (double p : res.populations) pops.push_back(r12(p));
    j["populations"] = pops;
    OutDir out(f.out);
    out.write("bv.json", j.dump(2) + "\n");
    write_manifest(out, "bv", f.seed, L.snapshot);
}

void run_cccnot(const CommonFlags& f, std::size_t shots, const std::string& enc_path,
                bool ideal) {
    Loaded L = load_configs(f.constants, f.noise, f.strengths);
    const baq::LevelTable levels = baq::solve_structure(L.constants, L.constants.field_G);
    const baq::Encoding enc = encoding_for(enc_path, 16, L, levels, f.threads);
    baq::CccnotOptions co;
    co.shots = static_cast<int>(shots);
    co.seed = f.seed;
    co.threads = f.threads;
    co.ideal_pulses = ideal;
    const baq::CccnotResult res = baq::cccnot_truth_table(enc, L.noise, co);
    json j;
    j["shots"] = shots;
    j["mean_success"] = r12(res.mean_success);
    j["pulse_count"] = res.pulse_count;
    json succ = json::array();
    for (double s : res.success) succ.push_back(r12(s));
    j["success"] = succ;
    OutDir out(f.out);
    out.write("cccnot.json", j.dump(2) + "\n");
    write_manifest(out, "cccnot", f.seed, L.snapshot);
}

baq::ReadoutPlan plan_for(const std::string& plan_path, const std::string& enc_path,
                          const Loaded& L, const baq::LevelTable& levels, double exposure_ms) {
    if (!plan_path.empty()) {
        const json pj = load_json_file(plan_path);
        baq::ReadoutPlan plan;
        plan.enc = encoding_from_json(pj, levels);
        try {
            plan.exposure_ms = pj.value("exposure_ms", exposure_ms);
            plan.order = pj.at("order").get<std::vector<int>>();
            plan.deshelve_us = pj.at("deshelve_us").get<std::vector<double>>();
        } catch (const json::exception& e) {
            throw ConfigError(std::string("plan file: ") + e.what());
        }
        plan.validate();
        return plan;
    }
    if (!enc_path.empty()) {
        const baq::Encoding enc = encoding_from_json(load_json_file(enc_path), levels);
        return baq::default_readout_plan(enc, exposure_ms);
    }
    const std::vector<baq::Transition> carriers =
        baq::transition_table(levels, L.constants, L.strengths);
    return baq::manifold_readout_plan(levels, carriers, exposure_ms);
}

void run_spam(const CommonFlags& f, int d, const std::string& plan_path,
              const std::string& enc_path, double exposure_ms, int mc_samples,
              double sigma_x_kHz, double sigma_y_kHz, double corr, bool heatmap, int grid,
              double span_kHz, double lambda_dark, double lambda_bright, int threshold) {
    Loaded L = load_configs(f.constants, f.noise, f.strengths);
    const baq::LevelTable levels = baq::solve_structure(L.constants, L.constants.field_G);
    const baq::ReadoutPlan plan = plan_for(plan_path, enc_path, L, levels, exposure_ms);
    if (d <= 0) d = plan.d();

    baq::SpamParams sp;
    sp.lifetime_s = L.constants.d52_lifetime_s;
    sp.off_resonant.nu_x_MHz = L.constants.nu_x_MHz;
    sp.off_resonant.nu_y_MHz = L.constants.nu_y_MHz;
    sp.off_resonant.nu_z_MHz = L.constants.nu_z_MHz;
    sp.off_resonant.eta = L.constants.lamb_dicke;
    sp.off_resonant.nbar = L.constants.nbar;
    sp.off_resonant.sigma_nu_x_MHz = sigma_x_kHz * 1e-3;
    sp.off_resonant.sigma_nu_y_MHz = sigma_y_kHz * 1e-3;
    sp.off_resonant.correlation = corr;
    sp.off_resonant.mc_samples = mc_samples;
    sp.off_resonant.seed = f.seed;
    sp.lambda_dark = lambda_dark;
    sp.lambda_bright = lambda_bright;
    sp.threshold = threshold;

    OutDir out(f.out);
    if (heatmap) {
        std::ostringstream csv;
        csv << "nu_x_MHz,nu_y_MHz,off_resonant_avg\n";
        std::vector<std::pair<double, double>> cells;
        for (int ix = 0; ix < grid; ++ix)
            for (int iy = 0; iy < grid; ++iy) {
                const double fx = grid == 1 ? 0.0 : (2.0 * ix / (grid - 1) - 1.0);
                const double fy = grid == 1 ? 0.0 : (2.0 * iy / (grid - 1) - 1.0);
                cells.emplace_back(L.constants.nu_x_MHz + fx * span_kHz * 1e-3,
                                   L.constants.nu_y_MHz + fy * span_kHz * 1e-3);
            }
        std::vector<double> errs(cells.size(), 0.0);
        auto eval_cell = [&](std::size_t i) {
            baq::OffResonantParams op = sp.off_resonant;
            op.nu_x_MHz = cells[i].first;
            op.nu_y_MHz = cells[i].second;
            op.mc_samples = 1;
            return baq::off_resonant_error(levels, plan, L.strengths, op).average;
        };
        if (f.threads > 1) {
            std::vector<std::future<double>> futs;
            for (std::size_t i = 0; i < cells.size(); ++i)
                futs.push_back(std::async(std::launch::async, eval_cell, i));
            for (std::size_t i = 0; i < cells.size(); ++i) errs[i] = futs[i].get();
        } else {
            for (std::size_t i = 0; i < cells.size(); ++i) errs[i] = eval_cell(i);
        }
        for (std::size_t i = 0; i < cells.size(); ++i)
            csv << format12(cells[i].first) << "," << format12(cells[i].second) << ","
                << format12(errs[i]) << "\n";
        out.write("heatmap.csv", csv.str());
        write_manifest(out, "spam", f.seed, L.snapshot);
        return;
    }

    const baq::SpamBudget budget = baq::spam_budget(d, levels, plan, L.strengths, sp);
    std::ostringstream csv;
    csv << "state,label,decay,off_resonant,discrimination,total\n";
    for (int k = 0; k < d; ++k) {
        const std::size_t sk = static_cast<std::size_t>(k);
        const double disc = budget.per_state_total[sk] - budget.decay.per_state[sk] -
                            budget.off_resonant.per_state[sk];
        csv << k << "," << plan.enc.states[sk].id << ","
            << format12(budget.decay.per_state[sk]) << ","
            << format12(budget.off_resonant.per_state[sk]) << "," << format12(disc) << ","
            << format12(budget.per_state_total[sk]) << "\n";
    }
    json j;
    j["d"] = budget.d;
    j["decay_average"] = r12(budget.decay.average);
    j["off_resonant_average"] = r12(budget.off_resonant.average);
    j["discrimination_average"] = r12(budget.discrimination_average);
    j["per_check_false_positive"] = r12(budget.per_check.false_positive);
    j["per_check_false_negative"] = r12(budget.per_check.false_negative);
    j["explained_total"] = r12(budget.explained_total);
    out.write("spam.csv", csv.str());
    out.write("budget.json", j.dump(2) + "\n");
    write_manifest(out, "spam", f.seed, L.snapshot);
}

void run_select(const CommonFlags& f, int d, double min_strength, double max_sens,
                std::uint64_t budget) {
    Loaded L = load_configs(f.constants, f.noise, f.strengths);
    const baq::LevelTable levels = baq::solve_structure(L.constants, L.constants.field_G);
    baq::SelectionCutoffs cut;
    cut.min_rel_strength = min_strength;
    cut.max_sens_MHz_per_G = max_sens;
    const baq::PairGraph g = baq::build_pair_graph(levels, L.constants, L.strengths, cut);
    baq::SearchOptions so;
    so.node_budget = budget;
    so.threads = f.threads;
    baq::StateSet set = baq::search_star_sets(std::min(d, 17), g, L.noise, so);
    if (d > 17) set = baq::extend_set_greedy(set, d, g, L.noise);
    const baq::Encoding enc =
        baq::encoding_from_state_set(set, levels, L.constants, g, L.strengths);
    json sel;
    sel["d"] = d;
    sel["hub"] = set.ids.empty() ? "" : set.ids[0];
    sel["ids"] = set.ids;
    sel["tau_S_us"] = r12(set.tau_S_us);
    sel["cost"] = r12(set.cost);
    sel["proven_optimal"] = set.proven_optimal;
    OutDir out(f.out);
    out.write("encoding.json", encoding_to_json(enc).dump(2) + "\n");
    out.write("selection.json", sel.dump(2) + "\n");
    write_manifest(out, "select-states", 0, L.snapshot);
}

void run_scan_noise(const CommonFlags& f, const std::string& source, int d,
                    double target_loss, int shots, const std::string& enc_path, int iters,
                    double lo, double hi) {
    Loaded L = load_configs(f.constants, f.noise, f.strengths);
    const baq::LevelTable levels = baq::solve_structure(L.constants, L.constants.field_G);
    const baq::Encoding enc = encoding_for(enc_path, d, L, levels, f.threads);
    json evals = json::array();
    auto loss_at = [&](double scale) {
        baq::NoiseParams np = L.noise;
        np.scale_source(source, scale);
        baq::ContrastScanOptions co;
        co.shots = shots;
        co.seed = f.seed;
        co.threads = f.threads;
        const std::vector<baq::ContrastPoint> pts = baq::contrast_scan(enc, np, {d}, co);
        const double loss = 1.0 - pts[0].contrast;
        json e;
        e["scale"] = r12(scale);
        e["contrast"] = r12(pts[0].contrast);
        e["loss"] = r12(loss);
        evals.push_back(e);
        return loss;
    };
    double scale = lo;
    std::string status = "converged";
    double f_lo = loss_at(lo), f_hi = loss_at(hi);
    if (f_lo >= target_loss) {
        scale = lo;
        status = "at_lower_bound";
    } else if (f_hi <= target_loss) {
        scale = hi;
        status = "at_upper_bound";
    } else {
        double a = lo, b = hi;
        for (int i = 0; i < iters; ++i) {
            const double mid = std::sqrt(a * b);  // bisect in log space
            if (loss_at(mid) < target_loss)
                a = mid;
            else
                b = mid;
        }
        scale = std::sqrt(a * b);
    }
    json j;
    j["source"] = source;
    j["d"] = d;
    j["target_loss"] = r12(target_loss);
    j["shots"] = shots;
    j["scale"] = r12(scale);
    j["status"] = status;
    j["evaluations"] = evals;
    OutDir out(f.out);
    out.write("scan.json", j.dump(2) + "\n");
    write_manifest(out, "scan-noise-threshold", f.seed, L.snapshot);
}

int dispatch(int argc, char** argv) {
    CLI::App app{"25-level trapped-ion qudit toolkit"};
    app.require_subcommand(1);

    // levels
    CommonFlags lf;
    double lB = std::nan("");
    auto* levels_cmd = app.add_subcommand("levels", "solve the level structure, emit CSV");
    add_common(levels_cmd, lf, false);
    levels_cmd->add_option("--B", lB, "field in gauss (default: config)");
    levels_cmd->callback([&] { run_levels(lf, lB); });

    // transitions
    CommonFlags tf;
    double tB = std::nan("");
    bool t_sb = false;
    auto* trans_cmd = app.add_subcommand("transitions", "emit the quadrupole line table");
    add_common(trans_cmd, tf, false);
    trans_cmd->add_option("--B", tB, "field in gauss (default: config)");
    trans_cmd->add_flag("--sidebands", t_sb, "append first-order motional sidebands");
    trans_cmd->callback([&] { run_transitions(tf, tB, t_sb); });

    // calibrate-sim
    CommonFlags cf;
    std::size_t c_cycles = 200;
    baq::TripletConfig tc;
    auto* cal_cmd = app.add_subcommand("calibrate-sim", "triplet calibration statistics");
    add_common(cal_cmd, cf);
    cal_cmd->add_option("--cycles", c_cycles, "triplet cycles");
    cal_cmd->add_option("--shots", tc.shots_per_point, "shots per Ramsey point");
    cal_cmd->add_option("--tau-us", tc.ramsey.tau_us, "Ramsey wait (us)");
    cal_cmd->add_option("--T2star-us", tc.ramsey.T2star_us, "coherence time (us)");
    cal_cmd->add_option("--kappa-insens", tc.kappa_insensitive, "witness 1 sensitivity MHz/G");
    cal_cmd->add_option("--kappa-sens", tc.kappa_sensitive, "witness 2 sensitivity MHz/G");
    cal_cmd->add_option("--kappa-target", tc.kappa_target, "target sensitivity MHz/G");
    cal_cmd->callback([&] { run_calibrate(cf, c_cycles, tc); });

    // noise
    CommonFlags nf;
    std::size_t n_samples = 100000;
    bool n_emit = false;
    auto* noise_cmd = app.add_subcommand("noise", "sample the noise model, emit statistics");
    add_common(noise_cmd, nf);
    noise_cmd->add_option("--samples", n_samples, "realizations to draw");
    noise_cmd->add_flag("--emit-samples", n_emit, "also write the raw sample CSV");
    noise_cmd->callback([&] { run_noise(nf, n_samples, n_emit); });

    // compile
    CommonFlags pf;
    std::string p_target = "hadamard2", p_unitary;
    int p_n = 2, p_d = 4;
    std::uint64_t p_secret = 0;
    bool p_fast = true;
    double p_eps = 1e-3;
    auto* comp_cmd = app.add_subcommand("compile", "compile a target into hub-leaf pulses");
    comp_cmd->add_option("--out", pf.out, "output directory");
    comp_cmd->add_option("--seed", pf.seed, "optimizer restart seed");
    comp_cmd->add_option("--target", p_target,
                         "hadamard2|hadamard3|superposition|bv|cccnot|random|file");
    comp_cmd->add_option("--epsilon", p_eps, "pulse-elimination cost budget");
    comp_cmd->add_option("--d", p_d, "dimension (superposition/random)");
    comp_cmd->add_option("--n", p_n, "qubit count (bv)");
    comp_cmd->add_option("--secret", p_secret, "bv secret bitstring");
    comp_cmd->add_flag("--fast,!--no-fast", p_fast, "abbreviated bv first layer");
    comp_cmd->add_option("--unitary", p_unitary, "CSV of re,im pairs (--target file)");
    comp_cmd->callback(
        [&] { run_compile(pf, p_target, p_n, p_secret, p_fast, p_eps, p_d, p_unitary); });

    // simulate
    CommonFlags sf;
    std::string s_enc, s_circ;
    std::size_t s_shots = 1024;
    bool s_ideal = false, s_binom = false;
    double s_gap = 0.0;
    auto* sim_cmd = app.add_subcommand("simulate", "run a circuit file on an encoding");
    add_common(sim_cmd, sf);
    sim_cmd->add_option("--encoding", s_enc, "encoding JSON")->required();
    sim_cmd->add_option("--circuit", s_circ, "circuit JSON")->required();
    sim_cmd->add_option("--shots", s_shots, "Monte-Carlo shots (0 = noise-free)");
    sim_cmd->add_flag("--ideal-pulses", s_ideal, "zero-duration rotations");
    sim_cmd->add_flag("--binomial", s_binom, "resample outcomes binomially");
    sim_cmd->add_option("--gap-us", s_gap, "idle gap after each pulse");
    sim_cmd->callback([&] { run_simulate(sf, s_enc, s_circ, s_shots, s_ideal, s_gap, s_binom); });

    // ramsey
    CommonFlags rf;
    int r_d = 8, r_points = 96, r_dmin = 2, r_dmax = 17, r_shots = 256;
    bool r_scan = false, r_ideal = false;
    double r_wait = 0.0;
    std::string r_enc;
    auto* ram_cmd = app.add_subcommand("ramsey", "fringe analytics / contrast scan");
    add_common(ram_cmd, rf);
    ram_cmd->add_option("--d", r_d, "dimension (analytic mode)");
    ram_cmd->add_option("--points", r_points, "phase grid points");
    ram_cmd->add_flag("--scan", r_scan, "Monte-Carlo contrast over d range");
    ram_cmd->add_option("--d-min", r_dmin, "scan start");
    ram_cmd->add_option("--d-max", r_dmax, "scan end");
    ram_cmd->add_option("--shots", r_shots, "shots per scan point");
    ram_cmd->add_option("--encoding", r_enc, "encoding JSON (default: auto-select)");
    ram_cmd->add_option("--wait-us", r_wait, "free evolution between the passes");
    ram_cmd->add_flag("--ideal-pulses", r_ideal, "zero-duration rotations");
    ram_cmd->callback([&] {
        run_ramsey(rf, r_d, r_points, r_scan, r_dmin, r_dmax, r_shots, r_enc, r_wait, r_ideal);
    });

    // bv
    CommonFlags bf;
    int b_n = 3;
    std::uint64_t b_secret = 0b101;
    bool b_fast = true, b_ideal = false;
    std::size_t b_shots = 1024;
    std::string b_enc;
    auto* bv_cmd = app.add_subcommand("bv", "Bernstein-Vazirani on d=2^n");
    add_common(bv_cmd, bf);
    bv_cmd->add_option("--n", b_n, "qubit count")->check(CLI::Range(1, 4));
    bv_cmd->add_option("--secret", b_secret, "secret bitstring");
    bv_cmd->add_flag("--fast,!--no-fast", b_fast, "abbreviated first layer");
    bv_cmd->add_option("--shots", b_shots, "Monte-Carlo shots (0 = noise-free)");
    bv_cmd->add_option("--encoding", b_enc, "encoding JSON (default: auto-select)");
    bv_cmd->add_flag("--ideal-pulses", b_ideal, "zero-duration rotations");
    bv_cmd->callback([&] { run_bv(bf, b_n, b_secret, b_fast, b_shots, b_enc, b_ideal); });

    // cccnot
    CommonFlags kf;
    std::size_t k_shots = 1024;
    std::string k_enc;
    bool k_ideal = false;
    auto* ccc_cmd = app.add_subcommand("cccnot", "four-qubit-encoded CCCNOT truth table");
    add_common(ccc_cmd, kf);
    ccc_cmd->add_option("--shots", k_shots, "Monte-Carlo shots per input (0 = noise-free)");
    ccc_cmd->add_option("--encoding", k_enc, "encoding JSON (default: auto-select)");
    ccc_cmd->add_flag("--ideal-pulses", k_ideal, "zero-duration rotations");
    ccc_cmd->callback([&] { run_cccnot(kf, k_shots, k_enc, k_ideal); });

    // spam
    CommonFlags mf;
    int m_d = 0, m_mc = 1, m_grid = 7, m_thr = 9;
    double m_exp = 5.0, m_sx = 0.0, m_sy = 0.0, m_corr = 0.0, m_span = 10.0;
    double m_ld = 1.0, m_lb = 30.0;
    bool m_heat = false;
    std::string m_plan, m_enc;
    auto* spam_cmd = app.add_subcommand("spam", "readout error budget / secular heatmap");
    add_common(spam_cmd, mf);
    spam_cmd->add_option("--d", m_d, "budget dimension (default: full plan)");
    spam_cmd->add_option("--plan", m_plan, "readout plan JSON");
    spam_cmd->add_option("--encoding", m_enc, "encoding JSON (default plan order)");
    spam_cmd->add_option("--exposure-ms", m_exp, "fluorescence check exposure");
    spam_cmd->add_option("--mc-samples", m_mc, "secular-jitter Monte-Carlo samples");
    spam_cmd->add_option("--sigma-nu-x-kHz", m_sx, "x secular jitter (kHz)");
    spam_cmd->add_option("--sigma-nu-y-kHz", m_sy, "y secular jitter (kHz)");
    spam_cmd->add_option("--corr", m_corr, "x/y jitter correlation");
    spam_cmd->add_flag("--heatmap", m_heat, "emit the (nu_x, nu_y) error grid");
    spam_cmd->add_option("--grid", m_grid, "heatmap cells per axis");
    spam_cmd->add_option("--span-kHz", m_span, "heatmap half-span around nominal");
    spam_cmd->add_option("--lambda-dark", m_ld, "dark-count Poisson mean");
    spam_cmd->add_option("--lambda-bright", m_lb, "bright-count Poisson mean");
    spam_cmd->add_option("--threshold", m_thr, "bright/dark count threshold");
    spam_cmd->callback([&] {
        run_spam(mf, m_d, m_plan, m_enc, m_exp, m_mc, m_sx, m_sy, m_corr, m_heat, m_grid,
                 m_span, m_ld, m_lb, m_thr);
    });

    // select-states
    CommonFlags ef;
    int e_d = 8;
    double e_minstr = 0.02, e_maxsens = 6.0;
    std::uint64_t e_budget = 50'000'000;
    auto* sel_cmd = app.add_subcommand("select-states", "search the optimal encoding");
    add_common(sel_cmd, ef, false);
    sel_cmd->add_option("--d", e_d, "qudit dimension")->required();
    sel_cmd->add_option("--min-rel-strength", e_minstr, "drop weaker transitions");
    sel_cmd->add_option("--max-sens", e_maxsens, "drop more field-sensitive pairs (MHz/G)");
    sel_cmd->add_option("--budget", e_budget, "enumeration node budget");
    sel_cmd->callback([&] { run_select(ef, e_d, e_minstr, e_maxsens, e_budget); });

    // scan-noise-threshold
    CommonFlags zf;
    std::string z_source = "laser", z_enc;
    int z_d = 8, z_shots = 128, z_iters = 14;
    double z_target = 0.2, z_lo = 0.05, z_hi = 64.0;
    auto* scan_cmd =
        app.add_subcommand("scan-noise-threshold", "bisect a source scale to a contrast loss");
    add_common(scan_cmd, zf);
    scan_cmd->add_option("--source", z_source, "B|laser|clock|pulse_cal|pulse_drift|line")
        ->required();
    scan_cmd->add_option("--d", z_d, "qudit dimension");
    scan_cmd->add_option("--target-loss", z_target, "contrast loss to hit");
    scan_cmd->add_option("--shots", z_shots, "shots per evaluation");
    scan_cmd->add_option("--encoding", z_enc, "encoding JSON (default: auto-select)");
    scan_cmd->add_option("--iters", z_iters, "bisection iterations");
    scan_cmd->add_option("--lo", z_lo, "lower scale bound");
    scan_cmd->add_option("--hi", z_hi, "upper scale bound");
    scan_cmd->callback([&] {
        run_scan_noise(zf, z_source, z_d, z_target, z_shots, z_enc, z_iters, z_lo, z_hi);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    g_argv.assign(argv, argv + argc);
    try {
        return dispatch(argc, argv);
    } catch (const baq::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const baq::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const baq::InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 4;
    }
}
