#include "baq/protocols.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>

#include "baq/rng.hpp"
#include "baq/util.hpp"

namespace baq {
namespace {

constexpr double kPi = 3.1415926535897932384626433832795;

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = a ^ (b * 0x9e3779b97f4a7c15ULL);
    return splitmix64(s);
}

double splitter_theta(int d, int l) { return 2.0 * std::asin(std::sqrt(1.0 / (d - l + 1))); }

// compiler index -> encoding slot: hub to the star center, leaves to the
// remaining slots in ascending order.
std::vector<int> compiler_slots(const Encoding& enc) {
    const int d = enc.d();
    std::vector<int> slots;
    slots.reserve(d);
    slots.push_back(enc.star_center);
    for (int s = 0; s < d; ++s)
        if (s != enc.star_center) slots.push_back(s);
    return slots;
}

Encoding truncate_encoding(const Encoding& enc, int d) {
    if (d < 2 || d > enc.d())
        throw ConfigError("contrast scan: dimension " + std::to_string(d) +
                          " outside the encoding's range 2.." + std::to_string(enc.d()));
    if (enc.star_center >= d)
        throw ConfigError("contrast scan: truncation would drop the star center");
    Encoding out;
    out.states.assign(enc.states.begin(), enc.states.begin() + d);
    out.star_center = enc.star_center;
    for (const Encoding::Edge& e : enc.edges)
        if (e.a < d && e.b < d) out.edges.push_back(e);
    for (int s : enc.readout_order)
        if (s < d) out.readout_order.push_back(s);
    return out;
}

}  // namespace

std::vector<GivensStep> ramsey_forward_steps(int d) {
    if (d < 2) throw ConfigError("ramsey sequence needs d >= 2");
    std::vector<GivensStep> steps;
    steps.reserve(d - 1);
    for (int l = 1; l <= d - 1; ++l) steps.push_back({l, splitter_theta(d, l), -0.5 * kPi});
    return steps;
}

std::vector<GivensStep> ramsey_reverse_steps(int d, double phi) {
    if (d < 2) throw ConfigError("ramsey sequence needs d >= 2");
    std::vector<GivensStep> steps;
    steps.reserve(d - 1);
    for (int l = d - 1; l >= 1; --l)
        steps.push_back({l, splitter_theta(d, l), 0.5 * kPi + l * phi});
    return steps;
}

PulseSequence make_ramsey_sequence(const Encoding& enc, double phi,
                                   const RamseySequenceOptions& opts) {
    if (enc.star_center != 0)
        throw ConfigError("ramsey sequence expects the hub at logical index 0");
    const int d = enc.d();
    PulseSequence seq;
    seq.enc = enc;
    seq.initial_state = 0;
    seq.ideal_rotations = opts.ideal_pulses;
    for (const GivensStep& g : ramsey_forward_steps(d))
        seq.push_rotation(0, g.leaf, g.theta, g.phi, opts.gap_us);
    if (opts.wait_us > 0.0) seq.push_wait(opts.wait_us);
    for (const GivensStep& g : ramsey_reverse_steps(d, phi))
        seq.push_rotation(0, g.leaf, g.theta, g.phi, opts.gap_us);
    return seq;
}

double ramsey_ideal_p0(int d, double phi) {
    double acc = 0.0;
    for (int m = 1; m <= d - 1; ++m) acc += (d - m) * std::cos(m * phi);
    return 1.0 / d + 2.0 / (static_cast<double>(d) * d) * acc;
}

double ramsey_ideal_population(int d, int level, double phi) {
    if (level < 0 || level >= d)
        throw ConfigError("ramsey population: level outside 0..d-1");
    if (level == 0) return ramsey_ideal_p0(d, phi);
    if (level == d - 1) return 1.0 / d - std::cos((d - 1) * phi) / d;
    const int l = level;
    double s1 = 0.0;
    for (int m = l + 1; m <= d - 1; ++m) s1 += std::cos(m * phi);
    double s2 = 0.0;
    for (int m = 1; m <= d - 1 - l; ++m) s2 += (m + 1.0) / (d - l) * std::cos(m * phi);
    return 1.0 / d + 2.0 / (d * static_cast<double>(d - l + 1) * (d - l)) * s1 -
           2.0 / (d * static_cast<double>(d - l + 1)) * (std::cos(l * phi) + s2);
}

std::vector<double> ramsey_ideal_populations(int d, double phi) {
    std::vector<double> p(d);
    for (int l = 0; l < d; ++l) p[l] = ramsey_ideal_population(d, l, phi);
    return p;
}

double ramsey_detuned_p0(int d, double phi, const std::vector<double>& delta_rad_us,
                         double t_us) {
    if (static_cast<int>(delta_rad_us.size()) != d)
        throw ConfigError("ramsey detuned p0: delta list must have one entry per level");
    // Every level pair contributes one cosine; the hub's detuning is the
    // phase reference (entry 0 ignored). A level sitting above its nominal
    // energy turns as e^{-i delta t}, which retards the pair phase.
    double acc = 0.0;
    for (int l = 0; l <= d - 2; ++l) {
        const double dl = (l == 0) ? 0.0 : delta_rad_us[l];
        for (int m = l + 1; m <= d - 1; ++m)
            acc += std::cos((m - l) * phi + (dl - delta_rad_us[m]) * t_us);
    }
    return 1.0 / d + 2.0 / (static_cast<double>(d) * d) * acc;
}

double ramsey_reference_phase(int d) {
    if (d < 2) throw ConfigError("reference phase needs d >= 2");
    return (d % 2 == 0) ? kPi : kPi * (d - 1) / d;
}

double ramsey_ideal_contrast(int d) {
    return ramsey_ideal_p0(d, 0.0) - ramsey_ideal_p0(d, ramsey_reference_phase(d));
}

std::vector<ContrastPoint> contrast_scan(const Encoding& enc, const NoiseParams& noise,
                                         const std::vector<int>& dims,
                                         const ContrastScanOptions& opts) {
    std::vector<ContrastPoint> out;
    out.reserve(dims.size());
    for (int d : dims) {
        const Encoding sub = truncate_encoding(enc, d);
        RamseySequenceOptions seq_opts;
        seq_opts.wait_us = opts.wait_us;
        seq_opts.ideal_pulses = opts.ideal_pulses;

        ContrastPoint pt;
        pt.d = d;
        pt.ideal = ramsey_ideal_contrast(d);
        for (int point = 0; point < 2; ++point) {
            const double phi = (point == 0) ? 0.0 : ramsey_reference_phase(d);
            const PulseSequence seq = make_ramsey_sequence(sub, phi, seq_opts);
            MonteCarloOptions mc;
            mc.shots = static_cast<std::size_t>(opts.shots);
            mc.seed = mix_seed(opts.seed, 2 * static_cast<std::uint64_t>(d) + point);
            mc.threads = opts.threads;
            mc.binomial_sampling = true;
            const MonteCarloResult r = monte_carlo(seq, noise, mc);
            if (point == 0) {
                pt.p0_peak = r.mean_population[0];
                pt.peak_lo = r.wilson_lo[0];
                pt.peak_hi = r.wilson_hi[0];
            } else {
                pt.p0_ref = r.mean_population[0];
                pt.ref_lo = r.wilson_lo[0];
                pt.ref_hi = r.wilson_hi[0];
            }
        }
        pt.contrast = pt.p0_peak - pt.p0_ref;
        out.push_back(pt);
    }
    return out;
}

std::vector<double> bv_oracle_phases(int n, std::uint64_t secret) {
    const int d = 1 << n;
    if (secret >= static_cast<std::uint64_t>(d))
        throw ConfigError("bv oracle: secret out of range");
    std::vector<double> phases(d, 0.0);
    for (int x = 0; x < d; ++x)
        if (std::popcount(static_cast<std::uint64_t>(x) & secret) & 1) phases[x] = kPi;
    return phases;
}

BvResult bernstein_vazirani(const Encoding& enc, const NoiseParams& noise, int n,
                            std::uint64_t secret, const BvOptions& opts) {
    const NamedCircuit nc = build_named_circuit("bv", n, secret, opts.fast_superposition,
                                                opts.compile_opts);
    if (enc.d() != nc.d)
        throw ConfigError("bv: encoding has " + std::to_string(enc.d()) +
                          " levels but the circuit needs " + std::to_string(nc.d));
    PulseSequence seq = circuit_to_sequence(enc, nc.items, opts.ideal_pulses);
    const std::vector<int> slots = compiler_slots(enc);
    seq.initial_state = slots[0];

    BvResult res;
    res.n = n;
    res.secret = secret;
    res.pulse_count = nc.report.final_steps;
    std::vector<double> pop_by_slot(nc.d, 0.0);
    if (opts.shots == 0) {
        const VectorXc psi = run_sequence(seq, NoiseParams::quiet(), NoiseRealization{});
        for (int s = 0; s < nc.d; ++s) pop_by_slot[s] = std::norm(psi[s]);
    } else {
        MonteCarloOptions mc;
        mc.shots = static_cast<std::size_t>(opts.shots);
        mc.seed = opts.seed;
        mc.threads = opts.threads;
        mc.binomial_sampling = true;
        pop_by_slot = monte_carlo(seq, noise, mc).mean_population;
    }
    res.populations.resize(nc.d);
    // hub carries computational label 0, so compiler index = label here
    for (int x = 0; x < nc.d; ++x) res.populations[x] = pop_by_slot[slots[x]];
    res.success = res.populations[secret];
    return res;
}

CccnotResult cccnot_truth_table(const Encoding& enc, const NoiseParams& noise,
                                const CccnotOptions& opts) {
    const NamedCircuit nc = build_named_circuit("cccnot");
    if (enc.d() != nc.d)
        throw ConfigError("cccnot: encoding must supply 16 levels");
    const std::vector<int> perm = hub_relabeling(nc.d, nc.hub_logical);
    const std::vector<int> slots = compiler_slots(enc);

    CccnotResult res;
    res.success.resize(nc.d, 0.0);
    res.pulse_count = nc.report.final_steps;
    for (int x = 0; x < nc.d; ++x) {
        const int y = (x == 14) ? 15 : (x == 15) ? 14 : x;  // controlled flip
        PulseSequence seq = circuit_to_sequence(enc, nc.items, opts.ideal_pulses);
        seq.initial_state = slots[perm[x]];
        const int out_slot = slots[perm[y]];
        if (opts.shots == 0) {
            const VectorXc psi = run_sequence(seq, NoiseParams::quiet(), NoiseRealization{});
            res.success[x] = std::norm(psi[out_slot]);
        } else {
            MonteCarloOptions mc;
            mc.shots = static_cast<std::size_t>(opts.shots);
            mc.seed = mix_seed(opts.seed, static_cast<std::uint64_t>(x));
            mc.threads = opts.threads;
            mc.binomial_sampling = true;
            res.success[x] = monte_carlo(seq, noise, mc).mean_population[out_slot];
        }
    }
    res.mean_success = mean(res.success);
    return res;
}

PulseSequence circuit_to_sequence(const Encoding& enc, const std::vector<CircuitItem>& items,
                                  bool ideal_pulses, double gap_us) {
    const int d = enc.d();
    const std::vector<int> slots = compiler_slots(enc);
    PulseSequence seq;
    seq.enc = enc;
    seq.initial_state = slots[0];
    seq.ideal_rotations = ideal_pulses;
    for (const CircuitItem& item : items) {
        if (const GivensStep* g = std::get_if<GivensStep>(&item)) {
            if (g->leaf <= 0 || g->leaf >= d)
                throw ConfigError("circuit_to_sequence: leaf index out of range");
            seq.push_rotation(slots[0], slots[g->leaf], g->theta, g->phi, gap_us);
        } else {
            const PhaseLayer& layer = std::get<PhaseLayer>(item);
            if (static_cast<int>(layer.phases.size()) != d)
                throw ConfigError("circuit_to_sequence: phase layer size mismatch");
            std::vector<double> by_slot(d, 0.0);
            for (int k = 0; k < d; ++k) by_slot[slots[k]] = layer.phases[k];
            seq.push_virtual_z(std::move(by_slot));
        }
    }
    return seq;
}

std::vector<int> hub_relabeling(int d, int hub_logical) {
    if (hub_logical < 0 || hub_logical >= d)
        throw ConfigError("hub_relabeling: hub label outside 0..d-1");
    std::vector<int> perm(d);
    for (int k = 0; k < d; ++k) perm[k] = k;
    std::swap(perm[0], perm[hub_logical]);
    return perm;
}

}  // namespace baq
