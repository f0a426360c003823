#include "iontrap/atp/server.hpp"
#include "iontrap/bloch.hpp"
#include "iontrap/constants.hpp"
#include "iontrap/cooling.hpp"
#include "iontrap/csv.hpp"
#include "iontrap/lab/config.hpp"
#include "iontrap/micromotion.hpp"
#include "iontrap/motion.hpp"
#include "iontrap/pulse/compiler.hpp"
#include "iontrap/universe.hpp"
#include "iontrap/vm/box.hpp"
#include "iontrap/vm/channels.hpp"
#include "iontrap/vm/experiment.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <random>
#include <thread>

using namespace iontrap;
using constants::two_pi;

namespace {

struct GlobalOptions {
    std::string config_path;
    std::string out_path;
    std::uint64_t seed = 0; // 0: take the config seed
    int jobs = 1;
};

lab::LabConfig load_config(const GlobalOptions& g)
{
    lab::LabConfig cfg =
        g.config_path.empty() ? lab::LabConfig{} : lab::LabConfig::from_file(g.config_path);
    if (g.seed != 0)
        cfg.seed = g.seed;
    return cfg;
}

void write_table(const GlobalOptions& g, const csv::Table& table, const std::string& fallback)
{
    const std::string path = g.out_path.empty() ? fallback : g.out_path;
    csv::write_file(path, table);
    std::cout << "wrote " << path << "\n";
}

// deterministic per-point sampling that is independent of --jobs
double sample_binomial(double p, long reps, std::uint64_t seed)
{
    if (reps <= 0)
        return p;
    std::mt19937_64 rng(seed);
    std::binomial_distribution<long> dist(reps, std::clamp(p, 0.0, 1.0));
    return static_cast<double>(dist(rng)) / static_cast<double>(reps);
}

void parallel_fill(int jobs, long n, const std::function<void(long)>& work)
{
    if (jobs <= 1) {
        for (long i = 0; i < n; ++i)
            work(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<long> next{0};
    for (int t = 0; t < jobs; ++t)
        pool.emplace_back([&] {
            for (;;) {
                const long i = next.fetch_add(1);
                if (i >= n)
                    return;
                work(i);
            }
        });
    for (auto& th : pool)
        th.join();
}

// --- scan --------------------------------------------------------------------

struct ScanOptions {
    std::string kind = "frequency"; // or "duration"
    std::string geometry = "orthogonal";
    int order = 0;       // driven sideband order of a duration scan
    long points = 400;
    long reps = 500;
    double to_us = 140.0;     // duration scans: time axis end
    double span_mhz = 0.0;    // frequency scans: half span (0 = auto)
    double tau_us = 0.0;      // frequency scans: probe duration (0 = auto)
    bool sideband_cooled = false;
    double spread_khz = -1.0; // Rabi spread for co-propagating scans (<0 = config)
};

motion::MotionalDistribution scan_state(const lab::LabConfig& cfg, bool sideband_cooled)
{
    const double wz = cfg.axial_frequency();
    auto thermal = motion::thermal_distribution(cfg.doppler_temperature(), wz, 400).distribution;
    if (!sideband_cooled)
        return thermal;
    auto res = cooling::sideband_cool(thermal, cfg.cooling_schedule, cfg.lamb_dicke(),
                                      cfg.raman.base_rabi);
    res.final.probs /= res.final.probs.sum();
    return res.final;
}

int cmd_scan(const GlobalOptions& g, const ScanOptions& opt)
{
    if (opt.points < 2) {
        std::cerr << "scan needs at least two grid points\n";
        return 1;
    }
    if (opt.reps < 0) {
        std::cerr << "repetitions must be non-negative\n";
        return 1;
    }
    const lab::LabConfig cfg = load_config(g);
    const double wz = cfg.axial_frequency();
    const bool coprop = opt.geometry.rfind("co", 0) == 0;
    const double spread = opt.spread_khz < 0.0 ? cfg.raman.spread : two_pi * 1e3 * opt.spread_khz;

    motion::RamanConfig rcfg;
    rcfg.base_rabi = cfg.raman.base_rabi;
    rcfg.lamb_dicke = cfg.lamb_dicke();
    rcfg.raman_detuning = cfg.raman.detuning;
    rcfg.geometry = coprop ? motion::Geometry::copropagating : motion::Geometry::orthogonal;

    const auto dist = scan_state(cfg, opt.sideband_cooled);

    csv::Table table;
    table.header = {"x", "P_down"};
    table.rows.resize(static_cast<std::size_t>(opt.points));

    if (opt.kind == "duration") {
        table.comments.push_back("scan: duration [us] vs lower-state probability");
        Eigen::VectorXd p_true(opt.points);
        std::vector<double> ts(static_cast<std::size_t>(opt.points));
        for (long i = 0; i < opt.points; ++i)
            ts[static_cast<std::size_t>(i)] = opt.to_us * 1e-6 * (i + 1) / opt.points;
        parallel_fill(g.jobs, opt.points, [&](long i) {
            const double t = ts[static_cast<std::size_t>(i)];
            double p = 0.0;
            if (coprop && spread > 0.0) {
                p = motion::dephased_envelope(rcfg.base_rabi, spread, t);
            } else {
                Eigen::VectorXd tt(1);
                tt(0) = t;
                p = motion::flopping_curve(dist, rcfg, opt.order, 0.0, tt)(0);
            }
            p_true(i) = p;
            const double sampled = sample_binomial(p, opt.reps, cfg.seed + 7919 * i);
            table.rows[static_cast<std::size_t>(i)] = {t * 1e6, sampled};
        });

        // pi time from the first deep minimum of the sampled curve
        long first_min = 0;
        for (long i = 1; i + 1 < opt.points; ++i) {
            if (table.rows[i][1] <= table.rows[i - 1][1]
                && table.rows[i][1] < table.rows[i + 1][1] && table.rows[i][1] < 0.35) {
                first_min = i;
                break;
            }
        }
        if (first_min > 0)
            std::cout << "pi_time_us = " << table.rows[static_cast<std::size_t>(first_min)][0]
                      << "\n";

        if (coprop && spread > 0.0) {
            // Envelope amplitude from the oscillation variance in sliding
            // one-period windows; the binomial sampling variance is
            // subtracted so the node does not drown in shot noise.
            const double period = two_pi / rcfg.base_rabi;
            const double dt = ts[1] - ts[0];
            const long per_window = std::max<long>(4, std::lround(2.0 * period / dt));
            const double var_noise = opt.reps > 0 ? 0.25 / static_cast<double>(opt.reps) : 0.0;
            std::vector<double> env, env_centre;
            for (long w = 0; w + per_window <= opt.points; ++w) {
                double mean = 0.0;
                for (long i = w; i < w + per_window; ++i)
                    mean += table.rows[i][1];
                mean /= per_window;
                double var = 0.0;
                for (long i = w; i < w + per_window; ++i) {
                    const double d = table.rows[i][1] - mean;
                    var += d * d;
                }
                var /= per_window;
                env.push_back(2.0 * std::sqrt(2.0 * std::max(0.0, var - var_noise)));
                env_centre.push_back(table.rows[w + per_window / 2][0]);
            }
            // smooth and pick the minimum
            double best = 1e300;
            double node_us = 0.0;
            const long k = 2;
            for (long i = k; i + k < static_cast<long>(env.size()); ++i) {
                double v = 0.0;
                for (long j = i - k; j <= i + k; ++j)
                    v += env[static_cast<std::size_t>(j)];
                if (v < best) {
                    best = v;
                    node_us = env_centre[static_cast<std::size_t>(i)];
                }
            }
            std::cout << "envelope_node_us = " << node_us << "\n";
            table.comments.push_back("envelope_node_us = " + csv::format_number(node_us));
        }
    } else if (opt.kind == "frequency") {
        table.comments.push_back("scan: drive frequency offset [MHz] vs lower-state probability");
        const double carrier = cfg.zeeman.hyperfine_splitting;
        const double span = opt.span_mhz > 0.0 ? two_pi * 1e6 * opt.span_mhz : 1.25 * wz;
        const double coprop_pi = constants::pi / rcfg.base_rabi;
        const double tau = opt.tau_us > 0.0 ? opt.tau_us * 1e-6 : (coprop ? coprop_pi : 5.0 * coprop_pi);
        std::vector<double> offsets(static_cast<std::size_t>(opt.points));
        for (long i = 0; i < opt.points; ++i)
            offsets[static_cast<std::size_t>(i)] = -span + 2.0 * span * i / (opt.points - 1);
        const double scan_spread = opt.spread_khz < 0.0 ? 0.0 : two_pi * 1e3 * opt.spread_khz;
        parallel_fill(g.jobs, opt.points, [&](long i) {
            Eigen::VectorXd x(1);
            x(0) = carrier + offsets[static_cast<std::size_t>(i)];
            const double p = motion::frequency_scan(dist, rcfg, tau, x, wz, carrier, scan_spread)(0);
            const double sampled = sample_binomial(p, opt.reps, cfg.seed + 7919 * i);
            table.rows[static_cast<std::size_t>(i)] = {offsets[static_cast<std::size_t>(i)]
                                                           / (two_pi * 1e6),
                                                       sampled};
        });

        // dips near the red sideband, carrier, blue sideband
        auto dip_near = [&](double centre_mhz) {
            double best_x = 0.0, best_v = 2.0;
            for (const auto& row : table.rows) {
                if (std::abs(row[0] - centre_mhz) < 0.45 * wz / (two_pi * 1e6) && row[1] < best_v) {
                    best_v = row[1];
                    best_x = row[0];
                }
            }
            return std::pair<double, double>{best_x, 1.0 - best_v};
        };
        const double wz_mhz = wz / (two_pi * 1e6);
        const auto red = dip_near(-wz_mhz);
        const auto car = dip_near(0.0);
        const auto blue = dip_near(wz_mhz);
        std::cout << "red_dip_mhz = " << red.first << "  depth = " << red.second << "\n";
        std::cout << "carrier_dip_mhz = " << car.first << "  depth = " << car.second << "\n";
        std::cout << "blue_dip_mhz = " << blue.first << "  depth = " << blue.second << "\n";
        std::cout << "sideband_separation_mhz = " << (blue.first - red.first) / 2.0 << "\n";
        if (!coprop && red.second < blue.second && blue.second > 0.0) {
            const double nbar = motion::mean_n_from_sidebands(std::max(0.0, red.second),
                                                              blue.second);
            std::cout << "mean_n_from_sidebands = " << nbar << "\n";
            table.comments.push_back("mean_n_from_sidebands = " + csv::format_number(nbar));
        }
    } else {
        std::cerr << "unknown scan kind '" << opt.kind << "'\n";
        return 1;
    }

    write_table(g, table, "scan.csv");
    return 0;
}

// --- universe ------------------------------------------------------------------

struct UniverseOptions {
    double low_khz = 100.0;
    double high_mhz = 2.0;
    double rise_us = 1.0;
    std::string shape = "linear";
    int n_max = 60;
    long reps = 0; // 0: analytic probabilities only
};

int cmd_universe(const GlobalOptions& g, const UniverseOptions& opt)
{
    const lab::LabConfig cfg = load_config(g);
    universe::RampProfile ramp;
    ramp.initial_frequency = two_pi * 1e3 * opt.low_khz;
    ramp.final_frequency = two_pi * 1e6 * opt.high_mhz;
    ramp.rise_time = opt.rise_us * 1e-6;
    if (opt.shape == "sudden")
        ramp.shape = universe::RampShape::sudden;
    else if (opt.shape == "smooth")
        ramp.shape = universe::RampShape::smooth_step;
    else if (opt.shape == "linear")
        ramp.shape = universe::RampShape::linear;
    else {
        std::cerr << "unknown ramp shape '" << opt.shape << "'\n";
        return 1;
    }

    const auto res = universe::mode_squeezing(ramp, opt.n_max);
    const double eta = cfg.lamb_dicke();
    const double rabi = cfg.raman.base_rabi;

    const double squeezed_second =
        universe::readout_protocol(res.occupations, eta, rabi, universe::ReadoutVariant::second_red);
    const double squeezed_first =
        universe::readout_protocol(res.occupations, eta, rabi, universe::ReadoutVariant::first_red);

    // thermal reference of equal mean occupation
    motion::MotionalDistribution thermal;
    thermal.probs = Eigen::VectorXd(opt.n_max + 1);
    const double x = res.mean_n / (res.mean_n + 1.0);
    for (int n = 0; n <= opt.n_max; ++n)
        thermal.probs(n) = std::pow(x, n);
    thermal.probs /= thermal.probs.sum();
    const double thermal_second =
        universe::readout_protocol(thermal, eta, rabi, universe::ReadoutVariant::second_red);
    const double thermal_first =
        universe::readout_protocol(thermal, eta, rabi, universe::ReadoutVariant::first_red);

    auto observed = [&](double p, int salt) {
        return opt.reps > 0 ? sample_binomial(p, opt.reps, cfg.seed + salt) : p;
    };

    std::cout << "squeeze_parameter_r = " << res.squeeze_parameter << "\n";
    std::cout << "mean_n = " << res.mean_n << "\n";
    std::cout << "bogoliubov_norm = " << res.bogoliubov_norm << "\n";
    std::cout << "P2 = " << res.occupations.probs(2) << "\n";
    std::cout << "bright_second_red_squeezed = " << observed(squeezed_second, 1) << "\n";
    std::cout << "bright_first_red_squeezed = " << observed(squeezed_first, 2) << "\n";
    std::cout << "bright_second_red_thermal = " << observed(thermal_second, 3) << "\n";
    std::cout << "bright_first_red_thermal = " << observed(thermal_first, 4) << "\n";
    std::cout << "discrimination = "
              << std::abs(squeezed_second / std::max(squeezed_first, 1e-12)
                          - thermal_second / std::max(thermal_first, 1e-12))
              << "\n";

    csv::Table table;
    table.comments = {"squeezed occupations after the confinement ramp",
                      "r = " + csv::format_number(res.squeeze_parameter),
                      "mean_n = " + csv::format_number(res.mean_n)};
    table.header = {"n", "P_n"};
    for (int n = 0; n <= res.occupations.n_max(); ++n)
        table.rows.push_back({static_cast<double>(n), res.occupations.probs(n)});
    write_table(g, table, "universe.csv");
    return 0;
}

// --- micromotion ---------------------------------------------------------------

struct MicromotionOptions {
    double beta = -1.0;   // direct modulation index
    double xdc_um = -1.0; // or derive from a DC offset
    long photons = 100000;
    int bins = 64;
};

int cmd_micromotion(const GlobalOptions& g, const MicromotionOptions& opt)
{
    const lab::LabConfig cfg = load_config(g);
    if (opt.photons <= 0) {
        std::cerr << "photons must be positive\n";
        return 1;
    }

    const auto [a, q] = trap::stability_params(cfg.trap);
    double beta = std::max(opt.beta, 0.0);
    if (opt.xdc_um >= 0.0) {
        const auto mm = micromotion::modulation_params(two_pi / constants::transition_wavelength,
                                                       std::abs(q), opt.xdc_um * 1e-6,
                                                       cfg.trap.radius, 1.4, 0.0);
        beta = mm.modulation_index;
        std::cout << "beta_from_offset = " << beta << "\n";
    }

    const double gamma = constants::bd_linewidth;
    const bloch::TwoLevelParams bd{gamma / std::sqrt(3.0), gamma / 2.0, gamma};
    const double period = two_pi / cfg.trap.drive;

    Eigen::VectorXd trace;
    if (beta == 0.0) {
        trace = Eigen::VectorXd::Ones(512);
    } else {
        micromotion::MicromotionParams mm;
        mm.modulation_index = beta;
        const double settle = 30.0 / gamma;
        const double step = period / 512.0;
        const auto traj = micromotion::evolve_modulated_bloch(bd, mm, cfg.trap.drive,
                                                              settle + period, step);
        trace.resize(512);
        for (int i = 0; i < 512; ++i)
            trace(i) = traj[traj.size() - 512 + static_cast<std::size_t>(i)].state.pop_upper;
    }

    const auto hist = micromotion::synthesize_correlation_histogram(trace, period, opt.photons,
                                                                    cfg.seed, 7e-9, opt.bins);
    const double p = micromotion::histogram_flatness_p_value(hist);
    std::cout << "rf_period_ns = " << period * 1e9 << "\n";
    std::cout << "beta = " << beta << "\n";
    std::cout << "chi_square_p = " << p << "\n";
    std::cout << "verdict = " << (p > 0.05 ? "flat" : (p < 0.01 ? "peaked" : "inconclusive"))
              << "\n";

    csv::Table table;
    table.comments = {"photon-RF correlation histogram",
                      "beta = " + csv::format_number(beta),
                      "chi_square_p = " + csv::format_number(p)};
    table.header = {"bin_start_ns", "count"};
    for (int i = 0; i < hist.bins.size(); ++i)
        table.rows.push_back({i * hist.bin_width * 1e9, hist.bins(i)});
    write_table(g, table, "micromotion.csv");
    return 0;
}

// --- compile / run / serve-atp ---------------------------------------------------

int cmd_compile(const std::string& input, const std::string& output, bool disasm)
{
    std::ifstream in(input, std::ios::binary);
    if (!in) {
        std::cerr << "cannot open " << input << "\n";
        return 1;
    }
    std::ostringstream text;
    text << in.rdbuf();

    const auto compiled = pulse::compile_source(text.str());
    for (const auto& w : compiled.warnings)
        std::cerr << "warning: " << w << "\n";

    std::ofstream out(output, std::ios::binary);
    if (!out) {
        std::cerr << "cannot write " << output << "\n";
        return 1;
    }
    out.write(reinterpret_cast<const char*>(compiled.bytes.data()),
              static_cast<std::streamsize>(compiled.bytes.size()));
    if (disasm)
        std::cout << pulse::disassemble(compiled.bytes);
    return 0;
}

int cmd_run(const GlobalOptions& g, const std::string& program_path, long reps)
{
    const lab::LabConfig cfg = load_config(g);
    std::ifstream in(program_path, std::ios::binary);
    if (!in) {
        std::cerr << "cannot open " << program_path << "\n";
        return 1;
    }
    std::vector<std::uint8_t> binary((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());

    const auto exec = vm::execute(binary, vm::BoxState{});
    const auto schedule = vm::timeline_to_pulses(exec.timeline, vm::BoxState{},
                                                 exec.final_state.clock, cfg.beams);
    const auto result = vm::run_experiment(schedule, cfg.experiment_physics(), reps, cfg.seed);

    std::cout << "repetitions = " << reps << "\n";
    std::cout << "raman_pulse_us = " << result.raman_duration * 1e6 << "\n";
    std::cout << "detection_window_us = " << result.detection_window * 1e6 << "\n";
    std::cout << "p_down_analytic = " << result.p_down_analytic << "\n";
    std::cout << "p_bright = " << result.p_bright << " +- " << result.p_bright_error << "\n";
    std::cout << "mean_counts = " << result.mean_counts << "\n";

    csv::Table table;
    table.header = {"rep", "counts", "bright"};
    for (const auto& r : result.records)
        table.rows.push_back({static_cast<double>(r.repetition), static_cast<double>(r.counts),
                              r.bright ? 1.0 : 0.0});
    write_table(g, table, "results.csv");
    return 0;
}

int cmd_serve_atp(const GlobalOptions& g, std::uint16_t port, double duration_s)
{
    const lab::LabConfig cfg = load_config(g);
    auto rng = std::make_shared<std::mt19937_64>(cfg.seed);
    const double mean = cfg.detection.model.bright_rate * cfg.detection.window;
    atp::CountSource source = [rng, mean] {
        std::poisson_distribution<std::uint32_t> counts(mean);
        return std::vector<atp::RoiCountRecord>{{0, true, counts(*rng)}};
    };

    atp::AtpServer server({port, atp::CameraModel{cfg.detection.window}}, std::move(source));
    server.start();
    std::cout << "serving count rates on port " << server.port() << "\n";
    if (duration_s > 0.0) {
        std::this_thread::sleep_for(std::chrono::duration<double>(duration_s));
        server.stop();
    } else {
        for (;;)
            std::this_thread::sleep_for(std::chrono::seconds(3600));
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"virtual trapped-ion laboratory"};
    app.require_subcommand(1);

    GlobalOptions global;
    app.add_option("--config", global.config_path, "laboratory configuration file");
    app.add_option("--seed", global.seed, "override the configured random seed");
    app.add_option("--out", global.out_path, "output file");
    app.add_option("--jobs", global.jobs, "parallel workers for scan grids");

    ScanOptions scan;
    auto* scan_cmd = app.add_subcommand("scan", "synthesize a flopping or frequency scan");
    scan_cmd->fallthrough();
    scan_cmd->add_option("--kind", scan.kind, "frequency | duration");
    scan_cmd->add_option("--geometry", scan.geometry, "copropagating | orthogonal");
    scan_cmd->add_option("--order", scan.order, "sideband order for duration scans");
    scan_cmd->add_option("--points", scan.points, "grid points");
    scan_cmd->add_option("--reps", scan.reps, "repetitions per point (0: analytic)");
    scan_cmd->add_option("--to-us", scan.to_us, "duration scan end time");
    scan_cmd->add_option("--span-mhz", scan.span_mhz, "frequency scan half span");
    scan_cmd->add_option("--tau-us", scan.tau_us, "frequency scan probe duration");
    scan_cmd->add_option("--spread-khz", scan.spread_khz, "Rabi frequency spread");
    scan_cmd->add_flag("--sideband-cooled", scan.sideband_cooled,
                       "apply the cooling schedule before scanning");

    UniverseOptions uni;
    auto* uni_cmd = app.add_subcommand("universe", "run the confinement-ramp squeezing experiment");
    uni_cmd->fallthrough();
    uni_cmd->add_option("--low-khz", uni.low_khz, "initial axial frequency");
    uni_cmd->add_option("--high-mhz", uni.high_mhz, "final axial frequency");
    uni_cmd->add_option("--rise-us", uni.rise_us, "ramp rise time");
    uni_cmd->add_option("--shape", uni.shape, "sudden | linear | smooth");
    uni_cmd->add_option("--n-max", uni.n_max, "occupation cutoff");
    uni_cmd->add_option("--reps", uni.reps, "sampled repetitions for the readout signals");

    MicromotionOptions mm;
    auto* mm_cmd = app.add_subcommand("micromotion", "synthesize a photon-RF correlation histogram");
    mm_cmd->fallthrough();
    mm_cmd->add_option("--beta", mm.beta, "modulation index");
    mm_cmd->add_option("--xdc-um", mm.xdc_um, "DC offset in micrometres (overrides --beta)");
    mm_cmd->add_option("--photons", mm.photons, "photons to draw");
    mm_cmd->add_option("--bins", mm.bins, "histogram bins per RF period");

    std::string compile_in, compile_out = "program.bin";
    bool disasm = false;
    auto* compile_cmd = app.add_subcommand("compile", "compile a pulse program");
    compile_cmd->fallthrough();
    compile_cmd->add_option("input", compile_in, "pulse program source")->required();
    compile_cmd->add_option("-o,--output", compile_out, "binary output path");
    compile_cmd->add_flag("--disasm", disasm, "print the canonical disassembly");

    std::string run_program;
    long run_reps = 500;
    auto* run_cmd = app.add_subcommand("run", "execute a compiled program as repeated experiments");
    run_cmd->fallthrough();
    run_cmd->add_option("program", run_program, "compiled pulse program")->required();
    run_cmd->add_option("--reps", run_reps, "repetitions");

    std::uint16_t port = 1899;
    double serve_duration = 0.0;
    auto* serve_cmd = app.add_subcommand("serve-atp", "serve simulated count rates over TCP");
    serve_cmd->fallthrough();
    serve_cmd->add_option("--port", port, "TCP port (0: ephemeral)");
    serve_cmd->add_option("--duration-s", serve_duration, "stop after this long (0: run forever)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*scan_cmd)
            return cmd_scan(global, scan);
        if (*uni_cmd)
            return cmd_universe(global, uni);
        if (*mm_cmd)
            return cmd_micromotion(global, mm);
        if (*compile_cmd)
            return cmd_compile(compile_in, compile_out, disasm);
        if (*run_cmd)
            return cmd_run(global, run_program, run_reps);
        if (*serve_cmd)
            return cmd_serve_atp(global, port, serve_duration);
    } catch (const pulse::CompileError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const lab::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
