#include "iontrap/vm/experiment.hpp"

#include "iontrap/constants.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace iontrap::vm {

namespace {

// first stretch where both beams are on simultaneously
double overlap_duration(const std::vector<BeamInterval>& a, const std::vector<BeamInterval>& b)
{
    for (const auto& ia : a)
        for (const auto& ib : b) {
            const double start = std::max(ia.start, ib.start);
            const double end = std::min(ia.end, ib.end);
            if (end > start)
                return end - start;
        }
    return 0.0;
}

} // namespace

ExperimentResult run_experiment(const PulseSchedule& schedule, const ExperimentPhysics& physics,
                                long repetitions, std::uint64_t seed)
{
    if (repetitions <= 0)
        throw std::invalid_argument("run_experiment: repetitions must be positive");

    const auto bd = schedule.beams.find(physics.detection_beam);
    if (bd == schedule.beams.end() || bd->second.empty())
        throw ScheduleError("schedule contains no detection interval");
    const BeamInterval detection = bd->second.back();
    const double t_detect = detection.end - detection.start;
    if (t_detect <= 0.0)
        throw ScheduleError("zero-length detection interval");

    bool cooled = false;
    for (const auto& iv : bd->second)
        if (&iv != &bd->second.back() && iv.end - iv.start >= physics.min_cooling_window)
            cooled = true;

    ExperimentResult result;
    result.detection_window = t_detect;

    // motional state after the cooling stages
    motion::MotionalDistribution dist;
    if (cooled || physics.sideband_cooled) {
        dist = motion::thermal_distribution(physics.doppler_temperature, physics.trap_frequency,
                                            physics.n_max)
                   .distribution;
    } else {
        dist = motion::MotionalDistribution::fock(0, physics.n_max);
    }
    if (physics.sideband_cooled) {
        const auto res = cooling::sideband_cool(dist, physics.schedule, physics.lamb_dicke,
                                                physics.base_rabi);
        dist = res.final;
        dist.probs /= dist.probs.sum(); // renormalise over the retained part
    }

    // Raman pulse: co-propagating pair wins when both overlap
    auto intervals = [&](const std::string& name) -> const std::vector<BeamInterval>& {
        static const std::vector<BeamInterval> none;
        const auto it = schedule.beams.find(name);
        return it == schedule.beams.end() ? none : it->second;
    };
    double tau = overlap_duration(intervals(physics.coprop_lower), intervals(physics.coprop_upper));
    motion::Geometry geometry = motion::Geometry::copropagating;
    if (tau <= 0.0) {
        tau = overlap_duration(intervals(physics.ortho_lower), intervals(physics.ortho_upper));
        geometry = motion::Geometry::orthogonal;
    }

    double p_down = 1.0;
    if (tau > 0.0) {
        motion::RamanConfig cfg;
        cfg.base_rabi = physics.base_rabi;
        cfg.lamb_dicke = physics.lamb_dicke;
        cfg.geometry = geometry;
        p_down = motion::flopping_probability(dist, cfg, physics.transition_order,
                                              physics.detuning, tau);
    }
    result.raman_duration = tau;
    result.raman_geometry = geometry;
    result.p_down_analytic = p_down;

    std::mt19937_64 rng(seed);
    std::bernoulli_distribution collapse(std::clamp(p_down, 0.0, 1.0));
    std::bernoulli_distribution leak(physics.detection.dark_leak);
    std::poisson_distribution<long> bright_counts(physics.detection.bright_rate * t_detect);
    std::poisson_distribution<long> dark_counts(physics.detection.dark_rate * t_detect);

    long bright_total = 0;
    double count_sum = 0.0;
    result.records.reserve(static_cast<std::size_t>(repetitions));
    for (long rep = 0; rep < repetitions; ++rep) {
        bool is_bright = collapse(rng);
        if (!is_bright && physics.detection.dark_leak > 0.0 && leak(rng))
            is_bright = true; // off-resonant pumping during the window
        const long counts = is_bright ? bright_counts(rng) : dark_counts(rng);
        const bool inferred = counts >= physics.detection.threshold;
        bright_total += inferred ? 1 : 0;
        count_sum += static_cast<double>(counts);
        result.records.push_back({rep, counts, inferred});
    }

    const double n = static_cast<double>(repetitions);
    result.p_bright = static_cast<double>(bright_total) / n;
    result.p_bright_error = std::sqrt(std::max(result.p_bright * (1.0 - result.p_bright), 0.0) / n);
    result.mean_counts = count_sum / n;
    return result;
}

} // namespace iontrap::vm
