#include "iontrap/vm/channels.hpp"

#include "iontrap/bloch.hpp"
#include "iontrap/constants.hpp"

#include <cmath>
#include <set>

namespace iontrap::vm {

void ChannelMap::validate() const
{
    std::set<int> ttls;
    std::set<std::string> names;
    for (const auto& b : beams) {
        if (b.ttl >= 0 && !ttls.insert(b.ttl).second)
            throw MappingError("beams share ttl index " + std::to_string(b.ttl));
        if (!names.insert(b.name).second)
            throw MappingError("duplicate beam name " + b.name);
    }
}

const BeamChannel* ChannelMap::find(const std::string& name) const
{
    for (const auto& b : beams)
        if (b.name == name)
            return &b;
    return nullptr;
}

ChannelMap ChannelMap::standard()
{
    using namespace iontrap::constants;
    const double i_sat = bloch::saturation_intensity(bd_linewidth, bd_frequency);
    ChannelMap map;
    map.beams = {
        // detection/cooling beam runs at (2/3) I_sat
        {"BD", 0, 0, 0, 2.0 / 3.0 * i_sat, i_sat},
        {"BD-detuned", 1, -1, -1, 6.0 * i_sat, i_sat},
        {"RD", 2, -1, -1, 0.5 * i_sat, i_sat},
        {"repumper", 3, -1, -1, 0.5 * i_sat, i_sat},
        // Raman beams: intensities of the flopping experiments
        {"B1", 4, 1, 1, 2.9e6, i_sat},
        {"R1", 5, 2, 2, 6.0e6, i_sat},
        {"R2", 6, 3, 3, 6.0e6, i_sat},
    };
    map.validate();
    return map;
}

double attenuator_output(double dac_value)
{
    if (dac_value < 0.0 || dac_value > 1.0)
        throw std::invalid_argument("attenuator_output: dac value must be in [0, 1]");
    return std::pow(10.0, (26.0 * dac_value - 26.0) / 10.0);
}

PulseSchedule timeline_to_pulses(const EventTimeline& timeline, const BoxState& initial,
                                 std::uint64_t end_cycle, const ChannelMap& map)
{
    map.validate();
    constexpr double cycle_s = 1.0e-8;

    struct BeamTracker {
        const BeamChannel* channel = nullptr;
        bool on = false;
        double opened_at = 0.0;
        double dac = 1.0;
        std::uint32_t freq_word = 0;
    };

    std::map<int, BeamTracker*> by_ttl;
    std::map<int, std::vector<BeamTracker*>> by_dac;
    std::map<int, std::vector<BeamTracker*>> by_board;
    std::vector<BeamTracker> trackers(map.beams.size());
    PulseSchedule out;
    for (std::size_t i = 0; i < map.beams.size(); ++i) {
        const BeamChannel& ch = map.beams[i];
        trackers[i].channel = &ch;
        if (ch.ttl >= 0) {
            trackers[i].on = initial.ttl_out[static_cast<std::size_t>(ch.ttl)];
            by_ttl[ch.ttl] = &trackers[i];
        }
        if (ch.dac >= 0) {
            trackers[i].dac = initial.dac[static_cast<std::size_t>(ch.dac)];
            by_dac[ch.dac].push_back(&trackers[i]);
        }
        if (ch.dds_board >= 0) {
            const auto& board = initial.dds[static_cast<std::size_t>(ch.dds_board)];
            trackers[i].freq_word =
                board.live[static_cast<std::size_t>(board.live_profile)].frequency_word;
            by_board[ch.dds_board].push_back(&trackers[i]);
        }
        out.beams[ch.name] = {};
    }

    auto intensity_of = [](const BeamTracker& t) {
        const double power = t.channel->dac >= 0 ? attenuator_output(t.dac) : 1.0;
        return t.channel->intensity_at_dac1 * power;
    };
    auto close_interval = [&](BeamTracker& t, double at) {
        if (at > t.opened_at)
            out.beams[t.channel->name].push_back({t.opened_at, at, intensity_of(t),
                                                  pulse::frequency_mhz(t.freq_word)});
    };

    for (const auto& e : timeline) {
        const double now = static_cast<double>(e.cycle) * cycle_s;
        switch (e.kind) {
        case EventKind::ttl_edge: {
            const auto it = by_ttl.find(e.channel);
            if (it == by_ttl.end())
                throw MappingError("ttl " + std::to_string(e.channel) + " is not mapped to a beam");
            BeamTracker& t = *it->second;
            const bool level = e.value != 0.0;
            if (level && !t.on) {
                t.on = true;
                t.opened_at = now;
            } else if (!level && t.on) {
                close_interval(t, now);
                t.on = false;
            }
            break;
        }
        case EventKind::dac_set: {
            const auto it = by_dac.find(e.channel);
            if (it == by_dac.end())
                throw MappingError("dac " + std::to_string(e.channel) + " is not mapped to a beam");
            for (BeamTracker* t : it->second) {
                if (t->on && t->dac != e.value) { // split at the amplitude change
                    close_interval(*t, now);
                    t->opened_at = now;
                }
                t->dac = e.value;
            }
            break;
        }
        case EventKind::dds_commit: {
            const auto it = by_board.find(e.channel);
            if (it == by_board.end())
                throw MappingError("dds board " + std::to_string(e.channel)
                                   + " is not mapped to a beam");
            for (BeamTracker* t : it->second) {
                if (t->on && t->freq_word != e.frequency_word) {
                    close_interval(*t, now);
                    t->opened_at = now;
                }
                t->freq_word = e.frequency_word;
            }
            break;
        }
        }
    }

    out.duration = static_cast<double>(end_cycle) * cycle_s;
    for (auto& t : trackers)
        if (t.on)
            close_interval(t, out.duration);
    return out;
}

} // namespace iontrap::vm
