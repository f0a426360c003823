#include "iontrap/lab/config.hpp"

#include "iontrap/constants.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace iontrap::lab {

using constants::two_pi;

vm::ExperimentPhysics LabConfig::experiment_physics() const
{
    vm::ExperimentPhysics phys;
    phys.trap_frequency = axial_frequency();
    phys.doppler_temperature = doppler_temperature();
    phys.lamb_dicke = lamb_dicke();
    phys.base_rabi = raman.base_rabi;
    phys.detection = detection.model;
    phys.schedule = cooling_schedule;
    return phys;
}

void LabConfig::apply(const std::string& key, const std::string& value)
{
    auto num = [&] {
        try {
            std::size_t used = 0;
            const double v = std::stod(value, &used);
            while (used < value.size() && std::isspace(static_cast<unsigned char>(value[used])))
                ++used;
            if (used != value.size())
                throw ConfigError("trailing characters in value '" + value + "'");
            return v;
        } catch (const ConfigError&) {
            throw;
        } catch (...) {
            throw ConfigError("cannot parse number '" + value + "' for key " + key);
        }
    };

    if (key == "trap.dc_voltage_v")
        trap.dc_voltage = num();
    else if (key == "trap.rf_voltage_v")
        trap.rf_voltage = num();
    else if (key == "trap.drive_frequency_mhz")
        trap.drive = two_pi * 1e6 * num();
    else if (key == "trap.radius_m")
        trap.radius = num();
    else if (key == "trap.mass_u")
        trap.mass = constants::atomic_mass_unit * num();
    else if (key == "trap.axial_voltage_v")
        trap.axial_voltage = num();
    else if (key == "trap.axial_width_m")
        trap.axial_width = num();
    else if (key == "zeeman.field_gauss")
        zeeman.field = 1e-4 * num();
    else if (key == "zeeman.hyperfine_mhz")
        zeeman.hyperfine_splitting = two_pi * 1e6 * num();
    else if (key == "detection.bright_rate_hz")
        detection.model.bright_rate = num();
    else if (key == "detection.dark_rate_hz")
        detection.model.dark_rate = num();
    else if (key == "detection.dark_leak")
        detection.model.dark_leak = num();
    else if (key == "detection.threshold")
        detection.model.threshold = static_cast<long>(num());
    else if (key == "detection.window_us")
        detection.window = 1e-6 * num();
    else if (key == "cooling.start_n")
        cooling_schedule.start_n = static_cast<int>(num());
    else if (key == "cooling.cycles_per_step")
        cooling_schedule.cycles_per_step = static_cast<int>(num());
    else if (key == "cooling.repump_success")
        cooling_schedule.repump_success = num();
    else if (key == "raman.base_rabi_khz")
        raman.base_rabi = two_pi * 1e3 * num();
    else if (key == "raman.detuning_ghz")
        raman.detuning = two_pi * 1e9 * num();
    else if (key == "raman.spread_khz")
        raman.spread = two_pi * 1e3 * num();
    else if (key == "raman.lamb_dicke")
        raman.lamb_dicke = num();
    else if (key == "seed")
        seed = static_cast<std::uint64_t>(num());
    else if (key.rfind("beams.", 0) == 0) {
        const auto rest = key.substr(6);
        const auto dot = rest.find('.');
        if (dot == std::string::npos)
            throw ConfigError("beam key needs beams.<name>.<field>: " + key);
        const std::string name = rest.substr(0, dot);
        const std::string field = rest.substr(dot + 1);
        for (auto& b : beams.beams) {
            if (b.name != name)
                continue;
            if (field == "ttl")
                b.ttl = static_cast<int>(num());
            else if (field == "dds")
                b.dds_board = static_cast<int>(num());
            else if (field == "dac")
                b.dac = static_cast<int>(num());
            else if (field == "intensity_w_m2")
                b.intensity_at_dac1 = num();
            else
                throw ConfigError("unknown beam field '" + field + "'");
            return;
        }
        throw ConfigError("unknown beam '" + name + "'");
    } else {
        throw ConfigError("unknown configuration key '" + key + "'");
    }
}

LabConfig LabConfig::from_text(const std::string& text)
{
    LabConfig cfg;
    std::istringstream in(text);
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        // trim
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos)
            continue;
        const auto last = line.find_last_not_of(" \t");
        line = line.substr(first, last - first + 1);

        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        auto strip = [](std::string s) {
            const auto a = s.find_first_not_of(" \t");
            if (a == std::string::npos)
                return std::string{};
            const auto b = s.find_last_not_of(" \t");
            return s.substr(a, b - a + 1);
        };
        const std::string key = strip(line.substr(0, eq));
        const std::string value = strip(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("line " + std::to_string(line_no) + ": empty key or value");
        try {
            cfg.apply(key, value);
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    cfg.beams.validate();
    cfg.cooling_schedule.validate();
    return cfg;
}

LabConfig LabConfig::from_file(const std::string& path)
{
    std::ifstream f(path);
    if (!f)
        throw ConfigError("cannot open configuration file " + path);
    std::ostringstream text;
    text << f.rdbuf();
    return from_text(text.str());
}

} // namespace iontrap::lab
