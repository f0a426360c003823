#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>

// Wire format of the count-rate records: five bytes per region of interest,
// index byte with the focus flag in the most significant bit, then the count
// as a 32-bit unsigned integer in network byte order.

namespace iontrap::atp {

struct RoiCountRecord {
    int roi_index = 0; // 0..127
    bool focused = false;
    std::uint32_t count = 0;

    bool operator==(const RoiCountRecord&) const = default;
};

inline std::array<std::uint8_t, 5> encode_roi(const RoiCountRecord& r)
{
    if (r.roi_index < 0 || r.roi_index > 127)
        throw std::invalid_argument("encode_roi: index must fit in 7 bits");
    std::array<std::uint8_t, 5> out{};
    out[0] = static_cast<std::uint8_t>(r.roi_index) | (r.focused ? 0x80 : 0x00);
    out[1] = static_cast<std::uint8_t>((r.count >> 24) & 0xFF);
    out[2] = static_cast<std::uint8_t>((r.count >> 16) & 0xFF);
    out[3] = static_cast<std::uint8_t>((r.count >> 8) & 0xFF);
    out[4] = static_cast<std::uint8_t>(r.count & 0xFF);
    return out;
}

inline RoiCountRecord decode_roi(const std::array<std::uint8_t, 5>& bytes)
{
    RoiCountRecord r;
    r.roi_index = bytes[0] & 0x7F;
    r.focused = (bytes[0] & 0x80) != 0;
    r.count = (static_cast<std::uint32_t>(bytes[1]) << 24)
        | (static_cast<std::uint32_t>(bytes[2]) << 16)
        | (static_cast<std::uint32_t>(bytes[3]) << 8) | static_cast<std::uint32_t>(bytes[4]);
    return r;
}

} // namespace iontrap::atp
