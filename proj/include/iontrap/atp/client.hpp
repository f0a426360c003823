#pragma once

#include "iontrap/atp/wire.hpp"

#include <cstdint>
#include <string>
#include <vector>

// Small blocking client used by the tests and the command line to script
// protocol sessions.

namespace iontrap::atp {

class AtpClient {
public:
    AtpClient() = default;
    ~AtpClient();

    AtpClient(const AtpClient&) = delete;
    AtpClient& operator=(const AtpClient&) = delete;

    void connect(const std::string& host, std::uint16_t port, int timeout_ms = 2000);
    void close();
    bool connected() const { return fd_ >= 0; }

    void send_line(const std::string& line);
    /// Reads one CRLF-terminated reply line (without the terminator).
    std::string read_line();
    /// Reads exactly `count` bytes of a data block.
    std::vector<std::uint8_t> read_exact(std::size_t count);
    std::vector<RoiCountRecord> read_records(std::size_t count);

private:
    void fill(std::size_t need_at_least_one);
    int fd_ = -1;
    int timeout_ms_ = 2000;
    std::string buffer_;
};

} // namespace iontrap::atp
