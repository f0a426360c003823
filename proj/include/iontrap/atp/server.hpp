#pragma once

#include "iontrap/atp/wire.hpp"

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <thread>
#include <vector>

// TCP server speaking the count-rate transfer protocol: status on connect,
// CT/ET/TM/START/STOP/QUIT command handling with the published reply codes,
// and 5-byte ROI record streaming. One streaming session at a time; late
// arrivals are told "101 busy" and disconnected.

namespace iontrap::atp {

struct CameraModel {
    double exposure_time = 20e-6;  // seconds, the ET reply
    double max_frame_rate = 580.0; // FPS with a readout per acquisition
    double max_row_rate = 1700.0;  // FPS in row-wise acquisition mode
    int rows_on_chip = 204;        // row-wise: acquisitions buffered per readout
};

/// Produces one acquisition worth of ROI records.
using CountSource = std::function<std::vector<RoiCountRecord>()>;

class AtpServer {
public:
    struct Options {
        std::uint16_t port = 1899; // 0 picks an ephemeral port
        CameraModel camera;
    };

    AtpServer(Options options, CountSource source);
    ~AtpServer();

    AtpServer(const AtpServer&) = delete;
    AtpServer& operator=(const AtpServer&) = delete;

    void start();
    void stop();
    std::uint16_t port() const { return port_; }

private:
    void accept_loop();
    void session(int fd);
    struct SessionState;

    Options options_;
    CountSource source_;
    std::uint16_t port_ = 0;
    int listen_fd_ = -1;
    std::atomic<bool> running_{false};
    std::atomic<bool> busy_{false};
    std::thread acceptor_;
    std::thread session_thread_;
};

} // namespace iontrap::atp
