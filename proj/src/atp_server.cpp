#include "iontrap/atp/server.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cctype>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <stdexcept>

namespace iontrap::atp {

namespace {

void send_all(int fd, const void* data, std::size_t size)
{
    const char* p = static_cast<const char*>(data);
    while (size > 0) {
        const ssize_t n = ::send(fd, p, size, MSG_NOSIGNAL);
        if (n <= 0)
            throw std::runtime_error("send failed");
        p += n;
        size -= static_cast<std::size_t>(n);
    }
}

void send_line(int fd, const std::string& text)
{
    const std::string framed = text + "\r\n";
    send_all(fd, framed.data(), framed.size());
}

// strict decimal with optional fraction, period separator
bool parse_decimal(const std::string& text, double& out)
{
    if (text.empty())
        return false;
    std::size_t i = 0;
    bool digits = false;
    for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i)
        digits = true;
    if (i < text.size() && text[i] == '.') {
        ++i;
        for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i)
            digits = true;
    }
    if (!digits || i != text.size())
        return false;
    out = std::stod(text);
    return true;
}

} // namespace

struct AtpServer::SessionState {
    bool have_cycle_time = false;
    double cycle_time = 0.0;
    int acquisitions_per_readout = 0;
    bool streaming = false;
};

AtpServer::AtpServer(Options options, CountSource source)
    : options_(options), source_(std::move(source))
{
}

AtpServer::~AtpServer()
{
    stop();
}

void AtpServer::start()
{
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0)
        throw std::runtime_error("socket() failed");
    const int one = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);

    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(options_.port);
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
        ::close(listen_fd_);
        listen_fd_ = -1;
        throw std::runtime_error("bind failed on port " + std::to_string(options_.port));
    }
    socklen_t len = sizeof addr;
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
    if (::listen(listen_fd_, 8) != 0)
        throw std::runtime_error("listen failed");

    running_ = true;
    acceptor_ = std::thread([this] { accept_loop(); });
}

void AtpServer::stop()
{
    if (!running_.exchange(false))
        return;
    if (listen_fd_ >= 0) {
        ::shutdown(listen_fd_, SHUT_RDWR);
        ::close(listen_fd_);
        listen_fd_ = -1;
    }
    if (acceptor_.joinable())
        acceptor_.join();
    if (session_thread_.joinable())
        session_thread_.join();
}

void AtpServer::accept_loop()
{
    while (running_) {
        pollfd pfd{listen_fd_, POLLIN, 0};
        const int rc = ::poll(&pfd, 1, 100);
        if (!running_)
            break;
        if (rc <= 0)
            continue;
        const int fd = ::accept(listen_fd_, nullptr, nullptr);
        if (fd < 0)
            continue;
        try {
            if (busy_.load()) {
                send_line(fd, "101 busy");
                ::close(fd);
                continue;
            }
            if (!source_) {
                send_line(fd, "102 no data available");
                ::close(fd);
                continue;
            }
            busy_ = true;
            if (session_thread_.joinable())
                session_thread_.join();
            session_thread_ = std::thread([this, fd] {
                session(fd);
                busy_ = false;
            });
        } catch (...) {
            ::close(fd);
            busy_ = false;
        }
    }
}

void AtpServer::session(int fd)
{
    using clock = std::chrono::steady_clock;
    SessionState st;
    std::string buffer;
    auto next_batch = clock::now();

    auto read_available = [&](int timeout_ms) -> bool {
        pollfd pfd{fd, POLLIN, 0};
        const int rc = ::poll(&pfd, 1, timeout_ms);
        if (rc <= 0)
            return true; // timeout: still connected
        char chunk[512];
        const ssize_t n = ::recv(fd, chunk, sizeof chunk, 0);
        if (n <= 0)
            return false; // peer closed
        buffer.append(chunk, static_cast<std::size_t>(n));
        return true;
    };

    auto pop_line = [&](std::string& line) -> bool {
        const auto nl = buffer.find('\n');
        if (nl == std::string::npos)
            return false;
        line = buffer.substr(0, nl);
        buffer.erase(0, nl + 1);
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        return true;
    };

    auto stream_batch = [&] {
        const auto records = source_();
        std::vector<std::uint8_t> block;
        block.reserve(records.size() * 5);
        for (const auto& r : records) {
            const auto bytes = encode_roi(r);
            block.insert(block.end(), bytes.begin(), bytes.end());
        }
        if (!block.empty())
            send_all(fd, block.data(), block.size());
    };

    try {
        send_line(fd, "100 ready");
        bool open = true;
        while (open && running_) {
            if (st.streaming) {
                const auto now = clock::now();
                if (now >= next_batch) {
                    stream_batch();
                    next_batch = now + std::chrono::duration_cast<clock::duration>(
                                     std::chrono::duration<double>(st.cycle_time));
                }
                const auto wait_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                         next_batch - clock::now())
                                         .count();
                if (!read_available(static_cast<int>(std::max<long long>(0, wait_ms))))
                    break;
            } else {
                if (!read_available(100))
                    break;
            }

            std::string line;
            while (open && pop_line(line)) {
                try {
                    // split verb and argument
                    std::string verb = line, arg;
                    const auto space = line.find(' ');
                    if (space != std::string::npos) {
                        verb = line.substr(0, space);
                        arg = line.substr(space + 1);
                    }

                    if (verb == "CT") {
                        double ct = 0.0;
                        if (!parse_decimal(arg, ct) || ct <= 0.0) {
                            send_line(fd, "400 syntax error");
                        } else if (st.streaming) {
                            send_line(fd, "400 CT cannot be executed while streaming");
                        } else if (1.0 / ct <= options_.camera.max_frame_rate) {
                            st.have_cycle_time = true;
                            st.cycle_time = ct;
                            st.acquisitions_per_readout = 1;
                            send_line(fd, "200 1");
                        } else if (1.0 / ct <= options_.camera.max_row_rate) {
                            st.have_cycle_time = true;
                            st.cycle_time = ct;
                            // every other buffered row carries data
                            st.acquisitions_per_readout = options_.camera.rows_on_chip / 2;
                            send_line(fd, "200 "
                                              + std::to_string(st.acquisitions_per_readout));
                        } else {
                            send_line(fd, "402 desired cycle time cannot be achieved");
                        }
                    } else if (verb == "ET" && arg.empty()) {
                        char text[64];
                        std::snprintf(text, sizeof text, "201 %.6f",
                                      options_.camera.exposure_time);
                        send_line(fd, text);
                    } else if (verb == "TM") {
                        if (!st.have_cycle_time)
                            send_line(fd, "400 TM cannot be executed prior to a successfully "
                                          "executed CT command");
                        else if (arg != "0" && arg != "1")
                            send_line(fd, "400 syntax error");
                        else
                            send_line(fd, "100 okay");
                    } else if (verb == "START" && arg.empty()) {
                        if (!st.have_cycle_time) {
                            send_line(fd, "400 START cannot be executed prior to a successfully "
                                          "executed CT command");
                        } else if (st.streaming) {
                            send_line(fd, "400 already streaming");
                        } else {
                            send_line(fd, "300 here we go");
                            st.streaming = true;
                            next_batch = clock::now();
                        }
                    } else if (verb == "STOP" && arg.empty()) {
                        if (!st.streaming) {
                            send_line(fd, "400 STOP cannot be executed prior to a START command");
                        } else {
                            st.streaming = false;
                            send_line(fd, "100 ready");
                        }
                    } else if (verb == "QUIT" && arg.empty()) {
                        send_line(fd, "199 bye");
                        open = false;
                    } else {
                        send_line(fd, "400 syntax error");
                    }
                } catch (const std::exception&) {
                    send_line(fd, "401 unknown error");
                }
            }
        }
    } catch (...) {
        // peer vanished mid-reply; nothing to salvage
    }
    ::close(fd);
}

} // namespace iontrap::atp
