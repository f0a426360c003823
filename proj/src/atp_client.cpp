#include "iontrap/atp/client.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstring>
#include <stdexcept>

namespace iontrap::atp {

AtpClient::~AtpClient()
{
    close();
}

void AtpClient::connect(const std::string& host, std::uint16_t port, int timeout_ms)
{
    close();
    timeout_ms_ = timeout_ms;
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0)
        throw std::runtime_error("socket() failed");
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1)
        throw std::runtime_error("bad host address: " + host);
    if (::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
        close();
        throw std::runtime_error("connect to " + host + ":" + std::to_string(port) + " failed");
    }
}

void AtpClient::close()
{
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
    buffer_.clear();
}

void AtpClient::send_line(const std::string& line)
{
    const std::string framed = line + "\r\n";
    const char* p = framed.data();
    std::size_t left = framed.size();
    while (left > 0) {
        const ssize_t n = ::send(fd_, p, left, MSG_NOSIGNAL);
        if (n <= 0)
            throw std::runtime_error("send failed");
        p += n;
        left -= static_cast<std::size_t>(n);
    }
}

void AtpClient::fill(std::size_t)
{
    pollfd pfd{fd_, POLLIN, 0};
    const int rc = ::poll(&pfd, 1, timeout_ms_);
    if (rc <= 0)
        throw std::runtime_error("read timeout");
    char chunk[1024];
    const ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
    if (n == 0)
        throw std::runtime_error("connection closed by peer");
    if (n < 0)
        throw std::runtime_error("recv failed");
    buffer_.append(chunk, static_cast<std::size_t>(n));
}

std::string AtpClient::read_line()
{
    for (;;) {
        const auto nl = buffer_.find('\n');
        if (nl != std::string::npos) {
            std::string line = buffer_.substr(0, nl);
            buffer_.erase(0, nl + 1);
            if (!line.empty() && line.back() == '\r')
                line.pop_back();
            return line;
        }
        fill(1);
    }
}

std::vector<std::uint8_t> AtpClient::read_exact(std::size_t count)
{
    while (buffer_.size() < count)
        fill(count - buffer_.size());
    std::vector<std::uint8_t> out(buffer_.begin(), buffer_.begin() + static_cast<long>(count));
    buffer_.erase(0, count);
    return out;
}

std::vector<RoiCountRecord> AtpClient::read_records(std::size_t count)
{
    const auto bytes = read_exact(count * 5);
    std::vector<RoiCountRecord> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::array<std::uint8_t, 5> rec{};
        std::copy_n(bytes.begin() + static_cast<long>(5 * i), 5, rec.begin());
        out.push_back(decode_roi(rec));
    }
    return out;
}

} // namespace iontrap::atp
