#include "ofdmdet/ioutil.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace ofdmdet {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    if (!in.good() && !in.eof()) throw std::runtime_error("read failed: " + path.string());
    return std::move(buf).str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path dir = path.parent_path();
    if (!dir.empty()) std::filesystem::create_directories(dir);
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out.good()) throw std::runtime_error("write failed: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw std::runtime_error("rename failed for " + path.string() + ": " + ec.message());
    }
}

} // namespace ofdmdet
