#include "tcn/key_value.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "tcn/error.hpp"

namespace tcn {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

}  // namespace

KeyValues parse_key_values(const std::string& text, const std::string& origin) {
    KeyValues kv;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorKind::Format,
                        origin + ":" + std::to_string(lineno) + ": expected key=value");
        }
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

KeyValues read_key_values(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) {
        throw Error(ErrorKind::MissingFile, "file not found: " + path.string());
    }
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_key_values(buf.str(), path.string());
}

double parse_real(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used == value.size()) return v;
    } catch (const std::exception&) {
    }
    throw Error(ErrorKind::Format, key + ": expected a real number, got '" + value + "'");
}

long long parse_integer(const std::string& key, const std::string& value) {
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (value.empty() || ec != std::errc{} || ptr != value.data() + value.size()) {
        throw Error(ErrorKind::Format, key + ": expected an integer, got '" + value + "'");
    }
    return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw Error(ErrorKind::Format, key + ": expected true/false, got '" + value + "'");
}

}  // namespace tcn
