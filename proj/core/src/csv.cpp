#include "coherentcast/csv.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "coherentcast/errors.hpp"

namespace coherentcast {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\n')) s.remove_suffix(1);
    return s;
}

}  // namespace

std::size_t CsvTable::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw InputError(source, 1, "missing column '" + std::string(name) + "'");
}

std::vector<std::string> split_fields(std::string_view line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        const auto piece = line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
        out.emplace_back(trim(piece));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

CsvTable parse_csv(std::string_view text, const std::string& source, bool has_header) {
    CsvTable table;
    table.source = source;
    std::size_t line_no = 0;
    std::size_t start = 0;
    bool header_done = !has_header;
    while (start <= text.size()) {
        const auto end = text.find('\n', start);
        const auto raw = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
        ++line_no;
        const auto line = trim(raw);
        if (!line.empty()) {
            if (!header_done) {
                table.header = split_fields(line);
                header_done = true;
            } else {
                table.rows.push_back(CsvRow{line_no, split_fields(line)});
            }
        }
        if (end == std::string_view::npos) break;
        start = end + 1;
    }
    if (has_header && table.header.empty()) throw InputError(source, 0, "missing header row");
    return table;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(path, 0, "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, std::string_view contents) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError(path, 0, "cannot write file");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
}

CsvTable read_csv_file(const std::string& path, bool has_header) {
    return parse_csv(read_text_file(path), path, has_header);
}

std::optional<double> parse_number(std::string_view text) {
    text = trim(text);
    if (text.empty()) return std::nullopt;
    if (text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
    return value;
}

std::string format_number(double value) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

}  // namespace coherentcast
