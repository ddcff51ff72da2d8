#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

namespace fswitch {

// Round-trip safe decimal rendering (17 significant digits).
std::string format_double(double v);

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string> header);

    CsvWriter& cell(double v);
    CsvWriter& cell(long long v);
    CsvWriter& cell(int v) { return cell(static_cast<long long>(v)); }
    CsvWriter& cell(const std::string& v);
    void end_row();

    const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
    std::ofstream out_;
    bool first_ = true;
};

// SHA-256 of a file's contents as lowercase hex.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace fswitch
