#pragma once

// Little-endian binary container shared by model checkpoints ("LRNN") and
// cached datasets ("DATA").

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "lrnn/numerics.hpp"

namespace lrnn {

class BinaryWriter {
public:
    void bytes(std::string_view b) { buf_.append(b); }
    void u32(std::uint32_t v);
    void u64(std::uint64_t v);
    void f64(double v);
    void str(std::string_view s);
    void matrix(const RMatrix& m);  // row-major values, shape stored separately

    const std::string& data() const { return buf_; }
    void save(const std::filesystem::path& path) const;

private:
    std::string buf_;
};

class BinaryReader {
public:
    explicit BinaryReader(std::string data) : buf_(std::move(data)) {}
    static BinaryReader open(const std::filesystem::path& path);

    std::string_view bytes(std::size_t n);
    std::uint32_t u32();
    std::uint64_t u64();
    double f64();
    std::string str();
    RMatrix matrix(Index rows, Index cols);

    std::size_t offset() const { return pos_; }
    bool at_end() const { return pos_ == buf_.size(); }

private:
    void need(std::size_t n);

    std::string buf_;
    std::size_t pos_ = 0;
};

/// Reads a whole file; throws FormatError if it cannot be opened.
std::string read_file(const std::filesystem::path& path);

/// Writes via a temporary file and rename so readers never see partial output.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

} // namespace lrnn
