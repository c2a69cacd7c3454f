#include "lrnn/container.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "lrnn/errors.hpp"

namespace lrnn {

void BinaryWriter::u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(char((v >> (8 * i)) & 0xff));
}

void BinaryWriter::u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(char((v >> (8 * i)) & 0xff));
}

void BinaryWriter::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

void BinaryWriter::str(std::string_view s) {
    u32(std::uint32_t(s.size()));
    buf_.append(s);
}

void BinaryWriter::matrix(const RMatrix& m) {
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j) f64(m(i, j));
}

void BinaryWriter::save(const std::filesystem::path& path) const { write_file_atomic(path, buf_); }

BinaryReader BinaryReader::open(const std::filesystem::path& path) { return BinaryReader(read_file(path)); }

void BinaryReader::need(std::size_t n) {
    if (buf_.size() - pos_ < n)
        throw FormatError("truncated input: need " + std::to_string(n) + " bytes at offset " + std::to_string(pos_) +
                              ", have " + std::to_string(buf_.size() - pos_),
                          pos_);
}

std::string_view BinaryReader::bytes(std::size_t n) {
    need(n);
    std::string_view out(buf_.data() + pos_, n);
    pos_ += n;
    return out;
}

std::uint32_t BinaryReader::u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(static_cast<unsigned char>(buf_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
}

std::uint64_t BinaryReader::u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(static_cast<unsigned char>(buf_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return v;
}

double BinaryReader::f64() { return std::bit_cast<double>(u64()); }

std::string BinaryReader::str() {
    const auto n = u32();
    return std::string(bytes(n));
}

RMatrix BinaryReader::matrix(Index rows, Index cols) {
    need(std::size_t(rows * cols) * 8);
    RMatrix m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) m(i, j) = f64();
    return m;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out.write(contents.data(), std::streamsize(contents.size()));
        if (!out) throw std::runtime_error("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

} // namespace lrnn
