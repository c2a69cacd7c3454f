#pragma once

// Output plumbing for experiment runs: versioned CSV tables, SVG line plots,
// digest-tracked file writes and the run manifest.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace lrnn {

inline constexpr std::string_view kVersion = "0.1.0";

/// Shortest decimal that round-trips to the same double.
std::string format_double(double x);

class CsvTable {
public:
    CsvTable(std::string experiment, std::vector<std::string> columns);

    void add_row(std::vector<std::string> cells);
    std::size_t rows() const { return rows_.size(); }
    /// Header comment "# lrnn-memory v<version> <experiment>", column line, rows.
    std::string str() const;

private:
    std::string experiment_;
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

struct PlotSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

/// Self-contained SVG line chart. Non-finite points are skipped; with log_y
/// the y values are plotted as log10.
std::string svg_line_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                          const std::vector<PlotSeries>& series, bool log_y = false);

struct OutputRecord {
    std::string name;
    std::uint64_t bytes = 0;
    std::uint64_t digest = 0;  // FNV-1a 64
};

/// Single writer for a run directory. Every file goes through write(), is
/// written atomically and recorded with its digest.
class OutputSet {
public:
    explicit OutputSet(std::filesystem::path dir);

    const std::filesystem::path& dir() const { return dir_; }
    std::filesystem::path write(const std::string& name, std::string_view contents);
    /// Records a file produced elsewhere (e.g. a checkpoint) after it is complete.
    void record(const std::string& name);
    const std::vector<OutputRecord>& records() const { return records_; }

private:
    std::filesystem::path dir_;
    std::vector<OutputRecord> records_;
};

struct RunManifest {
    std::string command;
    std::map<std::string, std::string> config;
    std::chrono::system_clock::time_point start;
    std::chrono::system_clock::time_point end;
    std::vector<OutputRecord> files;
    std::map<std::string, std::uint64_t> rejected;
};

std::string iso8601(std::chrono::system_clock::time_point t);
std::string hex64(std::uint64_t v);

/// Writes manifest.json into dir atomically.
void write_manifest(const std::filesystem::path& dir, const RunManifest& manifest);

} // namespace lrnn
