// File formats.
//
// Binary field dump: 4 magic bytes "FCL1", then dim and points-per-axis as
// 8-byte little-endian integers, the box half-length as an 8-byte IEEE
// double, then the N^dim node values row-major. CSV output always carries a
// header row, uses 17-significant-digit decimals ("%.17g") and LF line
// endings, so identical runs produce identical bytes.

#pragma once

#include <string>
#include <vector>

#include "fraclab/grid.hpp"

namespace fraclab {

void write_field_binary(const std::string& path, const GridFunction& field);
GridFunction read_field_binary(const std::string& path);

std::string format_g17(double v);

struct CsvWriter {
    explicit CsvWriter(const std::string& path);
    ~CsvWriter();
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void header(const std::vector<std::string>& names);
    void row(const std::vector<std::string>& cells);

private:
    struct Impl;
    Impl* impl_;
};

} // namespace fraclab
