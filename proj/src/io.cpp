#include "fraclab/io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace fraclab {

static_assert(std::endian::native == std::endian::little,
              "field dumps are written in native byte order and specified little-endian");

namespace {

constexpr char magic[4] = {'F', 'C', 'L', '1'};

void put_u64(std::ofstream& out, std::uint64_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void put_f64(std::ofstream& out, double v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint64_t get_u64(std::ifstream& in) {
    std::uint64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}

double get_f64(std::ifstream& in) {
    double v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}

} // namespace

void write_field_binary(const std::string& path, const GridFunction& field) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("write_field_binary: cannot open " + path);
    out.write(magic, 4);
    put_u64(out, static_cast<std::uint64_t>(field.grid().dim()));
    put_u64(out, static_cast<std::uint64_t>(field.grid().points_per_axis()));
    put_f64(out, field.grid().half_length());
    for (double v : field.values()) put_f64(out, v);
    if (!out) throw std::runtime_error("write_field_binary: write failed for " + path);
}

GridFunction read_field_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_field_binary: cannot open " + path);
    char m[4];
    in.read(m, 4);
    if (!in || std::memcmp(m, magic, 4) != 0)
        throw std::runtime_error("read_field_binary: bad magic in " + path);
    auto dim = static_cast<int>(get_u64(in));
    auto n = static_cast<int>(get_u64(in));
    double half_length = get_f64(in);
    Grid grid(dim, n, half_length);
    std::vector<double> values(grid.node_count());
    for (double& v : values) v = get_f64(in);
    if (!in) throw std::runtime_error("read_field_binary: truncated file " + path);
    GridFunction f(grid, std::move(values));
    if (!f.all_finite()) throw std::runtime_error("read_field_binary: non-finite values in " + path);
    return f;
}

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct CsvWriter::Impl {
    std::ofstream out;
    bool wrote_header = false;
    std::size_t columns = 0;
    std::string path;
};

CsvWriter::CsvWriter(const std::string& path) : impl_(new Impl) {
    impl_->path = path;
    impl_->out.open(path, std::ios::binary | std::ios::trunc);   // binary: LF on every platform
    if (!impl_->out) {
        delete impl_;
        throw std::runtime_error("CsvWriter: cannot open " + path);
    }
}

CsvWriter::~CsvWriter() { delete impl_; }

void CsvWriter::header(const std::vector<std::string>& names) {
    if (impl_->wrote_header) throw std::logic_error("CsvWriter: header already written");
    impl_->columns = names.size();
    for (std::size_t i = 0; i < names.size(); ++i)
        impl_->out << (i ? "," : "") << names[i];
    impl_->out << '\n';
    impl_->wrote_header = true;
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (!impl_->wrote_header) throw std::logic_error("CsvWriter: header must come first");
    if (cells.size() != impl_->columns)
        throw std::logic_error("CsvWriter: row width does not match header in " + impl_->path);
    for (std::size_t i = 0; i < cells.size(); ++i)
        impl_->out << (i ? "," : "") << cells[i];
    impl_->out << '\n';
}

} // namespace fraclab
