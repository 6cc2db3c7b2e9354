#include "roughwave/field_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace roughwave {

namespace {

constexpr std::array<char, 8> kMagic{'R', 'W', 'F', 'I', 'E', 'L', 'D', '1'};

template <typename T>
void put_le(std::ostream& os, T value) {
    std::array<unsigned char, sizeof(T)> bytes{};
    std::memcpy(bytes.data(), &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    os.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T get_le(std::istream& is) {
    std::array<unsigned char, sizeof(T)> bytes{};
    if (!is.read(reinterpret_cast<char*>(bytes.data()), sizeof(T))) {
        throw std::runtime_error("truncated binary field");
    }
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    T value;
    std::memcpy(&value, bytes.data(), sizeof(T));
    return value;
}

bool has_suffix(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

void write_field_csv(std::ostream& os, const SpectralField& f) {
    const GridSpec& g = f.grid();
    os << "# roughwave spectral field\n";
    os << "dim,cells_per_cube,cubes_per_axis\n";
    os << g.dim << ',' << g.cells_per_cube << ',' << g.cubes_per_axis << '\n';
    os << std::setprecision(17);
    const auto c = f.coeffs();
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c[i] == cplx{}) continue;
        const LatticeIndex m = lattice_index(g, i);
        for (int d = 0; d < g.dim; ++d) os << m[d] << ',';
        os << c[i].real() << ',' << c[i].imag() << '\n';
    }
}

SpectralField read_field_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("#", 0) != 0) throw std::runtime_error("missing field CSV banner");
    if (!std::getline(is, line)) throw std::runtime_error("missing field CSV header");
    if (!std::getline(is, line)) throw std::runtime_error("missing grid row");
    GridSpec g;
    {
        std::istringstream row(line);
        char comma = 0;
        if (!(row >> g.dim >> comma >> g.cells_per_cube >> comma >> g.cubes_per_axis)) {
            throw std::runtime_error("malformed grid row: " + line);
        }
    }
    g.validate();
    std::vector<cplx> c(g.size());
    int line_no = 3;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream row(line);
        LatticeIndex m{0, 0, 0};
        char comma = 0;
        for (int d = 0; d < g.dim; ++d) {
            if (!(row >> m[d] >> comma)) throw std::runtime_error("malformed field row at line " + std::to_string(line_no));
        }
        double re = 0.0;
        double im = 0.0;
        if (!(row >> re >> comma >> im)) throw std::runtime_error("malformed field row at line " + std::to_string(line_no));
        std::size_t flat = 0;
        if (!flat_index(g, m, flat)) throw std::runtime_error("lattice index outside grid at line " + std::to_string(line_no));
        c[flat] = {re, im};
    }
    return SpectralField(g, std::move(c));
}

void write_field_binary(std::ostream& os, const SpectralField& f) {
    const GridSpec& g = f.grid();
    os.write(kMagic.data(), kMagic.size());
    put_le<std::int32_t>(os, g.dim);
    put_le<std::int32_t>(os, g.cells_per_cube);
    put_le<std::int32_t>(os, g.cubes_per_axis);
    const auto c = f.coeffs();
    std::uint64_t count = 0;
    for (const auto& v : c) count += (v != cplx{}) ? 1 : 0;
    put_le<std::uint64_t>(os, count);
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c[i] == cplx{}) continue;
        const LatticeIndex m = lattice_index(g, i);
        for (int d = 0; d < g.dim; ++d) put_le<std::int32_t>(os, m[d]);
        put_le<double>(os, c[i].real());
        put_le<double>(os, c[i].imag());
    }
}

SpectralField read_field_binary(std::istream& is) {
    std::array<char, 8> magic{};
    if (!is.read(magic.data(), magic.size()) || magic != kMagic) throw std::runtime_error("not a binary field file");
    GridSpec g;
    g.dim = get_le<std::int32_t>(is);
    g.cells_per_cube = get_le<std::int32_t>(is);
    g.cubes_per_axis = get_le<std::int32_t>(is);
    g.validate();
    const auto count = get_le<std::uint64_t>(is);
    if (count > g.size()) throw std::runtime_error("record count exceeds grid size");
    std::vector<cplx> c(g.size());
    for (std::uint64_t r = 0; r < count; ++r) {
        LatticeIndex m{0, 0, 0};
        for (int d = 0; d < g.dim; ++d) m[d] = get_le<std::int32_t>(is);
        const double re = get_le<double>(is);
        const double im = get_le<double>(is);
        std::size_t flat = 0;
        if (!flat_index(g, m, flat)) throw std::runtime_error("lattice index outside grid");
        c[flat] = {re, im};
    }
    return SpectralField(g, std::move(c));
}

void save_field(const std::string& path, const SpectralField& f) {
    const bool csv = has_suffix(path, ".csv");
    std::ofstream os(path, csv ? std::ios::out : std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    if (csv) {
        write_field_csv(os, f);
    } else {
        write_field_binary(os, f);
    }
}

SpectralField load_field(const std::string& path) {
    const bool csv = has_suffix(path, ".csv");
    std::ifstream is(path, csv ? std::ios::in : std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    return csv ? read_field_csv(is) : read_field_binary(is);
}

}  // namespace roughwave
