#include "nsstab/snapshot.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace nsstab {

namespace {

constexpr char field_magic[9] = "NSSTABF1";
constexpr char checkpoint_magic[9] = "NSSTABC1";
constexpr std::uint32_t format_version = 1;

void write_raw(std::ofstream& os, const void* p, std::size_t n) {
    os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

void read_raw(std::ifstream& is, void* p, std::size_t n) {
    is.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (!is) throw std::runtime_error("snapshot: truncated file");
}

void write_header(std::ofstream& os, const char* magic, const BoxSpec& box) {
    write_raw(os, magic, 8);
    write_raw(os, &format_version, sizeof format_version);
    write_raw(os, box.lengths.data(), sizeof(double) * 3);
    std::uint32_t res[3] = {static_cast<std::uint32_t>(box.nx()),
                            static_cast<std::uint32_t>(box.ny()),
                            static_cast<std::uint32_t>(box.nz())};
    write_raw(os, res, sizeof res);
}

BoxSpec read_header(std::ifstream& is, const char* magic) {
    char m[8];
    read_raw(is, m, 8);
    if (std::memcmp(m, magic, 8) != 0)
        throw std::runtime_error("snapshot: bad magic (wrong file type?)");
    std::uint32_t version = 0;
    read_raw(is, &version, sizeof version);
    if (version != format_version)
        throw std::runtime_error("snapshot: unsupported format version " + std::to_string(version));
    double lengths[3];
    std::uint32_t res[3];
    read_raw(is, lengths, sizeof lengths);
    read_raw(is, res, sizeof res);
    return BoxSpec(lengths[0], lengths[1], lengths[2], static_cast<int>(res[0]),
                   static_cast<int>(res[1]), static_cast<int>(res[2]));
}

}  // namespace

void write_snapshot(const PhysicalVectorField& f, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("write_snapshot: cannot open " + path);
    write_header(os, field_magic, f.box);
    for (int c = 0; c < 3; ++c)
        write_raw(os, f[c].data(), sizeof(double) * static_cast<std::size_t>(f[c].size()));
    if (!os) throw std::runtime_error("write_snapshot: write failed for " + path);
}

PhysicalVectorField read_snapshot(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("read_snapshot: cannot open " + path);
    PhysicalVectorField f(read_header(is, field_magic));
    for (int c = 0; c < 3; ++c)
        read_raw(is, f[c].data(), sizeof(double) * static_cast<std::size_t>(f[c].size()));
    return f;
}

void write_checkpoint(const Checkpoint& c, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("write_checkpoint: cannot open " + path);
    write_header(os, checkpoint_magic, c.field.box);
    write_raw(os, &c.t, sizeof c.t);
    write_raw(os, &c.config_hash, sizeof c.config_hash);
    for (int k = 0; k < 3; ++k)
        write_raw(os, c.field[k].data(), sizeof(Complex) * static_cast<std::size_t>(c.field[k].size()));
    if (!os) throw std::runtime_error("write_checkpoint: write failed for " + path);
}

Checkpoint read_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("read_checkpoint: cannot open " + path);
    Checkpoint c;
    c.field = SpectralVectorField(read_header(is, checkpoint_magic));
    read_raw(is, &c.t, sizeof c.t);
    read_raw(is, &c.config_hash, sizeof c.config_hash);
    for (int k = 0; k < 3; ++k)
        read_raw(is, c.field[k].data(), sizeof(Complex) * static_cast<std::size_t>(c.field[k].size()));
    return c;
}

}  // namespace nsstab
