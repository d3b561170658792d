#include "rmmtree/serialize.hpp"

#include <array>
#include <fstream>
#include <istream>
#include <ostream>

namespace rmm {

namespace {

constexpr std::array<char, 4> magic = {'R', 'M', 'M', 'T'};
constexpr uint8_t version = 1;

void put_u64(std::ostream& out, uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>(v >> (8 * i));
    out.write(b, 8);
}

void put_u32(std::ostream& out, uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>(v >> (8 * i));
    out.write(b, 4);
}

uint64_t get_u64(std::istream& in) {
    char b[8];
    if (!in.read(b, 8)) throw format_error("RMMT: truncated input");
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(static_cast<uint8_t>(b[i])) << (8 * i);
    return v;
}

uint32_t get_u32(std::istream& in) {
    char b[4];
    if (!in.read(b, 4)) throw format_error("RMMT: truncated input");
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(static_cast<uint8_t>(b[i])) << (8 * i);
    return v;
}

}  // namespace

void save_rmmt(std::ostream& out, const paren_bitvector& bits, uint32_t chunk_bits, uint32_t arity) {
    out.write(magic.data(), 4);
    out.put(static_cast<char>(version));
    put_u64(out, bits.size());
    put_u32(out, chunk_bits);
    put_u32(out, arity);
    for (uint64_t w : bits.words()) put_u64(out, w);
}

void save_rmmt(const std::filesystem::path& file, const paren_bitvector& bits,
               uint32_t chunk_bits, uint32_t arity) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw std::ios_base::failure("cannot open " + file.string() + " for writing");
    save_rmmt(out, bits, chunk_bits, arity);
    out.flush();
    if (!out) throw std::ios_base::failure("write failed: " + file.string());
}

rmmt_payload load_rmmt(std::istream& in) {
    char m[4];
    if (!in.read(m, 4) || !std::equal(m, m + 4, magic.data())) throw format_error("RMMT: bad magic");
    int v = in.get();
    if (v != version) throw format_error("RMMT: unsupported version");
    rmmt_payload r;
    uint64_t len = get_u64(in);
    r.chunk_bits = get_u32(in);
    r.arity = get_u32(in);
    r.bits = paren_bitvector(len);
    uint64_t nwords = (len + 63) / 64;
    for (uint64_t i = 0; i < nwords; ++i) r.bits.mutable_words()[i] = get_u64(in);
    uint64_t tail = len % 64;
    if (tail && nwords && (r.bits.words().back() >> tail) != 0)
        throw format_error("RMMT: nonzero padding bits");
    return r;
}

rmmt_payload load_rmmt(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::ios_base::failure("cannot open " + file.string());
    return load_rmmt(in);
}

bool sniff_rmmt(std::istream& in) {
    char m[4];
    in.read(m, 4);
    bool ok = in.gcount() == 4 && std::equal(m, m + 4, magic.data());
    in.clear();
    in.seekg(0);
    return ok;
}

}  // namespace rmm
