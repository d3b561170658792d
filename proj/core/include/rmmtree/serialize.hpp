#ifndef RMMTREE_SERIALIZE_HPP
#define RMMTREE_SERIALIZE_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "rmmtree/paren_bitvector.hpp"

namespace rmm {

/// RMMT container: magic "RMMT", version byte 1, u64 bit length, u32 chunk
/// bits, u32 arity, then the sequence packed LSB-first in little-endian
/// 64-bit words. Summary arrays are never stored; they are rebuilt on load.
struct rmmt_payload {
    paren_bitvector bits;
    uint32_t chunk_bits = 512;
    uint32_t arity = 32;
};

void save_rmmt(std::ostream& out, const paren_bitvector& bits, uint32_t chunk_bits, uint32_t arity);
void save_rmmt(const std::filesystem::path& file, const paren_bitvector& bits,
               uint32_t chunk_bits, uint32_t arity);

rmmt_payload load_rmmt(std::istream& in);
rmmt_payload load_rmmt(const std::filesystem::path& file);

/// True when the stream starts with the RMMT magic (stream is rewound).
bool sniff_rmmt(std::istream& in);

/// Bad container contents (magic, version, truncation).
struct format_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace rmm

#endif
