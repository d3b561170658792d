#include "rmmtree/compressed_bitmap.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace rmm {

namespace {

struct binomial_table {
    uint64_t c[65][65];
    binomial_table() {
        for (int n = 0; n <= 64; ++n) {
            c[n][0] = 1;
            for (int k = 1; k <= n; ++k)
                c[n][k] = c[n - 1][k - 1] + (k <= n - 1 ? c[n - 1][k] : 0);
            for (int k = n + 1; k <= 64; ++k) c[n][k] = 0;
        }
    }
};

const binomial_table& btab() {
    static const binomial_table t;
    return t;
}

}  // namespace

uint64_t binomial(unsigned n, unsigned k) {
    if (n > 64 || k > n) return 0;
    return btab().c[n][k];
}

unsigned offset_bits(unsigned b, unsigned c) {
    uint64_t cnt = binomial(b, c);
    return cnt <= 1 ? 0 : static_cast<unsigned>(std::bit_width(cnt - 1));
}

uint64_t encode_offset(uint64_t bits, unsigned b, unsigned c) {
    if (std::popcount(b == 64 ? bits : bits & ((1ull << b) - 1)) != static_cast<int>(c))
        throw std::invalid_argument("encode_offset: popcount mismatch");
    uint64_t o = 0;
    unsigned left = c;
    for (unsigned t = 0; t < b && left > 0; ++t) {
        if ((bits >> t) & 1) {
            o += binomial(b - t - 1, left);  // patterns with 0 at this position
            --left;
        }
    }
    return o;
}

uint64_t decode_offset(uint64_t offset, unsigned b, unsigned c) {
    uint64_t bits = 0;
    unsigned left = c;
    for (unsigned t = 0; t < b && left > 0; ++t) {
        uint64_t zero_here = binomial(b - t - 1, left);
        if (offset >= zero_here) {
            offset -= zero_here;
            bits |= 1ull << t;
            --left;
        }
    }
    return bits;
}

triple_codec::triple_codec(unsigned b_max) : b_max_(b_max) {
    if (b_max < 2 || b_max > 64) throw std::invalid_argument("triple_codec: b_max in [2,64]");
    max_bits_ = 14;
    for (unsigned c = 0; c <= b_max; ++c) max_bits_ = std::max(max_bits_, 14 + offset_bits(b_max, c));
}

unsigned triple_codec::encode(chunk_triple t, uint64_t out[2]) const {
    if (t.width == 0 || t.width > b_max_ || t.ones > t.width)
        throw std::invalid_argument("triple_codec: bad chunk");
    unsigned ob = offset_bits(t.width, t.ones);
    out[0] = t.width | (static_cast<uint64_t>(t.ones) << 7) | (t.offset << 14);
    out[1] = ob > 50 ? t.offset >> 50 : 0;
    return 14 + ob;
}

std::pair<chunk_triple, unsigned> triple_codec::decode(bit_view v, uint64_t pos) const {
    chunk_triple t;
    t.width = static_cast<uint8_t>(bits::read_bits(v.words, pos, 7));
    t.ones = static_cast<uint8_t>(bits::read_bits(v.words, pos + 7, 7));
    unsigned ob = offset_bits(t.width, t.ones);
    if (ob <= 64) t.offset = ob ? bits::read_bits(v.words, pos + 14, ob) : 0;
    return {t, 14 + ob};
}

compressed_dyn_bitmap::compressed_dyn_bitmap(options opt)
    : opt_(opt), seq_(triple_codec(opt.chunk_bits), opt.leaf_bits) {}

compressed_dyn_bitmap::compressed_dyn_bitmap(bit_view v, options opt) : compressed_dyn_bitmap(opt) {
    uint64_t b = opt_.chunk_bits;
    for (uint64_t at = 0; at < v.len; at += b) {
        unsigned w = static_cast<unsigned>(v.len - at >= b ? b : v.len - at);
        uint64_t chunk = bits::read_bits(v.words, at, w);
        chunk_triple t;
        t.width = static_cast<uint8_t>(w);
        t.ones = static_cast<uint8_t>(std::popcount(chunk));
        t.offset = encode_offset(chunk, w, t.ones);
        seq_.insert(seq_.count() + 1, t);
    }
}

void compressed_dyn_bitmap::check_pos(uint64_t i) const {
    if (i >= size()) throw std::out_of_range("compressed_dyn_bitmap: position out of range");
}

std::pair<uint64_t, uint64_t> compressed_dyn_bitmap::locate(uint64_t i) const {
    uint64_t t = seq_.search(i, 0);
    return {t + 1, i - seq_.sum(t, 0)};
}

bool compressed_dyn_bitmap::access(uint64_t i) const {
    check_pos(i);
    auto [k, off] = locate(i);
    chunk_triple t = seq_.get(k);
    return (decode_offset(t.offset, t.width, t.ones) >> off) & 1;
}

uint64_t compressed_dyn_bitmap::rank1(uint64_t i) const {
    check_pos(i);
    auto [k, off] = locate(i);
    chunk_triple t = seq_.get(k);
    uint64_t pattern = decode_offset(t.offset, t.width, t.ones);
    uint64_t mask = off + 1 >= 64 ? ~0ull : (1ull << (off + 1)) - 1;
    return seq_.sum(k - 1, 1) + std::popcount(pattern & mask);
}

uint64_t compressed_dyn_bitmap::select1(uint64_t q) const {
    if (q == 0 || q > ones()) throw std::invalid_argument("select1: rank out of range");
    uint64_t t = seq_.search(q - 1, 1);
    chunk_triple c = seq_.get(t + 1);
    uint64_t pattern = decode_offset(c.offset, c.width, c.ones);
    uint64_t rest = q - seq_.sum(t, 1);
    while (--rest > 0) pattern &= pattern - 1;
    return seq_.sum(t, 0) + std::countr_zero(pattern);
}

uint64_t compressed_dyn_bitmap::select0(uint64_t q) const {
    if (q == 0 || q > size() - ones()) throw std::invalid_argument("select0: rank out of range");
    auto zeros = [](const std::array<uint64_t, 2>& s) { return s[0] - s[1]; };
    uint64_t t = seq_.search_proj(q - 1, zeros);
    chunk_triple c = seq_.get(t + 1);
    uint64_t pattern = ~decode_offset(c.offset, c.width, c.ones);
    uint64_t rest = q - (seq_.sum(t, 0) - seq_.sum(t, 1));
    while (--rest > 0) pattern &= pattern - 1;
    return seq_.sum(t, 0) + std::countr_zero(pattern);
}

void compressed_dyn_bitmap::insert(uint64_t i, bool bit) {
    if (i > size()) throw std::out_of_range("compressed_dyn_bitmap: position out of range");
    uint64_t b = opt_.chunk_bits;
    if (seq_.count() == 0) {
        seq_.insert(1, {1, static_cast<uint8_t>(bit), 0});
        return;
    }
    uint64_t k, off;
    if (i == size()) {
        k = seq_.count();
        off = seq_.get(k).width;
    } else {
        std::tie(k, off) = locate(i);
    }
    chunk_triple t = seq_.get(k);
    uint64_t pattern = decode_offset(t.offset, t.width, t.ones);
    // the grown chunk can be b_max + 1 = 65 bits wide
    unsigned __int128 wide = pattern;
    unsigned __int128 low = off == 0 ? 0 : wide & ((static_cast<unsigned __int128>(1) << off) - 1);
    unsigned __int128 high = wide >> off;
    unsigned __int128 grown128 =
        low | (static_cast<unsigned __int128>(bit) << off) | (high << (off + 1));
    unsigned nw = t.width + 1;
    if (nw <= b) {
        uint64_t grown = static_cast<uint64_t>(grown128);
        chunk_triple u;
        u.width = static_cast<uint8_t>(nw);
        u.ones = static_cast<uint8_t>(std::popcount(grown));
        u.offset = encode_offset(grown, nw, u.ones);
        seq_.update(k, u);
        return;
    }
    unsigned wl = nw / 2, wr = nw - wl;
    uint64_t pl = static_cast<uint64_t>(grown128 & ((1ull << wl) - 1));
    uint64_t pr = static_cast<uint64_t>(grown128 >> wl);
    chunk_triple cl{static_cast<uint8_t>(wl), static_cast<uint8_t>(std::popcount(pl)),
                    encode_offset(pl, wl, std::popcount(pl))};
    chunk_triple cr{static_cast<uint8_t>(wr), static_cast<uint8_t>(std::popcount(pr)),
                    encode_offset(pr, wr, std::popcount(pr))};
    seq_.update(k, cl);
    seq_.insert(k + 1, cr);
    uint64_t right_piece = k + 1;
    if (k > 1 && seq_.get(k - 1).width + wl <= b) {
        merge_pair(k - 1);
        --right_piece;
    }
    if (right_piece < seq_.count() &&
        seq_.get(right_piece).width + seq_.get(right_piece + 1).width <= b)
        merge_pair(right_piece);
}

void compressed_dyn_bitmap::erase(uint64_t i) {
    check_pos(i);
    uint64_t b = opt_.chunk_bits;
    auto [k, off] = locate(i);
    chunk_triple t = seq_.get(k);
    uint64_t pattern = decode_offset(t.offset, t.width, t.ones);
    uint64_t low = pattern & ((1ull << off) - 1);
    uint64_t high = off + 1 < 64 ? pattern >> (off + 1) : 0;
    uint64_t shrunk = low | (high << off);
    unsigned nw = t.width - 1;
    if (nw == 0) {
        seq_.erase(k);
        if (k > 1 && k <= seq_.count() && seq_.get(k - 1).width + seq_.get(k).width <= b)
            merge_pair(k - 1);
        return;
    }
    chunk_triple u;
    u.width = static_cast<uint8_t>(nw);
    u.ones = static_cast<uint8_t>(std::popcount(shrunk));
    u.offset = encode_offset(shrunk, nw, u.ones);
    seq_.update(k, u);
    // left first, then right
    if (k > 1 && seq_.get(k - 1).width + nw <= b) {
        merge_pair(k - 1);
        --k;
    }
    if (k < seq_.count() && seq_.get(k).width + seq_.get(k + 1).width <= b) merge_pair(k);
}

void compressed_dyn_bitmap::merge_pair(uint64_t k) {
    chunk_triple a = seq_.get(k), c = seq_.get(k + 1);
    uint64_t pa = decode_offset(a.offset, a.width, a.ones);
    uint64_t pc = decode_offset(c.offset, c.width, c.ones);
    uint64_t merged = pa | (pc << a.width);
    unsigned w = a.width + c.width;
    chunk_triple u;
    u.width = static_cast<uint8_t>(w);
    u.ones = static_cast<uint8_t>(a.ones + c.ones);
    u.offset = encode_offset(merged, w, u.ones);
    seq_.update(k, u);
    seq_.erase(k + 1);
}

paren_bitvector compressed_dyn_bitmap::to_bits() const {
    paren_bitvector out(size());
    uint64_t at = 0;
    for (uint64_t k = 1; k <= seq_.count(); ++k) {
        chunk_triple t = seq_.get(k);
        uint64_t pattern = decode_offset(t.offset, t.width, t.ones);
        bits::write_bits(out.mutable_words().data(), at, pattern, t.width);
        at += t.width;
    }
    return out;
}

compressed_dyn_bitmap::space_info compressed_dyn_bitmap::space_report() const {
    space_info s{};
    s.payload_bits = seq_.bit_size();
    auto sp = seq_.space();
    uint64_t total_bits = (sp.structure_bytes + sizeof(*this)) * 8;
    s.overhead_bits = total_bits - s.payload_bits;
    uint64_t n = size(), m = ones();
    if (n > 0 && m > 0 && m < n) {
        double p = static_cast<double>(m) / static_cast<double>(n);
        double h0 = -p * std::log2(p) - (1 - p) * std::log2(1 - p);
        s.h0_bits = static_cast<uint64_t>(h0 * static_cast<double>(n));
    }
    return s;
}

std::optional<std::string> compressed_dyn_bitmap::audit() const {
    if (auto r = seq_.audit()) return r;
    uint64_t b = opt_.chunk_bits;
    uint64_t prev_width = 0;
    for (uint64_t k = 1; k <= seq_.count(); ++k) {
        chunk_triple t = seq_.get(k);
        if (t.width == 0 || t.width > b) return "chunk width out of range";
        if (t.ones > t.width) return "chunk popcount out of range";
        if (t.offset >= binomial(t.width, t.ones)) return "chunk offset out of range";
        uint64_t pattern = decode_offset(t.offset, t.width, t.ones);
        if (std::popcount(pattern) != t.ones) return "chunk class inconsistent";
        if (k > 1 && prev_width + t.width <= b) return "adjacent chunks violate b_i + b_{i+1} > b";
        prev_width = t.width;
    }
    return std::nullopt;
}

compressed_dyn_bitmap compressed_dyn_bitmap::import_file(const std::filesystem::path& file,
                                                         options opt) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::ios_base::failure("cannot open " + file.string());
    char hdr[8];
    if (!in.read(hdr, 8)) throw std::ios_base::failure("truncated bitmap file");
    uint64_t n = 0;
    for (int i = 0; i < 8; ++i) n |= static_cast<uint64_t>(static_cast<uint8_t>(hdr[i])) << (8 * i);
    std::vector<uint64_t> words((n + 63) / 64, 0);
    for (auto& w : words) {
        char b[8];
        if (!in.read(b, 8)) throw std::ios_base::failure("truncated bitmap file");
        w = 0;
        for (int i = 0; i < 8; ++i) w |= static_cast<uint64_t>(static_cast<uint8_t>(b[i])) << (8 * i);
    }
    return compressed_dyn_bitmap({words.data(), n}, opt);
}

void compressed_dyn_bitmap::export_file(const std::filesystem::path& file) const {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw std::ios_base::failure("cannot open " + file.string() + " for writing");
    paren_bitvector bitsv = to_bits();
    uint64_t n = bitsv.size();
    char hdr[8];
    for (int i = 0; i < 8; ++i) hdr[i] = static_cast<char>(n >> (8 * i));
    out.write(hdr, 8);
    for (uint64_t w : bitsv.words()) {
        char b[8];
        for (int i = 0; i < 8; ++i) b[i] = static_cast<char>(w >> (8 * i));
        out.write(b, 8);
    }
    if (!out) throw std::ios_base::failure("write failed: " + file.string());
}

}  // namespace rmm
