// rmmtool: validate / build / query / bench over parentheses corpora.
// Positions are 0-based bit positions; ranks and child indices are 1-based.
// Exit codes: 0 ok, 1 usage, 2 validation failure, 3 I/O failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include "rmmtree/dynamic_rmm.hpp"
#include "rmmtree/ordinal_tree.hpp"
#include "rmmtree/serialize.hpp"
#include "rmmtree/static_rmm.hpp"

using json = nlohmann::ordered_json;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_validation = 2;
constexpr int exit_io = 3;

struct loaded_input {
    rmm::paren_bitvector bits;
    uint32_t chunk_bits = 512;
    uint32_t arity = 32;
};

loaded_input load_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::ios_base::failure("cannot open " + path);
    if (rmm::sniff_rmmt(in)) {
        auto r = rmm::load_rmmt(in);
        return {std::move(r.bits), r.chunk_bits, r.arity};
    }
    std::ostringstream text;
    text << in.rdbuf();
    if (!in.good() && !in.eof()) throw std::ios_base::failure("read failed: " + path);
    return {rmm::paren_bitvector::from_string(text.str()), 512, 32};
}

struct balance_scan {
    bool balanced;
    uint64_t violation_at;  // first bad position, or length for unmatched opens
    uint64_t max_depth;
};

balance_scan scan_balance(const rmm::paren_bitvector& p) {
    int64_t e = 0, mx = 0;
    for (uint64_t i = 0; i < p.size(); ++i) {
        e += p[i] ? 1 : -1;
        if (e < 0) return {false, i, static_cast<uint64_t>(mx)};
        mx = std::max<int64_t>(mx, e);
    }
    if (e != 0) return {false, p.size(), static_cast<uint64_t>(mx)};
    return {true, 0, static_cast<uint64_t>(mx)};
}

int cmd_validate(const std::string& file) {
    loaded_input in;
    try {
        in = load_input(file);
    } catch (const rmm::parse_error& e) {
        json j{{"error", e.what()}, {"position", e.position}};
        std::cout << j.dump() << "\n";
        return exit_validation;
    } catch (const rmm::format_error& e) {
        json j{{"error", e.what()}};
        std::cout << j.dump() << "\n";
        return exit_validation;
    }
    auto s = scan_balance(in.bits);
    json j;
    j["length"] = in.bits.size();
    j["balanced"] = s.balanced;
    if (s.balanced) {
        j["nodes"] = in.bits.size() / 2;
        j["max_depth"] = s.max_depth;
    } else {
        j["violation_at"] = s.violation_at;
    }
    std::cout << j.dump() << "\n";
    return s.balanced ? exit_ok : exit_validation;
}

int cmd_build(const std::string& input, const std::string& output, uint32_t chunk_bits,
              uint32_t arity) {
    loaded_input in;
    try {
        in = load_input(input);
    } catch (const rmm::parse_error& e) {
        std::cerr << "parse error at position " << e.position << ": " << e.what() << "\n";
        return exit_validation;
    }
    rmm::static_rmm t(in.bits, {chunk_bits, arity, rmm::static_rmm::summary_width::automatic});
    rmm::save_rmmt(output, t.bits(), chunk_bits, arity);
    uint64_t total_bits = t.space_bytes() * 8;
    json j;
    j["length"] = t.size();
    j["chunk_bits"] = chunk_bits;
    j["arity"] = arity;
    j["total_bits"] = total_bits;
    auto s = scan_balance(in.bits);
    if (s.balanced && t.size() >= 2) {
        j["nodes"] = t.size() / 2;
        j["bits_per_node"] = static_cast<double>(total_bits) / static_cast<double>(t.size() / 2);
    }
    j["overhead_fraction"] =
        static_cast<double>(total_bits - t.size()) / static_cast<double>(t.size());
    std::cout << j.dump() << "\n";
    return exit_ok;
}

// one script line -> one output line; errors never abort the run
struct query_engine {
    rmm::static_rmm prim;
    std::optional<rmm::ordinal_tree<rmm::static_rmm>> tree;

    explicit query_engine(rmm::paren_bitvector bits, uint32_t s, uint32_t k)
        : prim(std::move(bits), {s, k, rmm::static_rmm::summary_width::automatic}) {
        if (prim.total_excess() == 0 && prim.min_excess() >= 0) tree.emplace(prim);
    }

    std::string run_line(const std::string& line) {
        std::istringstream is(line);
        std::string op;
        is >> op;
        if (op.empty() || op[0] == '#') return {};
        std::vector<int64_t> a;
        int64_t x;
        while (is >> x) a.push_back(x);
        try {
            return dispatch(op, a);
        } catch (const std::exception& e) {
            return std::string("ERR ") + e.what();
        }
    }

  private:
    static std::string num(uint64_t v) { return std::to_string(v); }
    static std::string opt(std::optional<uint64_t> v, const char* missing) {
        return v ? num(*v) : std::string("ERR ") + missing;
    }
    uint64_t u(const std::vector<int64_t>& a, size_t i) const {
        if (a[i] < 0) throw std::invalid_argument("negative position");
        return static_cast<uint64_t>(a[i]);
    }
    const rmm::ordinal_tree<rmm::static_rmm>& t() const {
        if (!tree) throw std::invalid_argument("sequence is not balanced; tree ops unavailable");
        return *tree;
    }

    std::string dispatch(const std::string& op, const std::vector<int64_t>& a) {
        auto need = [&](size_t n) {
            if (a.size() != n)
                throw std::invalid_argument(op + " expects " + std::to_string(n) + " argument(s)");
        };
        // primitives
        if (op == "inspect") { need(1); return num(prim.bit_at(u(a, 0))); }
        if (op == "excess") { need(1); return std::to_string(prim.excess(u(a, 0))); }
        if (op == "sum") { need(2); return std::to_string(prim.sum(u(a, 0), u(a, 1))); }
        if (op == "fwd_search") { need(2); return opt(prim.fwd_search(u(a, 0), a[1]), "no match"); }
        if (op == "bwd_search") { need(2); return opt(prim.bwd_search(u(a, 0), a[1]), "no match"); }
        if (op == "rmqi") {
            need(2);
            auto r = prim.rmqi(u(a, 0), u(a, 1));
            return num(r.pos) + " " + std::to_string(r.value);
        }
        if (op == "RMQi") {
            need(2);
            auto r = prim.rMqi(u(a, 0), u(a, 1));
            return num(r.pos) + " " + std::to_string(r.value);
        }
        if (op == "min_count") { need(2); return num(prim.min_count(u(a, 0), u(a, 1))); }
        if (op == "min_select") { need(3); return num(prim.min_select(u(a, 0), u(a, 1), u(a, 2))); }
        if (op == "rank1") { need(1); return num(prim.rank1(u(a, 0))); }
        if (op == "rank0") { need(1); return num(prim.rank0(u(a, 0))); }
        if (op == "select1") { need(1); return num(prim.select1(u(a, 0))); }
        if (op == "select0") { need(1); return num(prim.select0(u(a, 0))); }
        if (op == "rank_p1") { need(1); return num(prim.rank_p1(u(a, 0))); }
        if (op == "select_p1") { need(1); return num(prim.select_p1(u(a, 0))); }
        if (op == "rank_p2") { need(1); return num(prim.rank_p2(u(a, 0))); }
        if (op == "select_p2") { need(1); return num(prim.select_p2(u(a, 0))); }
        // tree operations
        if (op == "findclose") { need(1); return num(t().find_close(u(a, 0))); }
        if (op == "findopen") { need(1); return num(t().find_open(u(a, 0))); }
        if (op == "enclose") { need(1); return opt(t().enclose(u(a, 0)), "no enclosing node"); }
        if (op == "depth") { need(1); return num(t().depth(u(a, 0))); }
        if (op == "parent") { need(1); return opt(t().parent(u(a, 0)), "no parent"); }
        if (op == "subtree_size") { need(1); return num(t().subtree_size(u(a, 0))); }
        if (op == "isleaf") { need(1); return num(t().isleaf(u(a, 0))); }
        if (op == "isancestor") { need(2); return num(t().isancestor(u(a, 0), u(a, 1))); }
        if (op == "first_child") { need(1); return opt(t().first_child(u(a, 0)), "no child"); }
        if (op == "last_child") { need(1); return opt(t().last_child(u(a, 0)), "no child"); }
        if (op == "next_sibling") { need(1); return opt(t().next_sibling(u(a, 0)), "no next sibling"); }
        if (op == "prev_sibling") { need(1); return opt(t().prev_sibling(u(a, 0)), "no prev sibling"); }
        if (op == "pre_rank") { need(1); return num(t().pre_rank(u(a, 0))); }
        if (op == "pre_select") { need(1); return num(t().pre_select(u(a, 0))); }
        if (op == "post_rank") { need(1); return num(t().post_rank(u(a, 0))); }
        if (op == "post_select") { need(1); return num(t().post_select(u(a, 0))); }
        if (op == "level_ancestor") {
            need(2);
            return opt(t().level_ancestor(u(a, 0), u(a, 1)), "no such ancestor");
        }
        if (op == "level_next") { need(1); return opt(t().level_next(u(a, 0)), "no level next"); }
        if (op == "level_prev") { need(1); return opt(t().level_prev(u(a, 0)), "no level prev"); }
        if (op == "level_lmost") { need(1); return opt(t().level_lmost(u(a, 0)), "no such depth"); }
        if (op == "level_rmost") { need(1); return opt(t().level_rmost(u(a, 0)), "no such depth"); }
        if (op == "lca") { need(2); return num(t().lca(u(a, 0), u(a, 1))); }
        if (op == "deepest_node") { need(1); return num(t().deepest_node(u(a, 0))); }
        if (op == "height") { need(1); return num(t().height(u(a, 0))); }
        if (op == "degree") { need(1); return num(t().degree(u(a, 0))); }
        if (op == "child") { need(2); return num(t().child(u(a, 0), u(a, 1))); }
        if (op == "child_rank") { need(1); return opt(t().child_rank(u(a, 0)), "no parent"); }
        if (op == "leaf_rank") { need(1); return num(t().leaf_rank(u(a, 0))); }
        if (op == "leaf_select") { need(1); return num(t().leaf_select(u(a, 0))); }
        if (op == "lmost_leaf") { need(1); return num(t().lmost_leaf(u(a, 0))); }
        if (op == "rmost_leaf") { need(1); return num(t().rmost_leaf(u(a, 0))); }
        if (op == "in_rank") { need(1); return opt(t().in_rank(u(a, 0)), "no inorder"); }
        if (op == "in_select") { need(1); return num(t().in_select(u(a, 0))); }
        throw std::invalid_argument("unknown operation '" + op + "'");
    }
};

int cmd_query(const std::string& structure, const std::string& script) {
    loaded_input in = load_input(structure);
    query_engine eng(std::move(in.bits), in.chunk_bits, in.arity);
    std::ifstream s(script);
    if (!s) throw std::ios_base::failure("cannot open " + script);
    std::string line;
    bool any_bad_op = false;
    while (std::getline(s, line)) {
        std::string out = eng.run_line(line);
        if (out.empty()) continue;
        if (out.rfind("ERR unknown operation", 0) == 0) any_bad_op = true;
        std::cout << out << "\n";
    }
    return any_bad_op ? exit_validation : exit_ok;
}

// latency percentiles over per-operation estimates
struct sampler {
    std::vector<double> ns;
    void add(double v) { ns.push_back(v); }
    double pct(double p) {
        if (ns.empty()) return 0;
        std::sort(ns.begin(), ns.end());
        size_t idx = static_cast<size_t>(p * (ns.size() - 1));
        return ns[idx];
    }
};

int cmd_bench(const std::string& structure, std::string ops_csv, uint64_t samples, uint64_t seed,
              bool dynamic) {
    loaded_input in = load_input(structure);
    uint64_t len = in.bits.size();
    uint64_t nodes = len / 2;
    std::mt19937_64 rng(seed);
    using clock = std::chrono::steady_clock;
    std::cout << "op,n,samples,p50_ns,p99_ns\n";

    auto report = [&](const std::string& op, sampler& s) {
        std::cout << op << "," << nodes << "," << samples << "," << static_cast<uint64_t>(s.pct(0.5))
                  << "," << static_cast<uint64_t>(s.pct(0.99)) << "\n";
    };

    if (dynamic) {
        rmm::dynamic_rmm d(in.bits);
        if (ops_csv.empty()) ops_csv = "insert_pair,delete_node,findclose,rank1";
        std::istringstream is(ops_csv);
        std::string op;
        while (std::getline(is, op, ',')) {
            sampler s;
            for (uint64_t it = 0; it < samples; ++it) {
                if (op == "insert_pair" || op == "delete_node") {
                    uint64_t i = rng() % (d.size() + 1);
                    auto t0 = clock::now();
                    d.insert_pair(i, i);
                    auto t1 = clock::now();
                    d.delete_node(i);
                    auto t2 = clock::now();
                    double ins = std::chrono::duration<double, std::nano>(t1 - t0).count();
                    double del = std::chrono::duration<double, std::nano>(t2 - t1).count();
                    s.add(op == "insert_pair" ? ins : del);
                } else if (op == "findclose") {
                    uint64_t v = d.select1(1 + rng() % d.ones());
                    auto t0 = clock::now();
                    auto r = d.fwd_search(v, 0);
                    auto t1 = clock::now();
                    if (!r) return exit_validation;
                    s.add(std::chrono::duration<double, std::nano>(t1 - t0).count());
                } else if (op == "rank1") {
                    uint64_t i = rng() % d.size();
                    auto t0 = clock::now();
                    volatile uint64_t r = d.rank1(i);
                    auto t1 = clock::now();
                    (void)r;
                    s.add(std::chrono::duration<double, std::nano>(t1 - t0).count());
                } else {
                    std::cerr << "unknown dynamic bench op '" << op << "'\n";
                    return exit_usage;
                }
            }
            report(op, s);
        }
        return exit_ok;
    }

    rmm::static_rmm prim(in.bits, {in.chunk_bits, in.arity, rmm::static_rmm::summary_width::automatic});
    std::optional<rmm::ordinal_tree<rmm::static_rmm>> tree;
    if (prim.total_excess() == 0 && prim.min_excess() >= 0) tree.emplace(prim);
    if (ops_csv.empty()) ops_csv = "findclose,enclose,lca,rank1,select1";

    // pre-draw random opening positions
    std::vector<uint64_t> opens(4096);
    for (auto& v : opens) v = prim.select1(1 + rng() % prim.ones());

    constexpr unsigned batch = 16;
    std::istringstream is(ops_csv);
    std::string op;
    while (std::getline(is, op, ',')) {
        sampler s;
        uint64_t sink = 0;
        for (uint64_t it = 0; it < (samples + batch - 1) / batch; ++it) {
            uint64_t base = rng();
            auto t0 = clock::now();
            for (unsigned b = 0; b < batch; ++b) {
                uint64_t v = opens[(base + b * 37) % opens.size()];
                uint64_t w = opens[(base + b * 53 + 11) % opens.size()];
                if (op == "findclose") sink += tree->find_close(v);
                else if (op == "findopen") sink += tree->find_open(tree->find_close(v));
                else if (op == "enclose") sink += tree->enclose(v).value_or(0);
                else if (op == "depth") sink += tree->depth(v);
                else if (op == "subtree_size") sink += tree->subtree_size(v);
                else if (op == "lca") sink += tree->lca(v, w);
                else if (op == "deepest_node") sink += tree->deepest_node(v);
                else if (op == "degree") sink += tree->degree(v);
                else if (op == "rank1") sink += prim.rank1(v);
                else if (op == "select1") sink += prim.select1(1 + (base + b) % prim.ones());
                else if (op == "rmqi") sink += prim.rmqi(std::min(v, w), std::max(v, w)).pos;
                else {
                    std::cerr << "unknown bench op '" << op << "'\n";
                    return exit_usage;
                }
            }
            auto t1 = clock::now();
            s.add(std::chrono::duration<double, std::nano>(t1 - t0).count() / batch);
        }
        if (sink == 0xdeadbeef) std::cerr << "";  // keep the loop from folding away
        report(op, s);
    }
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "rmmtool: balanced-parentheses toolkit (range min-max trees).\n"
        "Positions are 0-based bit positions; ranks are 1-based.\n"
        "Inputs are text ('('/')'. or '1'/'0', whitespace ignored) or RMMT binary."};
    app.require_subcommand(1);

    std::string file, output, script, ops;
    uint32_t chunk_bits = 512, arity = 32;
    uint64_t samples = 10000, seed = 1;
    bool dynamic = false;

    auto* validate = app.add_subcommand("validate", "check a parentheses corpus and report shape");
    validate->add_option("file", file, "input file")->required();

    auto* build = app.add_subcommand("build", "build a static structure and write RMMT output");
    build->add_option("input", file, "input file")->required();
    build->add_option("-o,--output", output, "output RMMT file")->required();
    build->add_option("--chunk-bits", chunk_bits, "chunk size s (power of two >= 64)");
    build->add_option("--arity", arity, "tree arity k (power of two >= 2)");

    auto* query = app.add_subcommand("query", "run a line-oriented query script");
    query->add_option("structure", file, "structure file (text or RMMT)")->required();
    query->add_option("script", script, "script file: one '<op> <args...>' per line")->required();

    auto* bench = app.add_subcommand("bench", "measure operation latency; CSV on stdout");
    bench->add_option("structure", file, "structure file (text or RMMT)")->required();
    bench->add_option("--ops", ops, "comma-separated op list");
    bench->add_option("--samples", samples, "operations measured per op");
    bench->add_option("--seed", seed, "argument-sampling seed");
    bench->add_flag("--dynamic", dynamic, "drive the dynamic structure with an edit/query mix");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? exit_ok : exit_usage;
    }

    try {
        if (validate->parsed()) return cmd_validate(file);
        if (build->parsed()) return cmd_build(file, output, chunk_bits, arity);
        if (query->parsed()) return cmd_query(file, script);
        if (bench->parsed()) return cmd_bench(file, ops, samples, seed, dynamic);
    } catch (const rmm::parse_error& e) {
        std::cerr << "parse error at position " << e.position << ": " << e.what() << "\n";
        return exit_validation;
    } catch (const rmm::format_error& e) {
        std::cerr << "format error: " << e.what() << "\n";
        return exit_validation;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return exit_io;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_validation;
    }
    return exit_usage;
}
