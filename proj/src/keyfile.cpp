#include "borg/keyfile.hpp"

#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "borg/bytes.hpp"
#include "borg/errors.hpp"
#include "borg/hex.hpp"

namespace borg {

namespace {

using ordered_json = nlohmann::ordered_json;

void write_json(const std::string& path, const ordered_json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << j.dump(2) << '\n';
    if (!out) throw IoError("short write to " + path);
}

ordered_json read_json(const std::string& path, const char* expected_kind) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    ordered_json j;
    try {
        in >> j;
    } catch (const ordered_json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    try {
        if (j.value("version", 0) != 1) throw ParseError("unsupported version");
        if (j.value("kind", std::string{}) != expected_kind) {
            throw ParseError(std::string("expected a \"") + expected_kind + "\" file");
        }
    } catch (const ordered_json::exception& e) {
        throw ParseError(path + ": " + e.what());
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
    return j;
}

const Group& group_of(const ordered_json& j, std::string& curve_out) {
    curve_out = j.at("curve").get<std::string>();
    try {
        return group_by_name(curve_out);
    } catch (const ParseError&) {
        throw;
    } catch (const Error&) {
        throw ParseError("unknown curve \"" + curve_out + "\"");
    }
}

Scalar get_scalar(const Group& g, const ordered_json& j, const char* key) {
    const Scalar s{from_hex(j.at(key).get<std::string>())};
    if (!g.scalar_valid(s.bytes)) throw ParseError(std::string(key) + ": not a canonical scalar");
    return s;
}

GroupElement get_element(const Group& g, const ordered_json& j, const char* key) {
    const GroupElement e{from_hex(j.at(key).get<std::string>())};
    if (!g.element_valid(e.bytes)) {
        throw ParseError(std::string(key) + ": not a valid group element");
    }
    return e;
}

ordered_json ids_json(const IdentityVector& ids) {
    ordered_json a = ordered_json::array();
    for (const auto& id : ids.ids) a.push_back(to_hex(id));
    return a;
}

ordered_json chain_json(const GroupKeyChain& chain) {
    ordered_json a = ordered_json::array();
    for (const auto& q : chain.q) a.push_back(to_hex(q.bytes));
    return a;
}

IdentityVector get_ids(const ordered_json& j) {
    IdentityVector ids;
    for (const auto& s : j.at("ids")) ids.ids.push_back(from_hex(s.get<std::string>()));
    return ids;
}

GroupKeyChain get_chain(const Group& g, const ordered_json& j, const IdentityVector& ids) {
    GroupKeyChain chain;
    for (const auto& s : j.at("chain")) {
        GroupElement e{from_hex(s.get<std::string>())};
        if (!g.element_valid(e.bytes)) throw ParseError("chain: invalid group element");
        chain.q.push_back(std::move(e));
    }
    if (chain.q.size() != ids.level() + 1) {
        throw ParseError("chain length does not match the identity path");
    }
    return chain;
}

template <typename Fn>
auto guard(const std::string& path, Fn fn) {
    try {
        return fn();
    } catch (const ordered_json::exception& e) {
        throw ParseError(path + ": " + e.what());
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

}  // namespace

void write_master_file(const std::string& path, const StoredMaster& m) {
    ordered_json j;
    j["version"] = 1;
    j["kind"] = "master";
    j["curve"] = m.curve;
    j["alpha"] = to_hex(m.key.alpha.bytes);
    j["sk"] = to_hex(m.key.sk.bytes);
    j["pk"] = to_hex(m.key.pk.bytes);
    write_json(path, j);
}

StoredMaster read_master_file(const std::string& path) {
    const ordered_json j = read_json(path, "master");
    return guard(path, [&] {
        StoredMaster m;
        const Group& g = group_of(j, m.curve);
        m.key.alpha = get_scalar(g, j, "alpha");
        m.key.sk = get_scalar(g, j, "sk");
        m.key.pk = get_element(g, j, "pk");
        if (!(g.exp_base(m.key.sk) == m.key.pk)) {
            throw ParseError("public key does not match the secret");
        }
        return m;
    });
}

void write_level_file(const std::string& path, const StoredLevel& l) {
    ordered_json j;
    j["version"] = 1;
    j["kind"] = "level";
    j["curve"] = l.curve;
    j["level"] = l.level;
    j["ids"] = ids_json(l.ids);
    j["chain"] = chain_json(l.chain);
    j["alpha"] = to_hex(l.secret.alpha.bytes);
    j["sk"] = to_hex(l.secret.sk.bytes);
    write_json(path, j);
}

StoredLevel read_level_file(const std::string& path) {
    const ordered_json j = read_json(path, "level");
    return guard(path, [&] {
        StoredLevel l;
        const Group& g = group_of(j, l.curve);
        l.level = j.at("level").get<std::uint32_t>();
        l.ids = get_ids(j);
        l.chain = get_chain(g, j, l.ids);
        l.secret.alpha = get_scalar(g, j, "alpha");
        l.secret.sk = get_scalar(g, j, "sk");
        if (l.ids.level() != l.level) throw ParseError("level does not match identity path");
        return l;
    });
}

void write_share_file(const std::string& path, const StoredShare& s) {
    ordered_json j;
    j["version"] = 1;
    j["kind"] = "share";
    j["curve"] = s.curve;
    j["index"] = s.share.index;
    j["threshold"] = s.share.threshold;
    j["group_size"] = s.share.group_size;
    j["expiry_ms"] = s.share.expiry_ms;
    j["ids"] = ids_json(s.share.ids);
    j["chain"] = chain_json(s.share.chain);
    j["sk_share"] = to_hex(s.share.sk_share.bytes);
    j["pk_share"] = to_hex(s.share.pk_share.bytes);
    write_json(path, j);
}

StoredShare read_share_file(const std::string& path) {
    const ordered_json j = read_json(path, "share");
    return guard(path, [&] {
        StoredShare s;
        const Group& g = group_of(j, s.curve);
        s.share.index = j.at("index").get<std::uint32_t>();
        s.share.threshold = j.at("threshold").get<std::uint32_t>();
        s.share.group_size = j.at("group_size").get<std::uint32_t>();
        s.share.expiry_ms = j.at("expiry_ms").get<std::int64_t>();
        s.share.ids = get_ids(j);
        s.share.chain = get_chain(g, j, s.share.ids);
        s.share.sk_share = get_scalar(g, j, "sk_share");
        s.share.pk_share = get_element(g, j, "pk_share");
        if (s.share.index < 1 || s.share.index > s.share.group_size ||
            s.share.threshold < 1 || s.share.threshold > s.share.group_size) {
            throw ParseError("inconsistent share indices");
        }
        if (!(g.exp_base(s.share.sk_share) == s.share.pk_share)) {
            throw ParseError("share public key does not match the share secret");
        }
        return s;
    });
}

void write_params_file(const std::string& path, const StoredParams& p) {
    ordered_json j;
    j["version"] = 1;
    j["kind"] = "params";
    j["curve"] = p.curve;
    j["threshold"] = p.threshold;
    j["group_size"] = p.group_size;
    j["depth"] = p.depth;
    j["ids"] = ids_json(p.ids);
    j["chain"] = chain_json(p.chain);
    write_json(path, j);
}

StoredParams read_params_file(const std::string& path) {
    const ordered_json j = read_json(path, "params");
    return guard(path, [&] {
        StoredParams p;
        const Group& g = group_of(j, p.curve);
        p.threshold = j.at("threshold").get<std::uint32_t>();
        p.group_size = j.at("group_size").get<std::uint32_t>();
        p.depth = j.at("depth").get<std::uint32_t>();
        p.ids = get_ids(j);
        p.chain = get_chain(g, j, p.ids);
        if (p.threshold < 1 || p.threshold > p.group_size || p.depth != p.ids.level()) {
            throw ParseError("inconsistent parameters");
        }
        return p;
    });
}

void write_signature_file(const std::string& path, const StoredSignature& s) {
    ordered_json j;
    j["version"] = 1;
    j["kind"] = "signature";
    j["curve"] = s.curve;
    j["ids"] = ids_json(s.ids);
    j["chain"] = chain_json(s.chain);
    j["slot"] = s.sig.slot;
    j["signer_set"] = s.sig.signer_set;
    j["r"] = to_hex(s.sig.r.bytes);
    j["z"] = to_hex(s.sig.z.bytes);
    write_json(path, j);
}

StoredSignature read_signature_file(const std::string& path) {
    const ordered_json j = read_json(path, "signature");
    return guard(path, [&] {
        StoredSignature s;
        const Group& g = group_of(j, s.curve);
        s.ids = get_ids(j);
        s.chain = get_chain(g, j, s.ids);
        s.sig.slot = j.at("slot").get<std::uint32_t>();
        s.sig.signer_set = j.at("signer_set").get<std::vector<std::uint32_t>>();
        s.sig.r = get_element(g, j, "r");
        s.sig.z = get_scalar(g, j, "z");
        return s;
    });
}

std::string default_level_label(std::uint32_t level, std::uint32_t depth) {
    if (level == depth) return "gnb-grp1";
    if (level == 1) return "amf-west";
    return "core-" + std::to_string(level) + "-grp";
}

HierarchyFiles write_hierarchy(const std::string& dir, std::string_view curve,
                               std::uint32_t threshold, std::uint32_t group_size,
                               std::uint32_t depth, RandomSource& rng) {
    if (depth < 1) throw Error("hierarchy depth must be >= 1");
    const Group& g = group_by_name(curve);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir + ": " + ec.message());

    HierarchyFiles out;
    const std::string curve_name{curve};
    const MasterKey mk = setup(g, rng);

    IdentityVector ids;
    GroupKeyChain chain{{mk.pk}};
    Scalar parent_sk = mk.sk;
    std::vector<StoredLevel> levels;
    ExtractResult leaf;
    for (std::uint32_t level = 1; level <= depth; ++level) {
        const bool is_leaf = level == depth;
        ExtractResult ex = extract(g, to_bytes(default_level_label(level, depth)), ids, chain,
                                   parent_sk, is_leaf ? threshold : 1, is_leaf ? group_size : 1, 0,
                                   rng);
        ids = ex.shares[0].ids;
        chain = ex.chain;
        if (is_leaf) {
            leaf = std::move(ex);
        } else {
            parent_sk = ex.level_secret.sk;
            levels.push_back({curve_name, level, ids, chain, ex.level_secret});
        }
    }

    out.params = {curve_name, threshold, group_size, depth, ids, chain};
    const auto path = [&dir](const std::string& name) {
        return (std::filesystem::path(dir) / name).string();
    };

    write_params_file(path("params.json"), out.params);
    out.paths.push_back(path("params.json"));
    write_master_file(path("master.json"), {curve_name, mk});
    out.paths.push_back(path("master.json"));
    for (const StoredLevel& l : levels) {
        const std::string p = path("level-" + std::to_string(l.level) + ".json");
        write_level_file(p, l);
        out.paths.push_back(p);
    }
    for (const KeyShare& s : leaf.shares) {
        const std::string p = path("share-" + std::to_string(s.index) + ".json");
        write_share_file(p, {curve_name, s});
        out.paths.push_back(p);
    }
    return out;
}

}  // namespace borg
