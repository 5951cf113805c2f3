#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "borg/hierarchy.hpp"
#include "borg/rng.hpp"
#include "borg/thresh_sign.hpp"

namespace borg {

// Versioned JSON files for hierarchy key material and signatures. Identity
// labels are stored hex-encoded (they are byte strings, not text), scalars
// and group elements as canonical hex. Writers are deterministic: the same
// inputs always produce the same bytes, which the CLI's --seed reproducibility
// guarantee depends on.

struct StoredMaster {
    std::string curve;
    MasterKey key;
};

// An intermediate delegation level: its entropy and secret, plus the identity
// path and key chain down to it.
struct StoredLevel {
    std::string curve;
    std::uint32_t level = 0;
    IdentityVector ids;
    GroupKeyChain chain;
    LevelSecret secret;
};

struct StoredShare {
    std::string curve;
    KeyShare share;
};

// Public parameters a verifier needs: the trusted root key rides in
// chain.q.front().
struct StoredParams {
    std::string curve;
    std::uint32_t threshold = 0;
    std::uint32_t group_size = 0;
    std::uint32_t depth = 0;
    IdentityVector ids;
    GroupKeyChain chain;
};

struct StoredSignature {
    std::string curve;
    IdentityVector ids;
    GroupKeyChain chain;
    ThresholdSignature sig;
};

void write_master_file(const std::string& path, const StoredMaster& m);
StoredMaster read_master_file(const std::string& path);

void write_level_file(const std::string& path, const StoredLevel& l);
StoredLevel read_level_file(const std::string& path);

void write_share_file(const std::string& path, const StoredShare& s);
StoredShare read_share_file(const std::string& path);

void write_params_file(const std::string& path, const StoredParams& p);
StoredParams read_params_file(const std::string& path);

void write_signature_file(const std::string& path, const StoredSignature& s);
StoredSignature read_signature_file(const std::string& path);

// "gnb-grp1" for the signing group, "amf-west" at level 1 above it,
// "core-<l>-grp" in between.
std::string default_level_label(std::uint32_t level, std::uint32_t depth);

struct HierarchyFiles {
    StoredParams params;
    std::vector<std::string> paths;  // everything written, params.json first
};

// Runs root setup and the delegation chain down to a (threshold, group_size)
// signing group at `depth`, writing params.json, master.json, one file per
// intermediate level, and one share file per group member into `dir`
// (created if missing).
HierarchyFiles write_hierarchy(const std::string& dir, std::string_view curve,
                               std::uint32_t threshold, std::uint32_t group_size,
                               std::uint32_t depth, RandomSource& rng);

}  // namespace borg
