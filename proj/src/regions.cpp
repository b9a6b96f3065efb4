#include "cbat/regions.hpp"

#include <algorithm>
#include <map>

namespace cbat {

namespace {

inline size_t hash_mix(size_t h, size_t v) {
    return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

inline bool above_k(const Rat& v, uint32_t K) { return v > Rat((long)K); }

}  // namespace

Rat fract_capped(const Rat& v, uint32_t K) {
    if (above_k(v, K)) return Rat(0);
    return rat_fract(v);
}

bool values_equiv(const Rat& u, const Rat& v, uint32_t K) {
    const bool ut = above_k(u, K), vt = above_k(v, K);
    if (ut || vt) return ut && vt;
    return rat_floor(u) == rat_floor(v) && rat_ceil(u) == rat_ceil(v);
}

bool valuations_equiv(const ClockValuation& v1, const ClockValuation& v2, uint32_t K) {
    if (v1.size() != v2.size()) return false;
    for (size_t c = 0; c < v1.size(); ++c)
        if (!values_equiv(v1[c], v2[c], K)) return false;
    for (size_t c = 0; c < v1.size(); ++c) {
        Rat f1c = fract_capped(v1[c], K), f2c = fract_capped(v2[c], K);
        for (size_t d = 0; d < v1.size(); ++d) {
            bool o1 = f1c <= fract_capped(v1[d], K);
            bool o2 = f2c <= fract_capped(v2[d], K);
            if (o1 != o2) return false;
        }
    }
    return true;
}

RegionKey region_key(const ClockValuation& v, uint32_t K) {
    RegionKey key;
    key.int_part.resize(v.size());
    key.zero_frac.resize(v.size());
    std::map<Rat, std::vector<uint32_t>> by_fract;  // ordered ascending
    for (size_t c = 0; c < v.size(); ++c) {
        if (above_k(v[c], K)) {
            key.int_part[c] = -1;
            key.zero_frac[c] = true;
            continue;
        }
        Rat fract = rat_fract(v[c]);
        key.int_part[c] = (int32_t)rat_floor(v[c]).get_num().get_si();
        key.zero_frac[c] = (fract == 0);
        if (fract != 0) by_fract[fract].push_back((uint32_t)c);
    }
    for (auto& [fract, clocks] : by_fract)
        key.frac_blocks.push_back(std::move(clocks));
    return key;
}

size_t RegionKey::hash() const {
    size_t h = 0x2449b3;
    for (int32_t i : int_part) h = hash_mix(h, (size_t)(i + 2));
    for (bool z : zero_frac) h = hash_mix(h, z ? 7 : 3);
    for (const auto& block : frac_blocks) {
        h = hash_mix(h, 0x5bd1);
        for (uint32_t c : block) h = hash_mix(h, c);
    }
    return h;
}

std::string RegionKey::render(const BAT& bat) const {
    std::string s = "int:{";
    for (size_t c = 0; c < int_part.size(); ++c) {
        if (c) s += ",";
        s += bat.func_term_name(c) + ":";
        s += (int_part[c] < 0) ? "TOP" : std::to_string(int_part[c]);
        if (int_part[c] >= 0 && !zero_frac[c]) s += "+";
    }
    s += "};frac:[";
    for (size_t b = 0; b < frac_blocks.size(); ++b) {
        if (b) s += ",";
        s += "{";
        for (size_t i = 0; i < frac_blocks[b].size(); ++i) {
            if (i) s += ",";
            s += bat.func_term_name(frac_blocks[b][i]);
        }
        s += "}";
    }
    return s + "]";
}

size_t AbstractState::hash() const {
    size_t h = region.hash();
    for (uint64_t w : fluent_bits) h = hash_mix(h, (size_t)w);
    return h;
}

ClockValuation eval_clocks(const GroundKit& kit, const Situation& sigma) {
    return kit.run(sigma).funcs;
}

AbstractState abstract_state_of(const GroundKit& kit, const WorldState& s, uint32_t K) {
    (void)kit;
    return AbstractState{s.fluent_bits, region_key(s.funcs, K)};
}

AbstractState abstract_state(const GroundKit& kit, const Situation& sigma, uint32_t K) {
    return abstract_state_of(kit, kit.run(sigma), K);
}

bool situations_equiv(const GroundKit& kit, const Situation& s1, const Situation& s2,
                      uint32_t K) {
    return abstract_state(kit, s1, K) == abstract_state(kit, s2, K);
}

std::vector<Rat> tsuccs(const ClockValuation& valuation, uint32_t K) {
    std::vector<Rat> succs;
    Rat last(0);
    succs.push_back(last);
    ClockValuation v = valuation;
    const Rat k_bound((long)K);

    auto some_at_most_k = [&] {
        for (const auto& val : v)
            if (val <= k_bound) return true;
        return false;
    };

    while (some_at_most_k()) {
        Rat mu(0);
        bool has_zero_fract = false;
        for (const auto& val : v) {
            Rat f = rat_fract(val);
            if (f == 0) has_zero_fract = true;
            if (f > mu) mu = f;
        }
        Rat incr = Rat(1) - mu;
        if (has_zero_fract) incr /= 2;
        last += incr;
        succs.push_back(last);
        for (auto& val : v) val += incr;
    }
    return succs;
}

}  // namespace cbat
