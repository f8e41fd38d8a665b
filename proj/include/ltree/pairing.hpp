#pragma once

#include <array>
#include <string>
#include <string_view>

#include "ltree/errors.hpp"

namespace ltree {

/// The three ways of splitting four variables into two pairs. The numeric
/// value is the index returned by the nuclear-norm test (A, B, C unfoldings).
enum class Pairing : int { P12_34 = 0, P13_24 = 1, P14_23 = 2 };

inline constexpr std::array<Pairing, 3> kAllPairings{Pairing::P12_34, Pairing::P13_24,
                                                     Pairing::P14_23};

namespace detail {
// kPartner[p][i]: the position paired with position i under pairing p.
inline constexpr int kPartner[3][4] = {{1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}};
} // namespace detail

inline std::string_view to_string(Pairing p) {
    switch (p) {
    case Pairing::P12_34: return "12|34";
    case Pairing::P13_24: return "13|24";
    case Pairing::P14_23: return "14|23";
    }
    return "?";
}

inline int partner(Pairing p, int position) { return detail::kPartner[static_cast<int>(p)][position]; }

/// Partner of position 0 under `p` (1, 2 or 3).
inline int partner_of_first(Pairing p) { return partner(p, 0); }

inline Pairing pairing_from_partner(int partner_of_first) {
    if (partner_of_first < 1 || partner_of_first > 3) {
        throw InvalidArgument("quartet partner index must be 1, 2 or 3, got " +
                              std::to_string(partner_of_first));
    }
    return static_cast<Pairing>(partner_of_first - 1);
}

/// Pairing seen after relabeling the inputs: position i of the new quartet
/// is position order[i] of the original one.
inline Pairing relabel(Pairing p, const std::array<int, 4>& order) {
    const int original_partner = partner(p, order[0]);
    for (int j = 1; j < 4; ++j)
        if (order[j] == original_partner) return pairing_from_partner(j);
    throw InvalidArgument("relabel order is not a permutation of 0..3");
}

} // namespace ltree
