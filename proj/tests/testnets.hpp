#pragma once

// small fixture networks shared by the unit tests

#include "relnet/network.hpp"

namespace relnet::testnets {

// 4-node network, senders {0,1} and receivers {2,3}, real gains chosen so
// the strong links carry 2 bit levels and the weak links 1
inline GaussianNetwork small_mimo() {
    return make_network(4, {{0, 2, {2.2, 0.0}},
                            {0, 3, {2.5, 0.0}},
                            {1, 2, {1.8, 0.0}},
                            {1, 3, {1.5, 0.0}}});
}

// 4-node sender bank {0,1} -> receiver bank {2,3} with gain matrix
// [[a, b], [c, d]] (entry = gain from sender column to receiver row)
inline GaussianNetwork bank2x2(ComplexGain a, ComplexGain b, ComplexGain c,
                               ComplexGain d) {
    return make_network(4, {{0, 2, a}, {1, 2, b}, {0, 3, c}, {1, 3, d}});
}

// 6-node two-layer relay chain: strong source and destination links, a
// 2x2 middle bank with gain matrix [[m00, m01], [m10, m11]]
inline GaussianNetwork two_layer(ComplexGain m00, ComplexGain m01,
                                 ComplexGain m10, ComplexGain m11,
                                 double strong = kDefaultStrongGain) {
    return make_network(6, {{0, 1, {strong, 0.0}},
                            {0, 2, {strong, 0.0}},
                            {1, 3, m00},
                            {2, 3, m01},
                            {1, 4, m10},
                            {2, 4, m11},
                            {3, 5, {strong, 0.0}},
                            {4, 5, {strong, 0.0}}});
}

}  // namespace relnet::testnets
