#pragma once

// Crossing backbone: the open sites lying on at least one self-avoiding
// open left-right path.
//
// Attach a virtual terminal s to every open site of the left column and t
// to every open site of the right column.  By Menger, a vertex lies on a
// simple s-t path exactly when one of its biconnected blocks sits on the
// s-t path of the block-cut tree, so one Hopcroft-Tarjan pass plus a tree
// walk answers the membership question for every site at once.

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "perc/configuration.hpp"

namespace perc::detail {

// Byte mask over row-major region indices; mask[i] == 1 when site i lies on
// some self-avoiding open left-right path.  All zeros when no crossing.
inline std::vector<std::uint8_t> open_lr_backbone(const Configuration& c) {
    const Region& r = c.region();
    const int w = r.width(), h = r.height();
    const std::int32_t v_count = static_cast<std::int32_t>(r.site_count());
    const std::int32_t s = v_count, t = v_count + 1;
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(v_count), 0);

    std::vector<std::vector<std::int32_t>> adj(static_cast<std::size_t>(v_count) + 2);
    for (std::int32_t i = 0; i < v_count; ++i) {
        if (!c.is_open(i)) continue;
        const int x = i % w, y = i / w;
        for (const auto& o : neighbor_offsets) {
            const int nx = x + o[0], ny = y + o[1];
            if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
            const std::int32_t j = ny * w + nx;
            if (c.is_open(j)) adj[static_cast<std::size_t>(i)].push_back(j);
        }
        if (x == 0) {
            adj[static_cast<std::size_t>(i)].push_back(s);
            adj[static_cast<std::size_t>(s)].push_back(i);
        }
        if (x == w - 1) {
            adj[static_cast<std::size_t>(i)].push_back(t);
            adj[static_cast<std::size_t>(t)].push_back(i);
        }
    }
    if (adj[static_cast<std::size_t>(s)].empty() ||
        adj[static_cast<std::size_t>(t)].empty())
        return mask;

    // Iterative Hopcroft-Tarjan from s; only s's component matters.
    const std::int32_t none = -1;
    std::vector<std::int32_t> disc(static_cast<std::size_t>(v_count) + 2, none);
    std::vector<std::int32_t> low(static_cast<std::size_t>(v_count) + 2, none);
    struct Frame {
        std::int32_t v;
        std::int32_t parent;
        std::size_t next;
    };
    std::vector<Frame> stack;
    std::vector<std::pair<std::int32_t, std::int32_t>> edges;  // DFS edge stack
    std::vector<std::vector<std::int32_t>> blocks;             // vertex lists
    std::vector<std::int32_t> block_stamp(static_cast<std::size_t>(v_count) + 2, none);

    std::int32_t timer = 0;
    disc[static_cast<std::size_t>(s)] = low[static_cast<std::size_t>(s)] = timer++;
    stack.push_back({s, none, 0});
    while (!stack.empty()) {
        Frame& f = stack.back();
        const auto& nbrs = adj[static_cast<std::size_t>(f.v)];
        if (f.next < nbrs.size()) {
            const std::int32_t u = nbrs[f.next++];
            if (u == f.parent) continue;
            if (disc[static_cast<std::size_t>(u)] == none) {
                edges.emplace_back(f.v, u);
                disc[static_cast<std::size_t>(u)] = low[static_cast<std::size_t>(u)] =
                    timer++;
                stack.push_back({u, f.v, 0});
            } else if (disc[static_cast<std::size_t>(u)] <
                       disc[static_cast<std::size_t>(f.v)]) {
                edges.emplace_back(f.v, u);
                low[static_cast<std::size_t>(f.v)] = std::min(
                    low[static_cast<std::size_t>(f.v)], disc[static_cast<std::size_t>(u)]);
            }
            continue;
        }
        const std::int32_t v = f.v, parent = f.parent;
        stack.pop_back();
        if (parent == none) break;
        low[static_cast<std::size_t>(parent)] = std::min(
            low[static_cast<std::size_t>(parent)], low[static_cast<std::size_t>(v)]);
        if (low[static_cast<std::size_t>(v)] >= disc[static_cast<std::size_t>(parent)]) {
            // One block closes at the articulation pair (parent, v).
            blocks.emplace_back();
            auto& verts = blocks.back();
            const std::int32_t id = static_cast<std::int32_t>(blocks.size()) - 1;
            auto add = [&](std::int32_t x) {
                if (block_stamp[static_cast<std::size_t>(x)] != id) {
                    block_stamp[static_cast<std::size_t>(x)] = id;
                    verts.push_back(x);
                }
            };
            while (true) {
                auto [a, b] = edges.back();
                edges.pop_back();
                add(a);
                add(b);
                if (a == parent && b == v) break;
            }
        }
    }
    if (disc[static_cast<std::size_t>(t)] == none) return mask;

    // Block-cut tree: block nodes first, then one node per articulation
    // vertex (a vertex appearing in two or more blocks).
    const std::int32_t n_blocks = static_cast<std::int32_t>(blocks.size());
    std::vector<std::int32_t> seen_in(static_cast<std::size_t>(v_count) + 2, none);
    std::vector<std::int32_t> art_node(static_cast<std::size_t>(v_count) + 2, none);
    std::vector<std::int32_t> home_block(static_cast<std::size_t>(v_count) + 2, none);
    std::int32_t n_nodes = n_blocks;
    for (std::int32_t b = 0; b < n_blocks; ++b) {
        for (std::int32_t v : blocks[static_cast<std::size_t>(b)]) {
            if (seen_in[static_cast<std::size_t>(v)] == none) {
                seen_in[static_cast<std::size_t>(v)] = b;
                home_block[static_cast<std::size_t>(v)] = b;
            } else if (art_node[static_cast<std::size_t>(v)] == none) {
                art_node[static_cast<std::size_t>(v)] = n_nodes++;
            }
        }
    }
    std::vector<std::vector<std::int32_t>> tree(static_cast<std::size_t>(n_nodes));
    for (std::int32_t b = 0; b < n_blocks; ++b) {
        for (std::int32_t v : blocks[static_cast<std::size_t>(b)]) {
            const std::int32_t a = art_node[static_cast<std::size_t>(v)];
            if (a != none) {
                tree[static_cast<std::size_t>(b)].push_back(a);
                tree[static_cast<std::size_t>(a)].push_back(b);
            }
        }
    }
    auto node_of = [&](std::int32_t v) {
        const std::int32_t a = art_node[static_cast<std::size_t>(v)];
        return a != none ? a : home_block[static_cast<std::size_t>(v)];
    };
    const std::int32_t from = node_of(s), to = node_of(t);
    if (from == none || to == none)
        throw std::logic_error("open_lr_backbone: terminal outside every block");

    std::vector<std::int32_t> parent_node(static_cast<std::size_t>(n_nodes), none);
    std::vector<std::int32_t> queue{from};
    parent_node[static_cast<std::size_t>(from)] = from;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const std::int32_t u = queue[head];
        if (u == to) break;
        for (std::int32_t x : tree[static_cast<std::size_t>(u)]) {
            if (parent_node[static_cast<std::size_t>(x)] == none) {
                parent_node[static_cast<std::size_t>(x)] = u;
                queue.push_back(x);
            }
        }
    }
    if (parent_node[static_cast<std::size_t>(to)] == none)
        throw std::logic_error("open_lr_backbone: terminals connected but tree path missing");
    for (std::int32_t u = to;; u = parent_node[static_cast<std::size_t>(u)]) {
        if (u < n_blocks)
            for (std::int32_t v : blocks[static_cast<std::size_t>(u)])
                if (v < v_count) mask[static_cast<std::size_t>(v)] = 1;
        if (u == from) break;
    }
    return mask;
}

}  // namespace perc::detail
