#pragma once

// A varied supply of verified model ⊡-morphisms for invariance tests.

#include <string>
#include <vector>

#include "nck/nck.hpp"
#include "support/gen.hpp"

struct PooledMorphism {
    nck::Model src;
    nck::Model tgt;
    nck::WorldMap map;
    std::string origin;
};

/// Cycles through serialization, symmetric completion, endpoint loops,
/// folding a doubled model, and exhaustive search between random models.
inline std::vector<PooledMorphism> morphism_pool(gen::Rng& rng, std::size_t count) {
    using namespace nck;
    const std::vector<std::string> vars{"p", "q"};
    std::vector<PooledMorphism> out;
    for (std::size_t k = 0; out.size() < count; ++k) {
        switch (k % 5) {
            case 0: {
                const Model m = gen::model(rng, 1 + gen::pick(rng, 5), vars);
                TransformResult r = serialize(m);
                out.push_back({std::move(r.output), m, std::move(r.map), "serialize"});
                break;
            }
            case 1: {
                const Model m = gen::quasi_symmetric_model(rng, 1 + gen::pick(rng, 5), vars);
                TransformResult r = symmetrize(m);
                out.push_back({std::move(r.output), m, std::move(r.map), "symmetrize"});
                break;
            }
            case 2: {
                const Model m = gen::model(rng, 1 + gen::pick(rng, 5), vars, 0.2);
                TransformResult r = reflexivize_endpoints(m);
                out.push_back({std::move(r.output), m, std::move(r.map), "endpoints"});
                break;
            }
            case 3: {
                const Model m = gen::model(rng, 1 + gen::pick(rng, 4), vars);
                const Model u = disjoint_union(m, m);
                WorldMap f;
                for (std::size_t x = 0; x < u.size(); ++x) f.image.push_back(x % m.size());
                out.push_back({u, m, f, "fold"});
                break;
            }
            default: {
                for (int attempt = 0; attempt < 200; ++attempt) {
                    const Model a = gen::model(rng, 2 + gen::pick(rng, 3), vars, 0.4);
                    const Model b = gen::model(rng, 1 + gen::pick(rng, 3), vars, 0.5);
                    if (auto f = find_morphism(a, b, {"p", "q"}, false)) {
                        out.push_back({a, b, *f, "search"});
                        break;
                    }
                }
                break;
            }
        }
    }
    return out;
}
